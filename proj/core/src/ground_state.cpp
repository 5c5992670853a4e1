// SPDX-License-Identifier: Apache-2.0

#include "spinbdg/ground_state.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spinbdg/error.hpp"

namespace spinbdg
{

namespace
{

struct Evaluation
{
  /// (H - mu - lambda S_z) phi with (mu, lambda) fitted in least squares.
  SpinorField residual_field;
  double residual = 0.0;
  double energy = 0.0;
};

// The constraint set has two multipliers, one per conserved quantity, so the
// component potentials are mu + lambda m. Fitting them rather than three free
// values keeps fixed points of the flow on the constrained stationary set.
Evaluation evaluate(const SpinorField &phi, const ModelParams &params, const Potential &potential)
{
  SpinorField kin = apply_kinetic(phi);
  const double kinetic = dot(kin, phi);
  SpinorField h_phi = apply_gpe_hamiltonian(phi, params, potential);

  auto rho = density(phi);
  auto s = spin_vector(phi);
  double local = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double r = rho[i].real();
    const double s2 = std::norm(s.x[i]) + std::norm(s.y[i]) + std::norm(s.z[i]);
    local += potential.values[i] * r + 0.5 * params.beta_n * r * r + 0.5 * params.beta_s * s2;
  }

  const double w = phi.grid()->cell_volume();
  std::array<double, 3> n{}, hn{};
  for (int j = 0; j < 3; ++j) {
    auto p = phi.component(j);
    auto hp = h_phi.component(j);
    for (std::size_t i = 0; i < p.size(); ++i) {
      n[j] += std::norm(p[i]);
      hn[j] += (hp[i] * std::conj(p[i])).real();
    }
    n[j] *= w;
    hn[j] *= w;
  }
  // Normal equations for min || H phi - (mu + lambda S_z) phi ||.
  const double a11 = n[0] + n[1] + n[2];
  const double a12 = n[0] - n[2];
  const double a22 = n[0] + n[2];
  const double b1 = hn[0] + hn[1] + hn[2];
  const double b2 = hn[0] - hn[2];
  const double det = a11 * a22 - a12 * a12;
  double mu = 0.0;
  double lambda = 0.0;
  if (det > 1e-12 * a11 * a22) {
    mu = (b1 * a22 - b2 * a12) / det;
    lambda = (a11 * b2 - a12 * b1) / det;
  } else if (a11 > 0.0) {
    mu = b1 / a11;
  }

  Evaluation ev;
  ev.energy = kinetic + local * w;
  ev.residual_field = std::move(h_phi);
  const double shifts[3] = {mu + lambda, mu, mu - lambda};
  for (int j = 0; j < 3; ++j) {
    auto r = ev.residual_field.component(j);
    auto p = phi.component(j);
    for (std::size_t i = 0; i < r.size(); ++i)
      r[i] -= shifts[j] * p[i];
  }
  ev.residual = norm(ev.residual_field);
  return ev;
}

/// ||(H - Lambda) phi|| with Lambda the component Rayleigh quotients.
double component_residual(const SpinorField &phi, const SpinorField &h_phi, const ChemicalPotentials &cp)
{
  SpinorField r = h_phi;
  for (int j = 0; j < 3; ++j) {
    const double mu = cp.status[j] == PotentialStatus::undefined ? 0.0 : cp.mu[j];
    auto rj = r.component(j);
    auto p = phi.component(j);
    for (std::size_t i = 0; i < rj.size(); ++i)
      rj[i] -= mu * p[i];
  }
  return norm(r);
}

std::vector<double> smoothing_symbol(const SpectralGrid &grid, double tau, double shift)
{
  const auto &kin = grid.kinetic_symbol();
  std::vector<double> sym(kin.size());
  for (std::size_t i = 0; i < kin.size(); ++i)
    sym[i] = 1.0 / (1.0 + tau * (kin[i] + shift));
  return sym;
}

bool all_finite(const SpinorField &f)
{
  return std::all_of(f.data().begin(), f.data().end(),
                     [](const cplx &v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

double gaussian(const std::array<double, 3> &x, const std::array<double, 3> &gamma, int dim)
{
  double e = 0.0;
  for (int a = 0; a < dim; ++a)
    e += gamma[a] * x[a] * x[a];
  return std::exp(-0.5 * e);
}

}  // namespace

ConstraintScaling constraint_scaling(const SpinorField &phi, double m)
{
  if (!(m > -1.0 && m < 1.0))
    throw ConstraintError("magnetization target must lie in (-1, 1)");
  const double w = phi.grid()->cell_volume();
  std::array<double, 3> n{0.0, 0.0, 0.0};
  for (int j = 0; j < 3; ++j)
    for (const auto &v : phi.component(j))
      n[j] += std::norm(v);
  for (auto &v : n)
    v *= w;
  const double n1 = n[0], n0 = n[1], nm = n[2];

  if (n1 == 0.0 && nm == 0.0)
    throw ConstraintError("constraint projection needs a nonzero m=+1 or m=-1 component");
  ConstraintScaling a;
  if (n1 == 0.0 || nm == 0.0) {
    // One end component is absent, so its factor only enters through a_0.
    const double y = std::abs(m);
    const double z = 1.0 - y;
    const bool plus_missing = n1 == 0.0;
    if (n0 == 0.0 || (plus_missing ? m >= 0.0 : m <= 0.0))
      throw ConstraintError(std::string("magnetization target infeasible: component m=") +
                            (plus_missing ? "+1" : "-1") + " vanishes");
    const double present = std::sqrt(y / (plus_missing ? nm : n1));
    a.zero = std::sqrt(z / n0);
    const double absent = a.zero * a.zero / present;
    a.plus = plus_missing ? absent : present;
    a.minus = plus_missing ? present : absent;
    return a;
  }

  // With s = X + Y the scaled end masses are X = (s+m)/2, Y = (s-m)/2 and the
  // middle mass is c sqrt(XY); unit mass reduces to 1 - s = (c/2) sqrt(s^2 - m^2).
  const double c = n0 / std::sqrt(n1 * nm);
  auto excess = [&](double s) { return (1.0 - s) - 0.5 * c * std::sqrt(std::max(0.0, s * s - m * m)); };
  double lo = std::abs(m);
  double hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi)
      break;
    (excess(mid) > 0.0 ? lo : hi) = mid;
  }
  const double s = std::abs(excess(lo)) < std::abs(excess(hi)) ? lo : hi;
  const double x = 0.5 * (s + m);
  const double y = 0.5 * (s - m);
  a.plus = std::sqrt(x / n1);
  a.minus = std::sqrt(y / nm);
  a.zero = std::sqrt(a.plus * a.minus);
  return a;
}

SpinorField project_constraints(const SpinorField &phi, double m)
{
  const auto a = constraint_scaling(phi, m);
  SpinorField out = phi;
  const double f[3] = {a.plus, a.zero, a.minus};
  for (int j = 0; j < 3; ++j)
    for (auto &v : out.component(j))
      v *= f[j];
  return out;
}

double stabilizing_shift(const SpinorField &phi, const ModelParams &params, const Potential &potential)
{
  auto rho = density(phi);
  double rmax = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i)
    rmax = std::max(rmax, rho[i].real());
  return potential.max_value() + params.beta_n * rmax;
}

SpinorField gradient_flow_step(const SpinorField &phi, double tau, double shift, const ModelParams &params,
                               const Potential &potential)
{
  if (!(tau > 0.0))
    throw ConvergenceError("gradient flow step size must be positive");
  Evaluation ev = evaluate(phi, params, potential);
  const auto sym = smoothing_symbol(*phi.grid(), tau, shift);
  for (int j = 0; j < 3; ++j)
    phi.grid()->apply_multiplier(ev.residual_field.component(j), sym);
  SpinorField next = phi;
  axpy(-tau, ev.residual_field, next);
  if (!all_finite(next))
    throw ConvergenceError("gradient flow produced non-finite values; retry with a smaller step size");
  return project_constraints(next, params.magnetization);
}

SpinorField default_initial_state(const GridPtr &grid, const ModelParams &params)
{
  const double m = params.magnetization;
  std::array<double, 3> w{std::sqrt(0.5 * (1.0 + m)), 1.0, std::sqrt(0.5 * (1.0 - m))};
  // The m=0 component of the antiferromagnetic minimizer vanishes; seeding it
  // would start on the ferromagnetic stationary branch at m = 0.
  if (params.phase() == Phase::antiferromagnetic)
    w[1] = 0.0;
  SpinorField phi(grid);
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const double g = gaussian(grid->coordinates(i), params.gamma, grid->dim());
    for (int j = 0; j < 3; ++j)
      phi.component(j)[i] = w[j] * g;
  }
  return project_constraints(phi, m);
}

double euler_lagrange_residual(const SpinorField &phi, const ModelParams &params, const Potential &potential)
{
  SpinorField h_phi = apply_gpe_hamiltonian(phi, params, potential);
  return component_residual(phi, h_phi, chemical_potentials_from(phi, h_phi));
}

GroundState evaluate_ground_state(SpinorField phi, const ModelParams &params, const Potential &potential)
{
  require_same_grid(phi.grid(), potential.grid, "evaluate_ground_state");
  SpinorField h_phi = apply_gpe_hamiltonian(phi, params, potential);
  GroundState gs;
  gs.mu = chemical_potentials_from(phi, h_phi);
  gs.residual = component_residual(phi, h_phi, gs.mu);
  gs.energy = energy(phi, params, potential);
  gs.phi = std::move(phi);
  gs.params = params;
  gs.potential = potential;
  return gs;
}

GroundState solve_ground_state(const ModelParams &params, const Potential &potential,
                               const GroundStateOptions &options)
{
  return solve_ground_state(params, potential, default_initial_state(potential.grid, params), options);
}

GroundState solve_ground_state(const ModelParams &params, const Potential &potential, const SpinorField &initial,
                               const GroundStateOptions &options)
{
  const auto &grid = potential.grid;
  require_same_grid(grid, initial.grid(), "solve_ground_state");
  params.validate(grid->dim());

  SpinorField phi = project_constraints(initial, params.magnetization);
  // The flow preserves real data; clear transform roundoff so it cannot accumulate.
  const bool real_flow = max_abs_imag(phi) <= 1e-14 * std::max(1.0, max_abs(phi));
  double tau = options.tau;
  double shift = stabilizing_shift(phi, params, potential);
  auto sym = smoothing_symbol(*grid, tau, shift);

  SpinorField best = phi;
  double best_residual = INFINITY;
  double last_energy = INFINITY;
  double last_update = INFINITY;
  int rising = 0;
  int it = 0;
  bool converged = false;

  for (;; ++it) {
    Evaluation ev = evaluate(phi, params, potential);
    if (!std::isfinite(ev.residual))
      throw ConvergenceError("gradient flow diverged; retry with a smaller step size");
    if (ev.residual < best_residual) {
      best_residual = ev.residual;
      best = phi;
    }
    if (last_update / tau <= options.tol && ev.residual <= options.tol) {
      converged = true;
      break;
    }
    if (it >= options.max_iter)
      break;

    if (ev.energy > last_energy + 1e-13 * std::max(1.0, std::abs(last_energy))) {
      if (++rising >= 5) {
        tau *= 0.5;
        rising = 0;
        sym = smoothing_symbol(*grid, tau, shift);
      }
    } else {
      rising = 0;
    }
    last_energy = ev.energy;

    if (it > 0 && it % options.shift_refresh == 0) {
      shift = stabilizing_shift(phi, params, potential);
      sym = smoothing_symbol(*grid, tau, shift);
    }

    for (int j = 0; j < 3; ++j)
      grid->apply_multiplier(ev.residual_field.component(j), sym);
    SpinorField next = phi;
    axpy(-tau, ev.residual_field, next);
    if (!all_finite(next))
      throw ConvergenceError("gradient flow produced non-finite values; retry with a smaller step size");
    if (real_flow)
      for (auto &v : next.data())
        v = cplx(v.real(), 0.0);
    next = project_constraints(next, params.magnetization);

    double update = 0.0;
    auto a = next.data();
    auto b = phi.data();
    for (std::size_t i = 0; i < a.size(); ++i)
      update = std::max(update, std::abs(a[i] - b[i]));
    last_update = update;
    phi = std::move(next);
  }

  GroundState gs = evaluate_ground_state(converged ? std::move(phi) : std::move(best), params, potential);
  gs.iterations = it;
  gs.converged = converged;
  return gs;
}

std::array<double, 3> sma_direction(double m)
{
  return {0.5 * (1.0 + m), std::sqrt(0.5 * (1.0 - m * m)), 0.5 * (1.0 - m)};
}

ScalarGroundState solve_sma(const ModelParams &params, const Potential &potential, const GroundStateOptions &options)
{
  if (!(params.beta_s < 0.0))
    throw ConstraintError("single-mode reduction requires beta_s < 0");
  if (params.beta_n + params.beta_s < 0.0)
    throw ConstraintError("single-mode reduction requires beta_n + beta_s >= 0");
  const auto &grid = potential.grid;
  const double beta = params.beta_n + params.beta_s;
  const auto &kin = grid->kinetic_symbol();

  auto normalize = [](ScalarField &f) { f *= cplx(1.0 / norm(f)); };
  auto apply_h = [&](const ScalarField &f) {
    ScalarField out = f;
    grid->apply_multiplier(out.values(), kin);
    for (std::size_t i = 0; i < f.size(); ++i)
      out[i] += (potential.values[i] + beta * std::norm(f[i])) * f[i];
    return out;
  };

  ScalarField phi = ScalarField::sample(grid, [&](const std::array<double, 3> &x) {
    return cplx(gaussian(x, params.gamma, grid->dim()));
  });
  normalize(phi);

  double tau = options.tau;
  double shift = 0.0;
  std::vector<double> sym;
  double last_update = INFINITY;
  ScalarGroundState out;
  int it = 0;
  for (;; ++it) {
    ScalarField h = apply_h(phi);
    const double mu = inner_product(h, phi).real();
    ScalarField r = h - cplx(mu) * phi;
    const double res = norm(r);
    if (!std::isfinite(res))
      throw ConvergenceError("single-mode gradient flow diverged");
    if ((last_update / tau <= options.tol && res <= options.tol) || it >= options.max_iter) {
      out.converged = res <= options.tol && last_update / tau <= options.tol;
      out.mu = mu;
      out.residual = res;
      break;
    }
    if (it % options.shift_refresh == 0) {
      double rmax = 0.0;
      for (std::size_t i = 0; i < phi.size(); ++i)
        rmax = std::max(rmax, std::norm(phi[i]));
      shift = potential.max_value() + beta * rmax;
      sym = smoothing_symbol(*grid, tau, shift);
    }
    grid->apply_multiplier(r.values(), sym);
    ScalarField next = phi - cplx(tau) * r;
    normalize(next);
    double update = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i)
      update = std::max(update, std::abs(next[i] - phi[i]));
    last_update = update;
    phi = std::move(next);
  }
  ScalarField kin_phi = phi;
  grid->apply_multiplier(kin_phi.values(), kin);
  double e = inner_product(kin_phi, phi).real();
  double local = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double r = std::norm(phi[i]);
    local += potential.values[i] * r + 0.5 * beta * r * r;
  }
  out.energy = e + local * grid->cell_volume();
  out.iterations = it;
  out.phi = std::move(phi);
  return out;
}

}  // namespace spinbdg
