// SPDX-License-Identifier: Apache-2.0

#include "spinbdg/study.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "spinbdg/error.hpp"
#include "spinbdg/nullspace.hpp"

namespace spinbdg
{

namespace
{

double seconds_since(std::chrono::steady_clock::time_point t0)
{
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::size_t unknowns(const GridPtr &grid) { return 6 * grid->size(); }

/// sum_i |x_i - P x_i|^2 and sum_i |x_i|^2 for an orthonormal span.
std::pair<double, double> projection_defect(const std::vector<const SpinorField *> &xs,
                                            const std::vector<SpinorField> &span)
{
  double off = 0.0;
  double total = 0.0;
  for (const auto *x : xs) {
    SpinorField r = project_out(*x, span);
    off += std::pow(norm(r), 2);
    total += std::pow(norm(*x), 2);
  }
  return {off, total};
}

}  // namespace

std::vector<AnalyticMode> analytic_modes(const GroundState &ground)
{
  const auto &pot = ground.potential;
  if (!pot.harmonic)
    throw ConstraintError("analytic modes need a harmonic potential");
  const auto &grid = ground.grid();
  std::vector<AnalyticMode> modes;
  for (int axis = 0; axis < grid->dim(); ++axis) {
    const double g = pot.gamma[axis];
    const double a = 1.0 / std::sqrt(g);
    const double b = std::sqrt(g);
    AnalyticMode m;
    m.axis = axis;
    m.omega = g;
    m.u = SpinorField(grid);
    m.v = SpinorField(grid);
    for (int j = 0; j < 3; ++j) {
      const ScalarField phi = ground.phi.component_field(j);
      const ScalarField d = apply_partial(phi, axis);
      auto u = m.u.component(j);
      auto v = m.v.component(j);
      for (std::size_t i = 0; i < grid->size(); ++i) {
        const double x = grid->coordinates(i)[axis];
        u[i] = (a * d[i] - b * x * phi[i]) / std::sqrt(2.0);
        v[i] = (a * d[i] + b * x * phi[i]) / std::sqrt(2.0);
      }
    }
    modes.push_back(std::move(m));
  }
  return modes;
}

ErrorReport eigen_error_report(const Spectrum &spectrum, const GroundState &ground)
{
  const auto &grid = ground.grid();
  ErrorReport report;
  report.dim = grid->dim();
  report.points = grid->points();
  report.h = grid->spacing();
  report.phase = ground.params.phase();

  auto analytic = analytic_modes(ground);
  std::sort(analytic.begin(), analytic.end(),
            [](const AnalyticMode &a, const AnalyticMode &b) { return a.omega < b.omega; });

  for (std::size_t first = 0; first < analytic.size();) {
    const double w = analytic[first].omega;
    std::size_t last = first + 1;
    while (last < analytic.size() && std::abs(analytic[last].omega - w) <= kClusterTolerance * w)
      ++last;
    const std::size_t k = last - first;

    std::vector<std::size_t> order(spectrum.pairs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return std::abs(spectrum.pairs[a].omega - w) < std::abs(spectrum.pairs[b].omega - w);
    });
    if (order.size() < k || std::abs(spectrum.pairs[order[k - 1]].omega - w) > kMatchWindow * w)
      throw StructureError("missing mode: fewer than " + std::to_string(k) + " computed frequencies within " +
                           std::to_string(static_cast<int>(kMatchWindow * 100)) + "% of " + std::to_string(w));
    order.resize(k);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return spectrum.pairs[a].omega < spectrum.pairs[b].omega; });

    std::vector<SpinorField> span_u, span_v;
    for (std::size_t a = first; a < last; ++a) {
      span_u.push_back(analytic[a].u);
      span_v.push_back(analytic[a].v);
    }
    span_u = orthonormalize(std::move(span_u), 1e-12);
    span_v = orthonormalize(std::move(span_v), 1e-12);
    std::vector<const SpinorField *> us, vs;
    for (auto idx : order) {
      us.push_back(&spectrum.pairs[idx].u);
      vs.push_back(&spectrum.pairs[idx].v);
    }
    const auto [du, nu] = projection_defect(us, span_u);
    const auto [dv, nv] = projection_defect(vs, span_v);
    const double e_uv = std::sqrt(du / nu) + std::sqrt(dv / nv);

    for (std::size_t a = first; a < last; ++a) {
      ModeError e;
      e.axis = analytic[a].axis;
      e.omega_exact = analytic[a].omega;
      e.omega = spectrum.pairs[order[a - first]].omega;
      e.e_omega = std::abs(e.omega - e.omega_exact) / e.omega_exact;
      e.e_uv = e_uv;
      e.multiplicity = static_cast<int>(k);
      report.modes.push_back(e);
    }
    first = last;
  }
  return report;
}

std::vector<ConvergenceRow> convergence_study(const ConvergenceCase &study)
{
  if (study.points.size() < 3)
    throw ConstraintError("convergence study needs at least three grid sizes");
  std::vector<ConvergenceRow> rows;
  for (int n : study.points) {
    auto grid = SpectralGrid::create(study.dim, study.half_width, n);
    auto pot = Potential::make_harmonic(grid, study.params.gamma);
    GroundState gs = solve_ground_state(study.params, pot, study.ground);
    BdGOperator op(gs);
    Spectrum spec = solve_spectrum(op, analytic_nullspace(gs), study.spectrum);
    ConvergenceRow row;
    row.report = eigen_error_report(spec, gs);
    row.ground_residual = gs.residual;
    row.ground_converged = gs.converged;
    row.spectrum_converged = spec.converged;
    row.outer_iterations = spec.iterations;
    row.eig_seconds = spec.wall_seconds;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::array<ScalarField, 3> perturbed_density(const GroundState &ground, const ModePair &mode, double eps, double t)
{
  const auto &grid = ground.grid();
  require_same_grid(grid, mode.u.grid(), "perturbed_density");
  const cplx forward = std::polar(1.0, -mode.omega * t);
  const cplx backward = std::polar(1.0, mode.omega * t);
  std::array<ScalarField, 3> out;
  for (int j = 0; j < 3; ++j) {
    const auto phi = ground.phi.component(j);
    const auto u = mode.u.component(j);
    const auto v = mode.v.component(j);
    out[j] = ScalarField(grid);
    for (std::size_t i = 0; i < grid->size(); ++i) {
      const cplx psi = phi[i] + eps * (u[i] * forward + std::conj(v[i]) * backward);
      out[j][i] = std::norm(psi);
    }
  }
  return out;
}

std::vector<TimingRecord> timing_benchmark(const ConvergenceCase &study)
{
  std::vector<TimingRecord> records;
  for (int n : study.points) {
    auto grid = SpectralGrid::create(study.dim, study.half_width, n);
    auto pot = Potential::make_harmonic(grid, study.params.gamma);
    GroundState gs = solve_ground_state(study.params, pot, study.ground);
    BdGOperator op(gs);
    auto space = analytic_nullspace(gs);
    const auto t0 = std::chrono::steady_clock::now();
    Spectrum spec = solve_spectrum(op, std::move(space), study.spectrum);
    TimingRecord r;
    r.dof = unknowns(grid);
    r.nev = study.spectrum.nev;
    r.seconds = seconds_since(t0);
    r.applies = spec.apply_count;
    records.push_back(r);
  }
  return records;
}

std::vector<TimingRecord> apply_timing(const ModelParams &params, int dim, double half_width,
                                       const std::vector<int> &points, double min_seconds)
{
  std::vector<TimingRecord> records;
  for (int n : points) {
    auto grid = SpectralGrid::create(dim, half_width, n);
    auto pot = Potential::make_harmonic(grid, params.gamma);
    GroundStateOptions loose;
    loose.tol = 1e-4;
    loose.max_iter = 200;
    GroundState gs = solve_ground_state(params, pot, loose);
    BdGOperator op(gs);
    SpinorField x = random_real_field(grid, 1);
    SpinorField y(grid);
    op.apply(Block::plus, x, y);  // warm-up, plans and caches
    std::uint64_t reps = 0;
    const auto t0 = std::chrono::steady_clock::now();
    double elapsed = 0.0;
    while (reps < 10 || elapsed < min_seconds) {
      op.apply(Block::plus, x, y);
      op.apply(Block::minus, x, y);
      reps += 2;
      elapsed = seconds_since(t0);
    }
    TimingRecord r;
    r.dof = unknowns(grid);
    r.nev = 0;
    r.seconds = elapsed / static_cast<double>(reps);
    r.applies = reps;
    records.push_back(r);
  }
  return records;
}

double complexity_slope(const std::vector<TimingRecord> &records)
{
  if (records.size() < 2)
    throw ConstraintError("slope fit needs at least two timings");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(records.size());
  for (const auto &r : records) {
    const double d = static_cast<double>(r.dof);
    const double x = std::log(d * std::log(d));
    const double y = std::log(r.seconds);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace spinbdg
