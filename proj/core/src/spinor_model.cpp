// SPDX-License-Identifier: Apache-2.0

#include "spinbdg/spinor_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spinbdg/error.hpp"

namespace spinbdg
{

namespace
{

constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

}  // namespace

const std::array<Mat3c, 3> &spin_matrices()
{
  static const std::array<Mat3c, 3> s = [] {
    const cplx r(kInvSqrt2, 0.0);
    const cplx i(0.0, kInvSqrt2);
    const cplx z(0.0);
    std::array<Mat3c, 3> m{};
    m[0] = {{{z, r, z}, {r, z, r}, {z, r, z}}};
    m[1] = {{{z, -i, z}, {i, z, -i}, {z, i, z}}};
    m[2] = {{{cplx(1.0), z, z}, {z, z, z}, {z, z, cplx(-1.0)}}};
    return m;
  }();
  return s;
}

std::string to_string(Phase p)
{
  switch (p) {
  case Phase::ferromagnetic:
    return "ferromagnetic";
  case Phase::antiferromagnetic:
    return "antiferromagnetic";
  case Phase::spin_independent:
    return "spin_independent";
  }
  return "unknown";
}

Phase ModelParams::phase() const
{
  if (beta_s < 0.0)
    return Phase::ferromagnetic;
  if (beta_s > 0.0)
    return Phase::antiferromagnetic;
  return Phase::spin_independent;
}

void ModelParams::validate(int dim) const
{
  for (int a = 0; a < dim; ++a)
    if (!(gamma[a] > 0.0))
      throw ConstraintError("trap frequency gamma[" + std::to_string(a) + "] must be positive");
  if (!(magnetization > -1.0 && magnetization < 1.0))
    throw ConstraintError("magnetization must lie in (-1, 1)");
  if (!std::isfinite(beta_n) || !std::isfinite(beta_s))
    throw ConstraintError("interaction strengths must be finite");
}

Potential Potential::make_harmonic(GridPtr grid, const std::array<double, 3> &gamma)
{
  Potential p;
  p.grid = grid;
  p.harmonic = true;
  p.gamma = gamma;
  p.values.resize(grid->size());
  for (std::size_t i = 0; i < grid->size(); ++i) {
    auto x = grid->coordinates(i);
    double v = 0.0;
    for (int a = 0; a < grid->dim(); ++a)
      v += gamma[a] * gamma[a] * x[a] * x[a];
    p.values[i] = 0.5 * v;
  }
  return p;
}

Potential Potential::tabulated(GridPtr grid, std::vector<double> values)
{
  if (values.size() != grid->size())
    throw GridError("tabulated potential size does not match grid");
  Potential p;
  p.grid = std::move(grid);
  p.values = std::move(values);
  return p;
}

double Potential::max_value() const { return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end()); }

ScalarField density(const SpinorField &psi)
{
  ScalarField rho(psi.grid());
  for (int j = 0; j < 3; ++j) {
    auto c = psi.component(j);
    for (std::size_t i = 0; i < c.size(); ++i)
      rho[i] += std::norm(c[i]);
  }
  return rho;
}

SpinVector spin_vector(const SpinorField &psi)
{
  SpinVector s{ScalarField(psi.grid()), ScalarField(psi.grid()), ScalarField(psi.grid())};
  auto p1 = psi.component(0);
  auto p0 = psi.component(1);
  auto pm = psi.component(2);
  for (std::size_t i = 0; i < p1.size(); ++i) {
    cplx a = std::conj(p1[i]) * p0[i];
    cplx b = std::conj(p0[i]) * pm[i];
    s.x[i] = std::numbers::sqrt2 * (a + b).real();
    s.y[i] = std::numbers::sqrt2 * (a + b).imag();
    s.z[i] = std::norm(p1[i]) - std::norm(pm[i]);
  }
  return s;
}

double mass(const SpinorField &psi) { return dot(psi, psi); }

double magnetization(const SpinorField &psi)
{
  double sum = 0.0;
  for (const auto &v : psi.component(0))
    sum += std::norm(v);
  for (const auto &v : psi.component(2))
    sum -= std::norm(v);
  return sum * psi.grid()->cell_volume();
}

double kinetic_energy(const SpinorField &psi)
{
  const auto &grid = psi.grid();
  const auto &k2 = grid->wavenumber_squared();
  const double n = static_cast<double>(grid->size());
  // Parseval with the 1/N^d forward normalization: integral = (2L)^d sum |c_k|^2.
  const double volume = std::pow(2.0 * grid->half_width(), grid->dim());
  std::vector<cplx> c(grid->size());
  double sum = 0.0;
  for (int j = 0; j < 3; ++j) {
    auto comp = psi.component(j);
    std::copy(comp.begin(), comp.end(), c.begin());
    grid->fft_forward(c);
    for (std::size_t i = 0; i < c.size(); ++i)
      sum += k2[i] * std::norm(c[i]);
  }
  return 0.5 * sum * volume / (n * n);
}

double energy(const SpinorField &psi, const ModelParams &params, const Potential &potential)
{
  require_same_grid(psi.grid(), potential.grid, "energy");
  auto rho = density(psi);
  auto s = spin_vector(psi);
  double local = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double r = rho[i].real();
    const double s2 = std::norm(s.x[i]) + std::norm(s.y[i]) + std::norm(s.z[i]);
    local += potential.values[i] * r + 0.5 * params.beta_n * r * r + 0.5 * params.beta_s * s2;
  }
  return kinetic_energy(psi) + local * psi.grid()->cell_volume();
}

SpinorField apply_gpe_hamiltonian(const SpinorField &psi, const ModelParams &params, const Potential &potential)
{
  require_same_grid(psi.grid(), potential.grid, "apply_gpe_hamiltonian");
  SpinorField out = apply_kinetic(psi);
  auto p1 = psi.component(0);
  auto p0 = psi.component(1);
  auto pm = psi.component(2);
  auto o1 = out.component(0);
  auto o0 = out.component(1);
  auto om = out.component(2);
  const double bn = params.beta_n;
  const double bs = params.beta_s;
  for (std::size_t i = 0; i < p1.size(); ++i) {
    const double rho = std::norm(p1[i]) + std::norm(p0[i]) + std::norm(pm[i]);
    const double diag = potential.values[i] + bn * rho;
    cplx a = std::conj(p1[i]) * p0[i];
    cplx b = std::conj(p0[i]) * pm[i];
    const cplx sp = std::numbers::sqrt2 * (a + b);  // s_x + i s_y
    const double sz = std::norm(p1[i]) - std::norm(pm[i]);
    const cplx up = kInvSqrt2 * sp;                  // (s_x + i s_y)/sqrt2
    const cplx dn = kInvSqrt2 * std::conj(sp);       // (s_x - i s_y)/sqrt2
    o1[i] += diag * p1[i] + bs * (sz * p1[i] + dn * p0[i]);
    o0[i] += diag * p0[i] + bs * (up * p1[i] + dn * pm[i]);
    om[i] += diag * pm[i] + bs * (up * p0[i] - sz * pm[i]);
  }
  return out;
}

bool ChemicalPotentials::all_defined() const
{
  return std::none_of(status.begin(), status.end(), [](PotentialStatus s) { return s == PotentialStatus::undefined; });
}

ChemicalPotentials chemical_potentials_from(const SpinorField &phi, const SpinorField &h_phi)
{
  ChemicalPotentials cp;
  const double w = phi.grid()->cell_volume();
  for (int j = 0; j < 3; ++j) {
    auto p = phi.component(j);
    auto hp = h_phi.component(j);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      num += (hp[i] * std::conj(p[i])).real();
      den += std::norm(p[i]);
    }
    num *= w;
    den *= w;
    if (den < kVanishingNorm) {
      cp.status[j] = PotentialStatus::undefined;
    } else {
      cp.mu[j] = num / den;
    }
  }
  using S = PotentialStatus;
  const int missing = static_cast<int>(std::count(cp.status.begin(), cp.status.end(), S::undefined));
  if (missing == 1) {
    if (cp.status[1] == S::undefined) {
      cp.mu[1] = 0.5 * (cp.mu[0] + cp.mu[2]);
      cp.status[1] = S::derived;
    } else if (cp.status[0] == S::undefined) {
      cp.mu[0] = 2.0 * cp.mu[1] - cp.mu[2];
      cp.status[0] = S::derived;
    } else {
      cp.mu[2] = 2.0 * cp.mu[1] - cp.mu[0];
      cp.status[2] = S::derived;
    }
  }
  return cp;
}

ChemicalPotentials chemical_potentials(const SpinorField &phi, const ModelParams &params,
                                       const Potential &potential)
{
  return chemical_potentials_from(phi, apply_gpe_hamiltonian(phi, params, potential));
}

}  // namespace spinbdg
