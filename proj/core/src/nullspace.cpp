// SPDX-License-Identifier: Apache-2.0

#include "spinbdg/nullspace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "spinbdg/error.hpp"
#include "spinbdg/lrep_solver.hpp"

namespace spinbdg
{

namespace
{

SpinorField spinor_times_profile(const std::array<double, 3> &dir, const SpinorField &like, std::span<const cplx> profile)
{
  SpinorField out(like.grid());
  for (int j = 0; j < 3; ++j) {
    auto c = out.component(j);
    for (std::size_t i = 0; i < c.size(); ++i)
      c[i] = dir[j] * profile[i];
  }
  return out;
}

SpinorField normalized(SpinorField f)
{
  const double n = norm(f);
  if (n == 0.0)
    throw StructureError("cannot normalize a zero null vector");
  f *= 1.0 / n;
  return f;
}

std::array<double, 3> component_norms(const SpinorField &phi)
{
  std::array<double, 3> n{};
  const double w = phi.grid()->cell_volume();
  for (int j = 0; j < 3; ++j) {
    for (const auto &v : phi.component(j))
      n[j] += std::norm(v);
    n[j] *= w;
  }
  return n;
}

DeflationSpace ferromagnetic_space(const GroundState &g)
{
  const double m = g.params.magnetization;
  const auto a = sma_direction(m);
  const double t = std::sqrt(0.5 * (1.0 - m * m));
  const std::array<double, 3> b{t, -m, -t};
  // |a| = 1, so the least-squares profile of Phi_g along a is a . Phi_g.
  std::vector<cplx> profile(g.phi.nodes());
  for (int j = 0; j < 3; ++j) {
    auto c = g.phi.component(j);
    for (std::size_t i = 0; i < c.size(); ++i)
      profile[i] += a[j] * c[i];
  }
  DeflationSpace s;
  SpinorField first = normalized(spinor_times_profile(a, g.phi, profile));
  SpinorField second = normalized(spinor_times_profile(b, g.phi, profile));
  s.null_minus = {first, second};
  s.null_plus = {second};
  return s;
}

DeflationSpace antiferromagnetic_space(const GroundState &g)
{
  const double m = g.params.magnetization;
  if (std::abs(m) > 0.999)
    throw ConstraintError("antiferromagnetic null vectors are ill-conditioned for |M| > 0.999");
  const double b1 = -std::sqrt((1.0 - m) / (1.0 + m));
  const double bm = std::sqrt((1.0 + m) / (1.0 - m));
  SpinorField second(g.grid());
  {
    auto p1 = g.phi.component(0);
    auto pm = g.phi.component(2);
    auto s1 = second.component(0);
    auto sm = second.component(2);
    for (std::size_t i = 0; i < p1.size(); ++i) {
      s1[i] = b1 * p1[i];
      sm[i] = bm * pm[i];
    }
  }
  DeflationSpace s;
  std::vector<SpinorField> basis{g.phi, second};
  if (std::abs(m) <= 1e-12) {
    // Spin rotation about x preserves zero magnetization and the energy.
    SpinorField rot(g.grid());
    auto p1 = g.phi.component(0);
    auto p0 = g.phi.component(1);
    auto pm = g.phi.component(2);
    const double is2 = 1.0 / std::numbers::sqrt2;
    for (std::size_t i = 0; i < p1.size(); ++i) {
      rot.component(0)[i] = is2 * p0[i];
      rot.component(1)[i] = is2 * (p1[i] + pm[i]);
      rot.component(2)[i] = is2 * p0[i];
    }
    basis.push_back(rot);
    s.notes.push_back("zero magnetization: spin-rotation null vector S_x Phi_g added to null(H-)");
  }
  s.null_minus = orthonormalize(std::move(basis));
  return s;
}

DeflationSpace spin_independent_space(const GroundState &g)
{
  const auto n = component_norms(g.phi);
  int ref = static_cast<int>(std::max_element(n.begin(), n.end()) - n.begin());
  // Phi_g = zeta phi with a constant unit spinor zeta; signs from overlaps with the dominant component.
  std::array<double, 3> zeta{};
  const double w = g.phi.grid()->cell_volume();
  for (int j = 0; j < 3; ++j) {
    double overlap = 0.0;
    auto cj = g.phi.component(j);
    auto cr = g.phi.component(ref);
    for (std::size_t i = 0; i < cj.size(); ++i)
      overlap += (cj[i] * std::conj(cr[i])).real();
    overlap *= w;
    zeta[j] = std::copysign(std::sqrt(n[j]), overlap);
  }
  const double zn = std::sqrt(zeta[0] * zeta[0] + zeta[1] * zeta[1] + zeta[2] * zeta[2]);
  for (auto &z : zeta)
    z /= zn;
  std::vector<cplx> profile(g.phi.nodes());
  for (int j = 0; j < 3; ++j) {
    auto c = g.phi.component(j);
    for (std::size_t i = 0; i < c.size(); ++i)
      profile[i] += zeta[j] * c[i];
  }

  // Complete zeta to an orthonormal frame of R^3.
  std::vector<std::array<double, 3>> frame{zeta};
  for (int e = 0; e < 3 && frame.size() < 3; ++e) {
    std::array<double, 3> v{};
    v[e] = 1.0;
    for (const auto &f : frame) {
      const double d = f[0] * v[0] + f[1] * v[1] + f[2] * v[2];
      for (int k = 0; k < 3; ++k)
        v[k] -= d * f[k];
    }
    const double vn = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (vn > 1e-6) {
      for (auto &x : v)
        x /= vn;
      frame.push_back(v);
    }
  }

  DeflationSpace s;
  for (const auto &f : frame)
    s.null_minus.push_back(normalized(spinor_times_profile(f, g.phi, profile)));
  if (g.params.beta_n == 0.0)
    s.null_plus = s.null_minus;
  else
    s.null_plus.assign(s.null_minus.begin() + 1, s.null_minus.end());
  return s;
}

}  // namespace

std::vector<SpinorField> generalized_sources(const DeflationSpace &space)
{
  std::vector<SpinorField> sources;
  for (const auto &b : space.null_minus) {
    SpinorField src = project_out(b, space.null_plus);
    if (norm(src) > 1e-6)
      sources.push_back(std::move(src));
  }
  sources = orthonormalize(std::move(sources), 1e-6);
  // Keep dim null(H-) = #sources + dim null(H+).
  if (sources.size() + space.null_plus.size() > space.null_minus.size())
    sources.resize(space.null_minus.size() - space.null_plus.size());
  return sources;
}

SpinorField random_real_field(const GridPtr &grid, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  SpinorField f(grid);
  for (auto &v : f.data())
    v = dist(rng);
  return f;
}

void project_out_inplace(SpinorField &x, const std::vector<SpinorField> &basis)
{
  for (const auto &b : basis)
    axpy(-inner_product(x, b), b, x);
}

SpinorField project_out(const SpinorField &x, const std::vector<SpinorField> &basis)
{
  SpinorField out = x;
  project_out_inplace(out, basis);
  return out;
}

std::vector<SpinorField> orthonormalize(std::vector<SpinorField> vectors, double drop_tol)
{
  std::vector<SpinorField> out;
  for (auto &v : vectors) {
    const double n0 = norm(v);
    if (n0 == 0.0)
      continue;
    for (int pass = 0; pass < 2; ++pass)
      project_out_inplace(v, out);
    const double n1 = norm(v);
    if (n1 <= drop_tol * n0)
      continue;
    v *= 1.0 / n1;
    out.push_back(std::move(v));
  }
  return out;
}

DeflationSpace analytic_nullspace(const GroundState &ground)
{
  DeflationSpace s;
  switch (ground.params.phase()) {
  case Phase::ferromagnetic:
    s = ferromagnetic_space(ground);
    break;
  case Phase::antiferromagnetic:
    s = antiferromagnetic_space(ground);
    break;
  case Phase::spin_independent:
    s = spin_independent_space(ground);
    break;
  }
  s.phase = ground.params.phase();
  s.null_tolerance = std::max(1e-8, 100.0 * ground.residual);
  s.gen_sources = generalized_sources(s);
  return s;
}

DeflationSpace refine_nullspace(const BdGOperator &op, DeflationSpace space, int passes, int max_iter)
{
  auto refine = [&](std::vector<SpinorField> &basis, Block block) {
    const auto h = op.handle(block);
    SpinorField hb(op.grid());
    for (int pass = 0; pass < passes; ++pass) {
      for (auto &b : basis) {
        h.apply(b, hb);
        auto corr = deflated_pcg(h, hb, basis, 0.0, 1e-6, max_iter);
        b -= corr.x;
      }
      basis = orthonormalize(std::move(basis));
    }
  };
  refine(space.null_minus, Block::minus);
  refine(space.null_plus, Block::plus);
  space.gen_sources = generalized_sources(space);
  space.gen_vectors.clear();
  space.refined = true;
  return space;
}

DeflationSpace generalized_nullvectors(const BdGOperator &op, DeflationSpace space, double tol, int max_iter)
{
  space.gen_vectors.clear();
  const auto plus = op.handle(Block::plus);
  for (const auto &src : space.gen_sources) {
    auto result = deflated_pcg(plus, src, space.null_plus, 0.0, tol, max_iter);
    space.gen_vectors.push_back(std::move(result.x));
  }
  return space;
}

DefinitenessProbe probe_definiteness(const BdGOperator &op, int samples, std::uint64_t seed)
{
  DefinitenessProbe p;
  p.samples = samples;
  p.min_plus = INFINITY;
  p.min_minus = INFINITY;
  SpinorField hx(op.grid());
  // White noise only samples the kinetic term; damp high modes so the
  // samples see the pointwise coefficients.
  std::vector<double> smooth(op.grid()->wavenumber_squared());
  for (auto &v : smooth)
    v = 1.0 / ((1.0 + v) * (1.0 + v));
  for (int k = 0; k < samples; ++k) {
    SpinorField x = random_real_field(op.grid(), seed + static_cast<std::uint64_t>(k));
    for (int j = 0; j < 3; ++j)
      op.grid()->apply_multiplier(x.component(j), smooth);
    x *= 1.0 / norm(x);
    op.apply(Block::plus, x, hx);
    p.min_plus = std::min(p.min_plus, dot(hx, x));
    op.apply(Block::minus, x, hx);
    p.min_minus = std::min(p.min_minus, dot(hx, x));
  }
  return p;
}

}  // namespace spinbdg
