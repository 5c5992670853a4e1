// SPDX-License-Identifier: Apache-2.0

#include "spinbdg/bdg_operator.hpp"

#include <cmath>
#include <numbers>

#include "spinbdg/error.hpp"

namespace spinbdg
{

namespace
{

constexpr int kSlot[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};

void add_outer(Mat3 &m, const std::array<double, 3> &x, double scale)
{
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      m[r][c] += scale * x[r] * x[c];
}

}  // namespace

double SymmetricField::entry(std::size_t node, int r, int c) const { return at(node)[kSlot[r][c]]; }

Mat3 SymmetricField::matrix(std::size_t node) const
{
  Mat3 m{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      m[r][c] = entry(node, r, c);
  return m;
}

void SymmetricField::set(std::size_t node, const Mat3 &m)
{
  double *e = at(node);
  e[0] = m[0][0];
  e[1] = m[0][1];
  e[2] = m[0][2];
  e[3] = m[1][1];
  e[4] = m[1][2];
  e[5] = m[2][2];
}

std::pair<Mat3, Mat3> interaction_blocks(const std::array<double, 3> &phi, const ModelParams &params)
{
  const double p = phi[0], q = phi[1], r = phi[2];
  const double is2 = 1.0 / std::numbers::sqrt2;
  const double rho = p * p + q * q + r * r;
  // S_x phi, S_z phi, and w with S_y phi = i w.
  const std::array<double, 3> sx{is2 * q, is2 * (p + r), is2 * q};
  const std::array<double, 3> sz{p, 0.0, -r};
  const std::array<double, 3> w{-is2 * q, is2 * (p - r), is2 * q};
  // Spin density of a real spinor has no y component.
  const double spin_x = std::numbers::sqrt2 * q * (p + r);
  const double spin_z = p * p - r * r;

  Mat3 a{};
  Mat3 b{};
  const double bn = params.beta_n;
  const double bs = params.beta_s;
  for (int i = 0; i < 3; ++i)
    a[i][i] += bn * rho;
  add_outer(a, phi, bn);
  add_outer(b, phi, bn);

  a[0][0] += bs * spin_z;
  a[2][2] -= bs * spin_z;
  a[0][1] += bs * is2 * spin_x;
  a[1][0] += bs * is2 * spin_x;
  a[1][2] += bs * is2 * spin_x;
  a[2][1] += bs * is2 * spin_x;

  add_outer(a, sx, bs);
  add_outer(a, w, bs);
  add_outer(a, sz, bs);
  add_outer(b, sx, bs);
  add_outer(b, w, -bs);
  add_outer(b, sz, bs);
  return {a, b};
}

BdGOperator::BdGOperator(const GroundState &ground) : ground_(ground)
{
  const auto &phi = ground_.phi;
  if (!phi.grid())
    throw GridError("BdG operator needs a ground state on a grid");
  if (max_abs_imag(phi) > 1e-12)
    throw StructureError("BdG real reduction requires a real ground state");
  if (!ground_.mu.all_defined())
    throw StructureError("BdG operator needs all three chemical potentials");
  require_same_grid(phi.grid(), ground_.potential.grid, "BdGOperator");

  const std::size_t n = phi.nodes();
  coeff_a_ = SymmetricField(n);
  coeff_b_ = SymmetricField(n);
  coeff_plus_ = SymmetricField(n);
  coeff_minus_ = SymmetricField(n);
  auto p1 = phi.component(0);
  auto p0 = phi.component(1);
  auto pm = phi.component(2);
  for (std::size_t i = 0; i < n; ++i) {
    auto [a, b] = interaction_blocks({p1[i].real(), p0[i].real(), pm[i].real()}, ground_.params);
    for (int j = 0; j < 3; ++j)
      a[j][j] += ground_.potential.values[i] - ground_.mu.mu[j];
    Mat3 plus{}, minus{};
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) {
        plus[r][c] = a[r][c] + b[r][c];
        minus[r][c] = a[r][c] - b[r][c];
      }
    coeff_a_.set(i, a);
    coeff_b_.set(i, b);
    coeff_plus_.set(i, plus);
    coeff_minus_.set(i, minus);
  }
}

const SymmetricField &BdGOperator::coefficient(Block block) const
{
  switch (block) {
  case Block::plus:
    return coeff_plus_;
  case Block::minus:
    return coeff_minus_;
  case Block::a:
    return coeff_a_;
  case Block::b:
    return coeff_b_;
  }
  return coeff_a_;
}

void BdGOperator::apply(Block block, const SpinorField &in, SpinorField &out) const
{
  require_same_grid(grid(), in.grid(), "BdGOperator::apply");
  applies_.fetch_add(1, std::memory_order_relaxed);
  const auto &grid = *this->grid();
  const std::size_t n = grid.size();
  if (!out.grid() || !out.grid()->same_as(grid))
    out = SpinorField(this->grid());

  const bool kinetic = block != Block::b;
  if (kinetic) {
    std::copy(in.data().begin(), in.data().end(), out.data().begin());
    for (int j = 0; j < 3; ++j)
      grid.apply_even_multiplier(out.component(j), grid.kinetic_symbol());
  } else {
    out.set_zero();
  }

  const SymmetricField &c = coefficient(block);
  auto x1 = in.component(0), x0 = in.component(1), xm = in.component(2);
  auto y1 = out.component(0), y0 = out.component(1), ym = out.component(2);
  for (std::size_t i = 0; i < n; ++i) {
    const double *e = c.at(i);
    const cplx a = x1[i], b = x0[i], d = xm[i];
    y1[i] += e[0] * a + e[1] * b + e[2] * d;
    y0[i] += e[1] * a + e[3] * b + e[4] * d;
    ym[i] += e[2] * a + e[4] * b + e[5] * d;
  }
}

SpinorField BdGOperator::apply(Block block, const SpinorField &in) const
{
  SpinorField out(grid());
  apply(block, in, out);
  return out;
}

OperatorHandle BdGOperator::handle(Block block) const
{
  const SymmetricField &c = coefficient(block);
  double sum = 0.0;
  for (std::size_t i = 0; i < c.nodes(); ++i)
    sum += c.entry(i, 0, 0) + c.entry(i, 1, 1) + c.entry(i, 2, 2);
  OperatorHandle h;
  h.mean_diagonal = sum / (3.0 * static_cast<double>(c.nodes()));
  h.has_kinetic = block != Block::b;
  h.apply = [this, block](const SpinorField &in, SpinorField &out) { apply(block, in, out); };
  return h;
}

std::pair<SpinorField, SpinorField> fg_from_uv(const SpinorField &u, const SpinorField &v)
{
  require_same_grid(u.grid(), v.grid(), "fg_from_uv");
  SpinorField f = u + v;
  SpinorField g = u - v;
  f *= 0.5;
  g *= 0.5;
  return {std::move(f), std::move(g)};
}

std::pair<SpinorField, SpinorField> uv_from_fg(const SpinorField &f, const SpinorField &g)
{
  require_same_grid(f.grid(), g.grid(), "uv_from_fg");
  return {f + g, f - g};
}

double bdg_norm(const SpinorField &u, const SpinorField &v) { return dot(u, u) - dot(v, v); }

ModePair normalize_mode(ModePair pair)
{
  const double s = bdg_norm(pair.u, pair.v);
  if (!(s > kIndefiniteNorm))
    throw StructureError("indefinite-norm mode: integral of |u|^2 - |v|^2 is " + std::to_string(s));
  const double scale = 1.0 / std::sqrt(s);
  pair.u *= scale;
  pair.v *= scale;
  pair.residual_plus *= scale;
  pair.residual_minus *= scale;
  return pair;
}

std::pair<double, double> mode_residual(const BdGOperator &op, const ModePair &pair)
{
  auto [f, g] = fg_from_uv(pair.u, pair.v);
  SpinorField rp = op.apply_h_plus(f);
  axpy(-pair.omega, g, rp);
  SpinorField rm = op.apply_h_minus(g);
  axpy(-pair.omega, f, rm);
  return {norm(rp), norm(rm)};
}

std::pair<double, double> full_bdg_residual(const BdGOperator &op, double omega, const SpinorField &u,
                                            const SpinorField &v)
{
  SpinorField top = op.apply(Block::a, u);
  top += op.apply(Block::b, v);
  axpy(-omega, u, top);
  SpinorField bottom = op.apply(Block::b, u);
  bottom += op.apply(Block::a, v);
  bottom *= -1.0;
  axpy(-omega, v, bottom);
  return {norm(top), norm(bottom)};
}

}  // namespace spinbdg
