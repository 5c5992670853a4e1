// SPDX-License-Identifier: Apache-2.0

#include "spinbdg/fields.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spinbdg/error.hpp"

namespace spinbdg
{

void require_same_grid(const GridPtr &a, const GridPtr &b, const char *what)
{
  if (!a || !b)
    throw GridError(std::string(what) + ": field has no grid");
  if (!a->same_as(*b))
    throw GridError(std::string(what) + ": fields live on different grids");
}

// ScalarField

ScalarField::ScalarField(GridPtr grid) : grid_(std::move(grid))
{
  if (!grid_)
    throw GridError("scalar field requires a grid");
  values_.assign(grid_->size(), cplx(0.0));
}

ScalarField::ScalarField(GridPtr grid, std::vector<cplx> values) : grid_(std::move(grid)), values_(std::move(values))
{
  if (!grid_)
    throw GridError("scalar field requires a grid");
  if (values_.size() != grid_->size())
    throw GridError("scalar field has " + std::to_string(values_.size()) + " values, grid has " +
                    std::to_string(grid_->size()) + " nodes");
}

ScalarField ScalarField::sample(GridPtr grid, const std::function<cplx(const std::array<double, 3> &)> &f)
{
  ScalarField out(grid);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = f(grid->coordinates(i));
  return out;
}

ScalarField &ScalarField::operator+=(const ScalarField &o)
{
  require_same_grid(grid_, o.grid_, "ScalarField +=");
  for (std::size_t i = 0; i < values_.size(); ++i)
    values_[i] += o.values_[i];
  return *this;
}

ScalarField &ScalarField::operator-=(const ScalarField &o)
{
  require_same_grid(grid_, o.grid_, "ScalarField -=");
  for (std::size_t i = 0; i < values_.size(); ++i)
    values_[i] -= o.values_[i];
  return *this;
}

ScalarField &ScalarField::operator*=(cplx a)
{
  if (a.imag() == 0.0) {
    const double ar = a.real();
    for (auto &v : values_)
      v *= ar;
  } else {
    for (auto &v : values_)
      v = cplx(v.real() * a.real() - v.imag() * a.imag(), v.real() * a.imag() + v.imag() * a.real());
  }
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField &b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField &b) { return a -= b; }
ScalarField operator*(cplx a, ScalarField b) { return b *= a; }

std::vector<cplx> forward_transform(const ScalarField &f)
{
  if (!f.grid())
    throw GridError("forward_transform: field has no grid");
  std::vector<cplx> c(f.values().begin(), f.values().end());
  f.grid()->fft_forward(c);
  const double scale = 1.0 / static_cast<double>(c.size());
  for (auto &v : c)
    v *= scale;
  return c;
}

ScalarField inverse_transform(const GridPtr &grid, std::span<const cplx> coefficients)
{
  if (coefficients.size() != grid->size())
    throw GridError("inverse_transform: coefficient count does not match grid");
  std::vector<cplx> v(coefficients.begin(), coefficients.end());
  grid->fft_backward(v);
  return ScalarField(grid, std::move(v));
}

ScalarField apply_laplacian(const ScalarField &f)
{
  ScalarField out = f;
  f.grid()->apply_multiplier(out.values(), f.grid()->laplacian_symbol());
  return out;
}

ScalarField apply_partial(const ScalarField &f, int axis)
{
  const auto &grid = f.grid();
  const auto &mu = grid->derivative_symbol(axis);
  std::vector<cplx> symbol(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i)
    symbol[i] = cplx(0.0, mu[i]);
  ScalarField out = f;
  grid->apply_multiplier(out.values(), std::span<const cplx>(symbol));
  return out;
}

namespace
{

// sum a_i conj(b_i), written out so it vectorizes without the checked complex multiply.
cplx conj_sum(std::span<const cplx> a, std::span<const cplx> b)
{
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    im += a[i].imag() * b[i].real() - a[i].real() * b[i].imag();
  }
  return {re, im};
}

}  // namespace

cplx inner_product(const ScalarField &f, const ScalarField &g)
{
  require_same_grid(f.grid(), g.grid(), "inner_product");
  return conj_sum(f.values(), g.values()) * f.grid()->cell_volume();
}

double norm(const ScalarField &f) { return std::sqrt(std::max(0.0, inner_product(f, f).real())); }

// SpinorField

SpinorField::SpinorField(GridPtr grid) : grid_(std::move(grid))
{
  if (!grid_)
    throw GridError("spinor field requires a grid");
  data_.assign(kComponents * grid_->size(), cplx(0.0));
}

SpinorField::SpinorField(const ScalarField &plus, const ScalarField &zero, const ScalarField &minus)
    : SpinorField(plus.grid())
{
  set_component(0, plus);
  set_component(1, zero);
  set_component(2, minus);
}

ScalarField SpinorField::component_field(int j) const
{
  auto c = component(j);
  return ScalarField(grid_, std::vector<cplx>(c.begin(), c.end()));
}

void SpinorField::set_component(int j, const ScalarField &f)
{
  require_same_grid(grid_, f.grid(), "SpinorField::set_component");
  std::copy(f.values().begin(), f.values().end(), component(j).begin());
}

SpinorField &SpinorField::operator+=(const SpinorField &o)
{
  require_same_grid(grid_, o.grid_, "SpinorField +=");
  for (std::size_t i = 0; i < data_.size(); ++i)
    data_[i] += o.data_[i];
  return *this;
}

SpinorField &SpinorField::operator-=(const SpinorField &o)
{
  require_same_grid(grid_, o.grid_, "SpinorField -=");
  for (std::size_t i = 0; i < data_.size(); ++i)
    data_[i] -= o.data_[i];
  return *this;
}

SpinorField &SpinorField::operator*=(cplx a)
{
  if (a.imag() == 0.0) {
    const double ar = a.real();
    for (auto &v : data_)
      v *= ar;
  } else {
    for (auto &v : data_)
      v = cplx(v.real() * a.real() - v.imag() * a.imag(), v.real() * a.imag() + v.imag() * a.real());
  }
  return *this;
}

void SpinorField::set_zero() { std::fill(data_.begin(), data_.end(), cplx(0.0)); }

SpinorField operator+(SpinorField a, const SpinorField &b) { return a += b; }
SpinorField operator-(SpinorField a, const SpinorField &b) { return a -= b; }
SpinorField operator*(cplx a, SpinorField b) { return b *= a; }

SpinorField conj(const SpinorField &a)
{
  SpinorField out = a;
  for (auto &v : out.data())
    v = std::conj(v);
  return out;
}

cplx inner_product(const SpinorField &f, const SpinorField &g)
{
  require_same_grid(f.grid(), g.grid(), "inner_product");
  return conj_sum(f.data(), g.data()) * f.grid()->cell_volume();
}

double dot(const SpinorField &f, const SpinorField &g)
{
  require_same_grid(f.grid(), g.grid(), "dot");
  auto a = f.data();
  auto b = g.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    sum += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
  return sum * f.grid()->cell_volume();
}

double norm(const SpinorField &f) { return std::sqrt(std::max(0.0, dot(f, f))); }

double max_abs(const SpinorField &f)
{
  double m = 0.0;
  for (const auto &v : f.data())
    m = std::max(m, std::abs(v));
  return m;
}

double max_abs_imag(const SpinorField &f)
{
  double m = 0.0;
  for (const auto &v : f.data())
    m = std::max(m, std::abs(v.imag()));
  return m;
}

void axpy(cplx a, const SpinorField &x, SpinorField &y)
{
  require_same_grid(x.grid(), y.grid(), "axpy");
  auto xs = x.data();
  auto ys = y.data();
  if (a.imag() == 0.0) {
    const double ar = a.real();
    for (std::size_t i = 0; i < xs.size(); ++i)
      ys[i] += ar * xs[i];
  } else {
    for (std::size_t i = 0; i < xs.size(); ++i)
      ys[i] += cplx(a.real() * xs[i].real() - a.imag() * xs[i].imag(),
                    a.real() * xs[i].imag() + a.imag() * xs[i].real());
  }
}

SpinorField apply_kinetic(const SpinorField &f)
{
  SpinorField out = f;
  for (int j = 0; j < SpinorField::kComponents; ++j)
    f.grid()->apply_even_multiplier(out.component(j), f.grid()->kinetic_symbol());
  return out;
}

}  // namespace spinbdg
