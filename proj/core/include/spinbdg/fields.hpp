// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "spinbdg/spectral_grid.hpp"

namespace spinbdg
{

/// Complex samples of one function at the grid nodes.
class ScalarField
{
public:
  ScalarField() = default;
  explicit ScalarField(GridPtr grid);
  ScalarField(GridPtr grid, std::vector<cplx> values);

  /// Samples f(x) at every node; x carries zeros in unused axes.
  static ScalarField sample(GridPtr grid, const std::function<cplx(const std::array<double, 3> &)> &f);

  const GridPtr &grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<cplx> values() { return values_; }
  std::span<const cplx> values() const { return values_; }
  cplx &operator[](std::size_t i) { return values_[i]; }
  const cplx &operator[](std::size_t i) const { return values_[i]; }

  ScalarField &operator+=(const ScalarField &o);
  ScalarField &operator-=(const ScalarField &o);
  ScalarField &operator*=(cplx a);

private:
  GridPtr grid_;
  std::vector<cplx> values_;
};

ScalarField operator+(ScalarField a, const ScalarField &b);
ScalarField operator-(ScalarField a, const ScalarField &b);
ScalarField operator*(cplx a, ScalarField b);

/// Spectral coefficients F_k = (1/N^d) sum_n F(x_n) conj(W_k(x_n)) in FFTW order.
std::vector<cplx> forward_transform(const ScalarField &f);
/// Inverse of forward_transform: samples sum_k c_k W_k(x_n).
ScalarField inverse_transform(const GridPtr &grid, std::span<const cplx> coefficients);

/// Spectral Laplacian, Nyquist mode kept with symbol -mu_{N/2}^2.
ScalarField apply_laplacian(const ScalarField &f);
/// Spectral first derivative along axis, Nyquist coefficient zeroed.
ScalarField apply_partial(const ScalarField &f, int axis);

/// Discrete quadrature <f, g>_N = h^d sum_n f(x_n) conj(g(x_n)).
cplx inner_product(const ScalarField &f, const ScalarField &g);
double norm(const ScalarField &f);

/// Three-component field (psi_{+1}, psi_0, psi_{-1}) on a shared grid.
///
/// Components are stored back to back; component index 0, 1, 2 maps to the
/// magnetic quantum numbers +1, 0, -1.
class SpinorField
{
public:
  static constexpr int kComponents = 3;

  SpinorField() = default;
  explicit SpinorField(GridPtr grid);
  SpinorField(const ScalarField &plus, const ScalarField &zero, const ScalarField &minus);

  const GridPtr &grid() const { return grid_; }
  /// Nodes per component.
  std::size_t nodes() const { return grid_ ? grid_->size() : 0; }

  std::span<cplx> data() { return data_; }
  std::span<const cplx> data() const { return data_; }
  std::span<cplx> component(int j) { return std::span<cplx>(data_).subspan(j * nodes(), nodes()); }
  std::span<const cplx> component(int j) const
  {
    return std::span<const cplx>(data_).subspan(j * nodes(), nodes());
  }
  ScalarField component_field(int j) const;
  void set_component(int j, const ScalarField &f);

  SpinorField &operator+=(const SpinorField &o);
  SpinorField &operator-=(const SpinorField &o);
  SpinorField &operator*=(cplx a);

  void set_zero();

private:
  GridPtr grid_;
  std::vector<cplx> data_;
};

SpinorField operator+(SpinorField a, const SpinorField &b);
SpinorField operator-(SpinorField a, const SpinorField &b);
SpinorField operator*(cplx a, SpinorField b);
SpinorField conj(const SpinorField &a);

/// <f, g> = sum_j <f_j, g_j>_N.
cplx inner_product(const SpinorField &f, const SpinorField &g);
/// Real part of <f, g>; the pairing used throughout the real BdG reduction.
double dot(const SpinorField &f, const SpinorField &g);
double norm(const SpinorField &f);
double max_abs(const SpinorField &f);
double max_abs_imag(const SpinorField &f);
/// y <- y + a x
void axpy(cplx a, const SpinorField &x, SpinorField &y);

/// Applies -1/2 Laplacian to every component.
SpinorField apply_kinetic(const SpinorField &f);

void require_same_grid(const GridPtr &a, const GridPtr &b, const char *what);

}  // namespace spinbdg
