// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace spinbdg
{

using cplx = std::complex<double>;

class SpectralGrid;
using GridPtr = std::shared_ptr<const SpectralGrid>;

/// Periodic tensor-product grid on [-L, L]^d with N nodes per axis.
///
/// Nodes are x_n = -L + n h with h = 2L/N. Storage is row-major with the last
/// axis contiguous, and spectral coefficients use the FFTW index order: flat
/// index j along an axis holds mode k = j for j < N/2 and k = j - N otherwise,
/// so the unpaired Nyquist mode k = -N/2 sits at j = N/2.
///
/// The grid owns its FFTW plans. It is immutable after construction and the
/// transform methods may be called concurrently on distinct buffers.
class SpectralGrid
{
public:
  static GridPtr create(int dim, double half_width, int points);

  ~SpectralGrid();
  SpectralGrid(const SpectralGrid &) = delete;
  SpectralGrid &operator=(const SpectralGrid &) = delete;

  int dim() const { return dim_; }
  double half_width() const { return half_width_; }
  int points() const { return points_; }
  double spacing() const { return spacing_; }
  /// Total node count N^d.
  std::size_t size() const { return size_; }
  /// Quadrature weight h^d of the rectangle rule.
  double cell_volume() const { return cell_volume_; }

  double node(int n) const { return -half_width_ + n * spacing_; }
  /// Signed mode number k for a per-axis FFT index.
  int mode_number(int index) const { return index < points_ / 2 ? index : index - points_; }
  /// Wavenumber mu_k = pi k / L for a per-axis FFT index.
  double wavenumber(int index) const;
  /// Per-axis FFT index that stores mode k, for -N/2 <= k < N/2.
  int mode_index(int k) const;

  std::array<int, 3> unravel(std::size_t flat) const;
  std::size_t ravel(const std::array<int, 3> &idx) const;
  /// Physical coordinates of a flat node index (unused axes are zero).
  std::array<double, 3> coordinates(std::size_t flat) const;

  /// |mu|^2 summed over axes, one entry per flat spectral index.
  const std::vector<double> &wavenumber_squared() const { return k2_; }
  /// |mu|^2 / 2, the symbol of -Laplacian / 2.
  const std::vector<double> &kinetic_symbol() const { return kinetic_; }
  /// -|mu|^2, the symbol of the Laplacian.
  const std::vector<double> &laplacian_symbol() const { return laplacian_; }
  /// mu along one axis per flat spectral index, Nyquist entry zeroed.
  const std::vector<double> &derivative_symbol(int axis) const;

  /// In-place unnormalized DFT, sum_n f_n exp(-2 pi i n k / N).
  void fft_forward(std::span<cplx> data) const;
  /// In-place unnormalized inverse DFT, sum_k c_k exp(+2 pi i n k / N).
  void fft_backward(std::span<cplx> data) const;

  /// data <- IDFT(symbol .* DFT(data)) with the 1/N^d normalization folded in.
  void apply_multiplier(std::span<cplx> data, std::span<const double> symbol) const;
  void apply_multiplier(std::span<cplx> data, std::span<const cplx> symbol) const;
  /// Same as the real-symbol apply_multiplier for an even symbol, s(k) = s(-k).
  /// Real data then stays real and goes through half-size real transforms.
  void apply_even_multiplier(std::span<cplx> data, std::span<const double> symbol) const;

  bool same_as(const SpectralGrid &other) const;

private:
  SpectralGrid(int dim, double half_width, int points);

  int dim_;
  double half_width_;
  int points_;
  double spacing_;
  std::size_t size_;
  double cell_volume_;
  std::vector<double> k2_;
  std::vector<double> kinetic_;
  std::vector<double> laplacian_;
  std::array<std::vector<double>, 3> dsym_;
  void *plan_forward_ = nullptr;
  void *plan_backward_ = nullptr;
  void *plan_r2c_ = nullptr;
  void *plan_c2r_ = nullptr;
  std::size_t half_size_ = 0;
};

}  // namespace spinbdg
