// SPDX-License-Identifier: Apache-2.0

#include "spinbdg/spectral_grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "spinbdg/error.hpp"

namespace spinbdg
{

namespace
{

// The FFTW planner is not thread-safe; execution with the new-array API is.
std::mutex &planner_mutex()
{
  static std::mutex m;
  return m;
}

fftw_complex *as_fftw(cplx *p) { return reinterpret_cast<fftw_complex *>(p); }

}  // namespace

GridPtr SpectralGrid::create(int dim, double half_width, int points)
{
  if (dim < 1 || dim > 3)
    throw GridError("grid dimension must be 1, 2 or 3, got " + std::to_string(dim));
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw GridError("grid half-width must be positive");
  if (points < 4)
    throw GridError("grid needs at least 4 points per axis, got " + std::to_string(points));
  if (points % 2 != 0)
    throw GridError("N must be even, got " + std::to_string(points));
  return GridPtr(new SpectralGrid(dim, half_width, points));
}

SpectralGrid::SpectralGrid(int dim, double half_width, int points)
    : dim_(dim), half_width_(half_width), points_(points), spacing_(2.0 * half_width / points)
{
  size_ = 1;
  for (int a = 0; a < dim_; ++a)
    size_ *= static_cast<std::size_t>(points_);
  cell_volume_ = std::pow(spacing_, dim_);

  k2_.assign(size_, 0.0);
  for (int a = 0; a < dim_; ++a)
    dsym_[a].assign(size_, 0.0);
  for (std::size_t i = 0; i < size_; ++i) {
    auto idx = unravel(i);
    double sum = 0.0;
    for (int a = 0; a < dim_; ++a) {
      double mu = wavenumber(idx[a]);
      sum += mu * mu;
      dsym_[a][i] = idx[a] == points_ / 2 ? 0.0 : mu;
    }
    k2_[i] = sum;
  }
  kinetic_.resize(size_);
  laplacian_.resize(size_);
  for (std::size_t i = 0; i < size_; ++i) {
    kinetic_[i] = 0.5 * k2_[i];
    laplacian_[i] = -k2_[i];
  }

  int n[3] = {points_, points_, points_};
  std::vector<cplx> scratch(size_);
  std::lock_guard<std::mutex> lock(planner_mutex());
  unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  plan_forward_ = fftw_plan_dft(dim_, n, as_fftw(scratch.data()), as_fftw(scratch.data()), FFTW_FORWARD, flags);
  plan_backward_ =
      fftw_plan_dft(dim_, n, as_fftw(scratch.data()), as_fftw(scratch.data()), FFTW_BACKWARD, flags);
  half_size_ = size_ / static_cast<std::size_t>(points_) * static_cast<std::size_t>(points_ / 2 + 1);
  std::vector<double> real(size_);
  std::vector<cplx> half(half_size_);
  plan_r2c_ = fftw_plan_dft_r2c(dim_, n, real.data(), as_fftw(half.data()), flags);
  plan_c2r_ = fftw_plan_dft_c2r(dim_, n, as_fftw(half.data()), real.data(), flags);
  if (!plan_forward_ || !plan_backward_ || !plan_r2c_ || !plan_c2r_)
    throw GridError("FFTW plan creation failed");
}

SpectralGrid::~SpectralGrid()
{
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (plan_forward_)
    fftw_destroy_plan(static_cast<fftw_plan>(plan_forward_));
  if (plan_backward_)
    fftw_destroy_plan(static_cast<fftw_plan>(plan_backward_));
  if (plan_r2c_)
    fftw_destroy_plan(static_cast<fftw_plan>(plan_r2c_));
  if (plan_c2r_)
    fftw_destroy_plan(static_cast<fftw_plan>(plan_c2r_));
}

double SpectralGrid::wavenumber(int index) const
{
  return std::numbers::pi * mode_number(index) / half_width_;
}

int SpectralGrid::mode_index(int k) const
{
  if (k < -points_ / 2 || k >= points_ / 2)
    throw GridError("mode " + std::to_string(k) + " is not represented on this grid");
  return k >= 0 ? k : k + points_;
}

std::array<int, 3> SpectralGrid::unravel(std::size_t flat) const
{
  std::array<int, 3> idx{0, 0, 0};
  for (int a = dim_ - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % points_);
    flat /= points_;
  }
  return idx;
}

std::size_t SpectralGrid::ravel(const std::array<int, 3> &idx) const
{
  std::size_t flat = 0;
  for (int a = 0; a < dim_; ++a)
    flat = flat * points_ + static_cast<std::size_t>(idx[a]);
  return flat;
}

std::array<double, 3> SpectralGrid::coordinates(std::size_t flat) const
{
  auto idx = unravel(flat);
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a)
    x[a] = node(idx[a]);
  return x;
}

const std::vector<double> &SpectralGrid::derivative_symbol(int axis) const
{
  if (axis < 0 || axis >= dim_)
    throw GridError("axis " + std::to_string(axis) + " out of range for a " + std::to_string(dim_) + "D grid");
  return dsym_[axis];
}

void SpectralGrid::fft_forward(std::span<cplx> data) const
{
  if (data.size() != size_)
    throw GridError("transform buffer size does not match grid");
  fftw_execute_dft(static_cast<fftw_plan>(plan_forward_), as_fftw(data.data()), as_fftw(data.data()));
}

void SpectralGrid::fft_backward(std::span<cplx> data) const
{
  if (data.size() != size_)
    throw GridError("transform buffer size does not match grid");
  fftw_execute_dft(static_cast<fftw_plan>(plan_backward_), as_fftw(data.data()), as_fftw(data.data()));
}

void SpectralGrid::apply_multiplier(std::span<cplx> data, std::span<const double> symbol) const
{
  if (symbol.size() != size_)
    throw GridError("symbol size does not match grid");
  fft_forward(data);
  const double scale = 1.0 / static_cast<double>(size_);
  for (std::size_t i = 0; i < size_; ++i)
    data[i] *= symbol[i] * scale;
  fft_backward(data);
}

void SpectralGrid::apply_multiplier(std::span<cplx> data, std::span<const cplx> symbol) const
{
  if (symbol.size() != size_)
    throw GridError("symbol size does not match grid");
  fft_forward(data);
  const double scale = 1.0 / static_cast<double>(size_);
  for (std::size_t i = 0; i < size_; ++i)
    data[i] *= symbol[i] * scale;
  fft_backward(data);
}

void SpectralGrid::apply_even_multiplier(std::span<cplx> data, std::span<const double> symbol) const
{
  if (symbol.size() != size_)
    throw GridError("symbol size does not match grid");
  for (const auto &v : data)
    if (v.imag() != 0.0) {
      apply_multiplier(data, symbol);
      return;
    }
  thread_local std::vector<double> real;
  thread_local std::vector<cplx> half;
  real.resize(size_);
  half.resize(half_size_);
  for (std::size_t i = 0; i < size_; ++i)
    real[i] = data[i].real();
  fftw_execute_dft_r2c(static_cast<fftw_plan>(plan_r2c_), real.data(), as_fftw(half.data()));
  // The last axis keeps its first N/2 + 1 spectral indices.
  const std::size_t row = static_cast<std::size_t>(points_);
  const std::size_t kept = row / 2 + 1;
  const double scale = 1.0 / static_cast<double>(size_);
  for (std::size_t r = 0, rows = size_ / row; r < rows; ++r)
    for (std::size_t j = 0; j < kept; ++j)
      half[r * kept + j] *= symbol[r * row + j] * scale;
  fftw_execute_dft_c2r(static_cast<fftw_plan>(plan_c2r_), as_fftw(half.data()), real.data());
  for (std::size_t i = 0; i < size_; ++i)
    data[i] = cplx(real[i], 0.0);
}

bool SpectralGrid::same_as(const SpectralGrid &other) const
{
  return this == &other ||
         (dim_ == other.dim_ && points_ == other.points_ && half_width_ == other.half_width_);
}

}  // namespace spinbdg
