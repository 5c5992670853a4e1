// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

namespace spinbdg
{

/// Small row-major real matrix for Rayleigh-Ritz blocks and dense checks.
class DenseMatrix
{
public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double *row(std::size_t r) { return data_.data() + r * cols_; }
  const double *row(std::size_t r) const { return data_.data() + r * cols_; }

  DenseMatrix transpose() const;
  double frobenius_norm() const;
  /// Largest |M(r,c) - M(c,r)|.
  double asymmetry() const;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix operator*(const DenseMatrix &a, const DenseMatrix &b);
std::vector<double> operator*(const DenseMatrix &a, const std::vector<double> &x);

struct SymmetricEigen
{
  /// Ascending.
  std::vector<double> values;
  /// Column k is the unit eigenvector of values[k].
  DenseMatrix vectors;
  int sweeps = 0;
};

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm is at most
/// 1e-14 times the matrix norm. Throws StructureError on asymmetric input.
SymmetricEigen jacobi_eigh(const DenseMatrix &m);

}  // namespace spinbdg
