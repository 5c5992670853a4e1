// SPDX-License-Identifier: Apache-2.0

#include "spinbdg/dense.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spinbdg/error.hpp"

namespace spinbdg
{

DenseMatrix DenseMatrix::identity(std::size_t n)
{
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::transpose() const
{
  DenseMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c)
      t(c, r) = (*this)(r, c);
  return t;
}

double DenseMatrix::frobenius_norm() const
{
  double s = 0.0;
  for (double v : data_)
    s += v * v;
  return std::sqrt(s);
}

double DenseMatrix::asymmetry() const
{
  if (rows_ != cols_)
    return INFINITY;
  double worst = 0.0;
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = r + 1; c < cols_; ++c)
      worst = std::max(worst, std::abs((*this)(r, c) - (*this)(c, r)));
  return worst;
}

DenseMatrix operator*(const DenseMatrix &a, const DenseMatrix &b)
{
  if (a.cols() != b.rows())
    throw StructureError("dense product shape mismatch");
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double *ci = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0)
        continue;
      const double *bk = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j)
        ci[j] += aik * bk[j];
    }
  }
  return c;
}

std::vector<double> operator*(const DenseMatrix &a, const std::vector<double> &x)
{
  if (a.cols() != x.size())
    throw StructureError("dense matrix-vector shape mismatch");
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double *ai = a.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j)
      s += ai[j] * x[j];
    y[i] = s;
  }
  return y;
}

SymmetricEigen jacobi_eigh(const DenseMatrix &m)
{
  const std::size_t n = m.rows();
  if (m.cols() != n)
    throw StructureError("jacobi_eigh needs a square matrix");
  const double scale = m.frobenius_norm();
  if (m.asymmetry() > 1e-12 * std::max(scale, 1e-300))
    throw StructureError("jacobi_eigh input is not symmetric");

  DenseMatrix a = m;
  DenseMatrix v = DenseMatrix::identity(n);
  SymmetricEigen out;
  const double target = 1e-14 * scale;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q)
        off += 2.0 * a(p, q) * a(p, q);
    if (std::sqrt(off) <= target)
      break;
    out.sweeps = sweep + 1;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0)
          continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150)
          t = 0.5 / theta;
        else
          t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        double *rp = a.row(p);
        double *rq = a.row(q);
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = rp[k];
          const double aqk = rq[k];
          rp[k] = c * apk - s * aqk;
          rq[k] = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
  out.values.resize(n);
  out.vectors = DenseMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t r = 0; r < n; ++r)
      out.vectors(r, k) = v(r, order[k]);
  }
  return out;
}

}  // namespace spinbdg
