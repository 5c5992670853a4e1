// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "spinbdg/error.hpp"
#include "spinbdg/fields.hpp"
#include "spinbdg/spectral_grid.hpp"

using namespace spinbdg;

namespace
{

// O(N^2) reference transform with the same sign convention as fft_forward.
std::vector<cplx> naive_dft(const std::vector<cplx> &x)
{
  const std::size_t n = x.size();
  std::vector<cplx> out(n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < n; ++j)
      out[k] += x[j] * std::polar(1.0, -2.0 * std::numbers::pi * double(j * k % n) / double(n));
  return out;
}

ScalarField sample(const GridPtr &g, auto fn)
{
  ScalarField f(g);
  for (std::size_t i = 0; i < g->size(); ++i)
    f[i] = fn(g->coordinates(i));
  return f;
}

}  // namespace

TEST(SpectralGrid, RejectsBadShapes)
{
  EXPECT_THROW(SpectralGrid::create(4, 1.0, 8), GridError);
  EXPECT_THROW(SpectralGrid::create(1, 1.0, 33), GridError);
  EXPECT_THROW(SpectralGrid::create(1, -1.0, 8), GridError);
  EXPECT_THROW(SpectralGrid::create(2, 1.0, 2), GridError);
}

TEST(SpectralGrid, NodesAndWavenumbers)
{
  auto g = SpectralGrid::create(2, 4.0, 8);
  EXPECT_EQ(g->size(), 64u);
  EXPECT_DOUBLE_EQ(g->spacing(), 1.0);
  EXPECT_DOUBLE_EQ(g->node(0), -4.0);
  EXPECT_DOUBLE_EQ(g->cell_volume(), 1.0);
  EXPECT_EQ(g->mode_number(5), -3);
  EXPECT_EQ(g->mode_index(-4), 4);
  EXPECT_THROW(g->mode_index(4), GridError);
  EXPECT_NEAR(g->wavenumber(1), std::numbers::pi / 4.0, 1e-15);
  auto idx = g->unravel(13);
  EXPECT_EQ(idx[0], 1);
  EXPECT_EQ(idx[1], 5);
  EXPECT_EQ(g->ravel(idx), 13u);
}

TEST(SpectralGrid, ForwardMatchesNaiveDft)
{
  auto g = SpectralGrid::create(1, 3.0, 12);
  std::vector<cplx> x(12);
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] = cplx(std::sin(1.3 * i), std::cos(0.7 * i * i));
  auto ref = naive_dft(x);
  auto y = x;
  g->fft_forward(y);
  for (std::size_t i = 0; i < x.size(); ++i)
    EXPECT_LT(std::abs(y[i] - ref[i]), 1e-12);
  g->fft_backward(y);
  for (std::size_t i = 0; i < x.size(); ++i)
    EXPECT_LT(std::abs(y[i] / 12.0 - x[i]), 1e-14);
}

TEST(SpectralGrid, LaplacianOfTrigIsExact)
{
  const double l = 2.0;
  auto g = SpectralGrid::create(2, l, 16);
  const double k1 = std::numbers::pi / l, k2 = 3.0 * std::numbers::pi / l;
  auto f = sample(g, [&](auto x) { return cplx(std::sin(k1 * x[0]) * std::cos(k2 * x[1]), 0.0); });
  auto lap = apply_laplacian(f);
  for (std::size_t i = 0; i < g->size(); ++i)
    EXPECT_NEAR(lap[i].real(), -(k1 * k1 + k2 * k2) * f[i].real(), 1e-11);
}

TEST(SpectralGrid, DerivativeOfGaussianIsSpectrallyAccurate)
{
  auto g = SpectralGrid::create(1, 12.0, 128);
  auto f = sample(g, [](auto x) { return cplx(std::exp(-x[0] * x[0]), 0.0); });
  auto df = apply_partial(f, 0);
  double worst = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double x = g->coordinates(i)[0];
    worst = std::max(worst, std::abs(df[i] - cplx(-2.0 * x * std::exp(-x * x), 0.0)));
  }
  EXPECT_LT(worst, 1e-12);
  EXPECT_THROW(apply_partial(f, 1), GridError);
}

TEST(SpectralGrid, EvenMultiplierMatchesComplexPath)
{
  for (int d : {1, 2, 3}) {
    auto g = SpectralGrid::create(d, 5.0, 8);
    std::vector<cplx> a(g->size());
    for (std::size_t i = 0; i < a.size(); ++i)
      a[i] = cplx(std::sin(0.37 * i + 1.0), 0.0);
    std::vector<double> sym(g->size());
    for (std::size_t i = 0; i < sym.size(); ++i)
      sym[i] = 1.0 / (1.0 + g->wavenumber_squared()[i]);
    auto b = a;
    g->apply_multiplier(a, sym);
    g->apply_even_multiplier(b, sym);
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_NEAR(a[i].real(), b[i].real(), 1e-14);
      EXPECT_EQ(b[i].imag(), 0.0);
    }
  }
}

TEST(Fields, InnerProductUsesQuadrature)
{
  auto g = SpectralGrid::create(1, 2.0, 8);
  SpinorField a(g), b(g);
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    a.data()[i] = cplx(i, 1.0);
    b.data()[i] = cplx(1.0, -double(i));
  }
  cplx ref = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i)
    ref += a.data()[i] * std::conj(b.data()[i]);
  ref *= g->cell_volume();
  EXPECT_LT(std::abs(inner_product(a, b) - ref), 1e-12);
  EXPECT_NEAR(dot(a, b), ref.real(), 1e-12);
  EXPECT_NEAR(norm(a) * norm(a), inner_product(a, a).real(), 1e-10);

  SpinorField c = a;
  axpy(cplx(0.5, -2.0), b, c);
  for (std::size_t i = 0; i < c.data().size(); ++i)
    EXPECT_LT(std::abs(c.data()[i] - (a.data()[i] + cplx(0.5, -2.0) * b.data()[i])), 1e-13);
  c *= cplx(0.0, 1.0);
  EXPECT_LT(std::abs(c.data()[3] - cplx(0.0, 1.0) * (a.data()[3] + cplx(0.5, -2.0) * b.data()[3])), 1e-13);
}

TEST(Fields, MixingGridsThrows)
{
  auto g1 = SpectralGrid::create(1, 2.0, 8);
  auto g2 = SpectralGrid::create(1, 2.0, 16);
  SpinorField a(g1), b(g2);
  EXPECT_THROW(dot(a, b), GridError);
}
