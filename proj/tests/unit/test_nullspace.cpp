// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <gtest/gtest.h>

#include "spinbdg/nullspace.hpp"

using namespace spinbdg;

namespace
{

GroundState ground(double beta_n, double beta_s, int n = 64)
{
  auto g = SpectralGrid::create(1, 16.0, n);
  ModelParams p;
  p.beta_n = beta_n;
  p.beta_s = beta_s;
  GroundStateOptions o;
  o.tol = 1e-11;
  return solve_ground_state(p, Potential::make_harmonic(g, p.gamma), o);
}

struct Expected
{
  double beta_n, beta_s;
  std::size_t minus, plus;
};

}  // namespace

class NullspacePhases : public ::testing::TestWithParam<Expected>
{
};

TEST_P(NullspacePhases, AnalyticVectorsAreNull)
{
  const auto e = GetParam();
  auto gs = ground(e.beta_n, e.beta_s);
  ASSERT_TRUE(gs.converged);
  BdGOperator op(gs);
  auto space = analytic_nullspace(gs);
  ASSERT_EQ(space.null_minus.size(), e.minus);
  ASSERT_EQ(space.null_plus.size(), e.plus);
  const double bound = 100.0 * gs.residual;
  for (const auto &b : space.null_minus) {
    EXPECT_NEAR(norm(b), 1.0, 1e-12);
    EXPECT_LE(norm(op.apply_h_minus(b)), bound);
  }
  for (const auto &b : space.null_plus)
    EXPECT_LE(norm(op.apply_h_plus(b)), bound);
  for (std::size_t i = 0; i < space.null_minus.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      EXPECT_LT(std::abs(inner_product(space.null_minus[i], space.null_minus[j])), 1e-12);
}

TEST_P(NullspacePhases, GeneralizedVectorsCloseTheChains)
{
  const auto e = GetParam();
  auto gs = ground(e.beta_n, e.beta_s);
  BdGOperator op(gs);
  const double tol = 1e-12;
  auto space = generalized_nullvectors(op, refine_nullspace(op, analytic_nullspace(gs)), tol);
  ASSERT_EQ(space.gen_vectors.size(), e.minus - e.plus);
  for (std::size_t i = 0; i < space.gen_vectors.size(); ++i) {
    SpinorField r = op.apply_h_plus(space.gen_vectors[i]);
    r -= space.gen_sources[i];
    EXPECT_LE(norm(r), 10.0 * tol * norm(space.gen_sources[i]));
    for (const auto &b : space.null_plus)
      EXPECT_LT(std::abs(dot(space.gen_vectors[i], b)), 1e-10);
  }
}

TEST_P(NullspacePhases, OperatorsAreSemidefinite)
{
  const auto e = GetParam();
  auto gs = ground(e.beta_n, e.beta_s, 32);
  BdGOperator op(gs);
  auto probe = probe_definiteness(op, 50);
  EXPECT_GT(probe.min_plus, -1e-8);
  EXPECT_GT(probe.min_minus, -1e-8);
}

INSTANTIATE_TEST_SUITE_P(Phases, NullspacePhases,
                         ::testing::Values(Expected{60.0, -2.0, 2, 1}, Expected{60.0, 3.0, 3, 0},
                                           Expected{10.0, 0.0, 3, 2}));

TEST(Nullspace, OrthonormalizeDropsDependentVectors)
{
  auto g = SpectralGrid::create(1, 4.0, 16);
  SpinorField a = random_real_field(g, 1), b = random_real_field(g, 2);
  SpinorField c = a + b;
  auto basis = orthonormalize({a, b, c});
  ASSERT_EQ(basis.size(), 2u);
  EXPECT_NEAR(norm(basis[0]), 1.0, 1e-14);
  EXPECT_LT(std::abs(inner_product(basis[0], basis[1])), 1e-14);
  SpinorField rest = project_out(c, basis);
  EXPECT_LT(norm(rest), 1e-12 * norm(c));
}

TEST(Nullspace, RandomFieldsAreDeterministic)
{
  auto g = SpectralGrid::create(2, 4.0, 8);
  EXPECT_EQ(dot(random_real_field(g, 9), random_real_field(g, 9)),
            dot(random_real_field(g, 9), random_real_field(g, 9)));
  EXPECT_NE(norm(random_real_field(g, 9) - random_real_field(g, 10)), 0.0);
}
