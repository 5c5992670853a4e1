// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "spinbdg/error.hpp"
#include "spinbdg/ground_state.hpp"

using namespace spinbdg;

namespace
{

SpinorField positive_spinor(const GridPtr &g)
{
  SpinorField s(g);
  for (int j = 0; j < 3; ++j) {
    auto c = s.component(j);
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double x = g->coordinates(i)[0];
      c[i] = (1.0 + 0.5 * j) * std::exp(-0.3 * (x - 0.2 * j) * (x - 0.2 * j));
    }
  }
  return s;
}

GroundState solve_1d(double beta_n, double beta_s, int n = 64, double m = 0.0)
{
  auto g = SpectralGrid::create(1, 16.0, n);
  ModelParams p;
  p.beta_n = beta_n;
  p.beta_s = beta_s;
  p.magnetization = m;
  GroundStateOptions o;
  o.tol = 1e-11;
  return solve_ground_state(p, Potential::make_harmonic(g, p.gamma), o);
}

}  // namespace

TEST(GroundState, ConstraintScalingHitsMassAndMagnetization)
{
  auto g = SpectralGrid::create(1, 6.0, 32);
  auto s = positive_spinor(g);
  for (double m : {0.0, 0.4, -0.7}) {
    auto c = constraint_scaling(s, m);
    EXPECT_NEAR(c.zero, std::sqrt(c.plus * c.minus), 1e-14);
    auto p = project_constraints(s, m);
    EXPECT_NEAR(mass(p), 1.0, 1e-13);
    EXPECT_NEAR(magnetization(p), m, 1e-13);
  }
}

TEST(GroundState, ConstraintScalingRejectsImpossibleTargets)
{
  auto g = SpectralGrid::create(1, 6.0, 32);
  auto s = positive_spinor(g);
  for (auto &v : s.component(0))
    v = 0.0;
  // Without a +1 component a positive magnetization cannot be reached.
  EXPECT_THROW(constraint_scaling(s, 0.5), ConstraintError);
}

TEST(GroundState, DefaultInitialStateIsAdmissible)
{
  auto g = SpectralGrid::create(2, 8.0, 16);
  ModelParams p;
  p.beta_s = 1.0;
  p.magnetization = 0.2;
  auto s = default_initial_state(g, p);
  EXPECT_NEAR(mass(s), 1.0, 1e-12);
  EXPECT_NEAR(magnetization(s), 0.2, 1e-12);
}

TEST(GroundState, LinearOscillator)
{
  auto gs = solve_1d(0.0, 0.0);
  EXPECT_TRUE(gs.converged);
  EXPECT_LE(gs.residual, 1e-10);
  EXPECT_NEAR(gs.energy, 0.5, 1e-10);
  for (double m : gs.mu.mu)
    EXPECT_NEAR(m, 0.5, 1e-10);
  EXPECT_NEAR(mass(gs.phi), 1.0, 1e-12);
}

TEST(GroundState, FerromagneticFactorizesIntoSingleMode)
{
  auto gs = solve_1d(40.0, -2.0);
  ASSERT_TRUE(gs.converged);
  auto sma = solve_sma(gs.params, gs.potential);
  ASSERT_TRUE(sma.converged);
  const auto dir = sma_direction(0.0);
  double worst = 0.0;
  for (int j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < gs.grid()->size(); ++i)
      worst = std::max(worst, std::abs(gs.phi.component(j)[i] - dir[j] * sma.phi[i]));
  EXPECT_LT(worst, 1e-6);
  EXPECT_NEAR(gs.mu.relation_defect(), 0.0, 1e-8);
}

TEST(GroundState, AntiferromagneticZeroComponentVanishes)
{
  auto gs = solve_1d(40.0, 2.0);
  ASSERT_TRUE(gs.converged);
  auto zero = gs.phi.component_field(1);
  EXPECT_LT(norm(zero), 1e-6);
  EXPECT_NEAR(mass(gs.phi), 1.0, 1e-12);
  EXPECT_NEAR(magnetization(gs.phi), 0.0, 1e-12);
  EXPECT_NEAR(gs.mu.relation_defect(), 0.0, 1e-8);
}

TEST(GroundState, EvaluateReproducesStoredQuantities)
{
  auto gs = solve_1d(20.0, -1.0, 32);
  auto again = evaluate_ground_state(gs.phi, gs.params, gs.potential);
  for (int j = 0; j < 3; ++j)
    EXPECT_NEAR(again.mu.mu[j], gs.mu.mu[j], 1e-12);
  EXPECT_NEAR(again.energy, gs.energy, 1e-12);
}

TEST(GroundState, SingleModeRequiresFerromagnet)
{
  auto g = SpectralGrid::create(1, 8.0, 32);
  ModelParams p;
  p.beta_n = 10.0;
  p.beta_s = 1.0;
  EXPECT_THROW(solve_sma(p, Potential::make_harmonic(g, p.gamma)), ConstraintError);
}
