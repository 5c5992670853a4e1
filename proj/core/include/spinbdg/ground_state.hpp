// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>

#include "spinbdg/spinor_model.hpp"

namespace spinbdg
{

struct GroundState
{
  SpinorField phi;
  ChemicalPotentials mu;
  ModelParams params;
  Potential potential;
  /// ||H phi - Lambda phi|| under the grid quadrature.
  double residual = 0.0;
  double energy = 0.0;
  int iterations = 0;
  bool converged = false;

  const GridPtr &grid() const { return phi.grid(); }
};

struct ConstraintScaling
{
  double plus = 1.0;
  double zero = 1.0;
  double minus = 1.0;
};

/// Positive factors (a_1, a_0, a_-1) with a_0 = sqrt(a_1 a_-1) that give unit
/// mass and magnetization m when applied componentwise.
ConstraintScaling constraint_scaling(const SpinorField &phi, double m);
SpinorField project_constraints(const SpinorField &phi, double m);

/// Semi-implicit step phi - tau (1 + tau (T + shift))^{-1} (H - mu - lambda S_z) phi,
/// followed by project_constraints. The multipliers (mu, lambda) are the
/// least-squares fit at the input state.
SpinorField gradient_flow_step(const SpinorField &phi, double tau, double shift, const ModelParams &params,
                               const Potential &potential);

/// max V + beta_n max rho, the stabilizing shift of the implicit part.
double stabilizing_shift(const SpinorField &phi, const ModelParams &params, const Potential &potential);

/// Constrained Gaussian used to start every ground-state solve.
SpinorField default_initial_state(const GridPtr &grid, const ModelParams &params);

/// ||(H - Lambda) phi|| with Lambda from chemical_potentials.
double euler_lagrange_residual(const SpinorField &phi, const ModelParams &params, const Potential &potential);

struct GroundStateOptions
{
  double tol = 1e-10;
  int max_iter = 200000;
  double tau = 0.01;
  int shift_refresh = 50;
};

/// Projected gradient flow from the default initializer. Iteration stops when
/// the max-norm update over tau and the fitted-multiplier residual are both
/// below tol; the reported residual uses the component Rayleigh quotients and
/// is never larger. On hitting max_iter
/// the iterate with the smallest residual is returned with converged = false.
GroundState solve_ground_state(const ModelParams &params, const Potential &potential,
                               const GroundStateOptions &options = {});
GroundState solve_ground_state(const ModelParams &params, const Potential &potential, const SpinorField &initial,
                               const GroundStateOptions &options = {});

/// Rebuilds the derived quantities (mu, residual, energy) of a stored state.
GroundState evaluate_ground_state(SpinorField phi, const ModelParams &params, const Potential &potential);

struct ScalarGroundState
{
  ScalarField phi;
  double mu = 0.0;
  double energy = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Positive normalized minimizer of the scalar energy with interaction
/// beta_n + beta_s. Only defined in the ferromagnetic regime.
ScalarGroundState solve_sma(const ModelParams &params, const Potential &potential,
                            const GroundStateOptions &options = {});

/// Single-mode spinor direction ((1+M)/2, sqrt((1-M^2)/2), (1-M)/2).
std::array<double, 3> sma_direction(double m);

}  // namespace spinbdg
