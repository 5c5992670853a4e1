// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "spinbdg/ground_state.hpp"
#include "spinbdg/lrep_solver.hpp"

namespace spinbdg
{

/// Dipole (center-of-mass) mode of a harmonic trap along one axis.
struct AnalyticMode
{
  int axis = 0;
  double omega = 0.0;
  SpinorField u;
  SpinorField v;
};

/// Closed-form pairs omega = gamma_a with
/// u = (gamma^{-1/2} d_a phi - gamma^{1/2} x_a phi) / sqrt(2),
/// v = (gamma^{-1/2} d_a phi + gamma^{1/2} x_a phi) / sqrt(2),
/// one per grid axis. Requires a harmonic potential.
std::vector<AnalyticMode> analytic_modes(const GroundState &ground);

/// Relative frequencies closer than this form one degenerate cluster.
inline constexpr double kClusterTolerance = 1e-6;
/// Computed frequencies further than this (relative) from an analytic one do not match it.
inline constexpr double kMatchWindow = 0.2;

struct ModeError
{
  int axis = 0;
  double omega_exact = 0.0;
  double omega = 0.0;
  double e_omega = 0.0;
  /// Projection error of the matched cluster onto the analytic span; shared by
  /// every axis in a degenerate cluster.
  double e_uv = 0.0;
  int multiplicity = 1;
};

struct ErrorReport
{
  int dim = 1;
  int points = 0;
  double h = 0.0;
  Phase phase = Phase::ferromagnetic;
  std::vector<ModeError> modes;
};

/// Matches every analytic mode to the nearest computed frequencies.
///
/// Analytic modes are grouped into clusters of equal frequency (multiplicity
/// k); the k computed pairs nearest to the cluster frequency are matched to
/// it. e_uv = sqrt(sum_i |u_i - P u_i|^2 / sum_i |u_i|^2) + the same for v,
/// with P the l2 projector onto the analytic span. For k = 1 this is the
/// plain relative projection error; for k > 1 it is invariant under rotations
/// within the computed cluster. Throws StructureError when a cluster has fewer
/// than k computed candidates inside the match window.
ErrorReport eigen_error_report(const Spectrum &spectrum, const GroundState &ground);

/// One full pipeline run per grid size: ground state, operator, deflation,
/// spectrum, error report.
struct ConvergenceCase
{
  ModelParams params;
  int dim = 1;
  double half_width = 16.0;
  std::vector<int> points;
  GroundStateOptions ground;
  SpectrumOptions spectrum;
};

struct ConvergenceRow
{
  ErrorReport report;
  double ground_residual = 0.0;
  bool ground_converged = false;
  bool spectrum_converged = false;
  int outer_iterations = 0;
  double eig_seconds = 0.0;
};

/// Requires at least three sizes; rows are ordered as the input sizes.
std::vector<ConvergenceRow> convergence_study(const ConvergenceCase &study);

/// Perturbed component densities |phi_j + eps (u_j e^{-i w t} + conj(v_j) e^{i w t})|^2.
std::array<ScalarField, 3> perturbed_density(const GroundState &ground, const ModePair &mode, double eps, double t);

struct TimingRecord
{
  /// Real unknowns of the (u, v) system: 6 N^d.
  std::size_t dof = 0;
  int nev = 0;
  double seconds = 0.0;
  std::uint64_t applies = 0;
};

/// Eigensolve timings per grid size; ground-state solves are excluded.
std::vector<TimingRecord> timing_benchmark(const ConvergenceCase &study);

/// Mean wall time of one H+ or H- application per grid size. The ground
/// state is only loosely converged because the cost does not depend on it.
/// `seconds` holds the per-apply time and `applies` the repetitions timed.
std::vector<TimingRecord> apply_timing(const ModelParams &params, int dim, double half_width,
                                       const std::vector<int> &points, double min_seconds = 0.2);

/// Least-squares slope of log(seconds) against log(dof log dof).
double complexity_slope(const std::vector<TimingRecord> &records);

}  // namespace spinbdg
