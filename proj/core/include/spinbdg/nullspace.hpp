// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spinbdg/bdg_operator.hpp"

namespace spinbdg
{

/// Known kernel directions of H- and H+ and the generalized vectors that
/// close the zero-frequency Jordan chains.
struct DeflationSpace
{
  Phase phase = Phase::ferromagnetic;
  /// Orthonormal basis of null(H-).
  std::vector<SpinorField> null_minus;
  /// Orthonormal basis of null(H+), a subspace of null(H-) in every phase.
  std::vector<SpinorField> null_plus;
  /// Right-hand sides of the generalized solves: the part of null(H-)
  /// orthogonal to null(H+).
  std::vector<SpinorField> gen_sources;
  /// H+ gen_vectors[j] = gen_sources[j], each orthogonal to null(H+).
  std::vector<SpinorField> gen_vectors;
  /// Allowed ||H b|| for the basis vectors; tied to the ground-state residual.
  double null_tolerance = 1e-8;
  bool refined = false;
  std::vector<std::string> notes;
};

/// Closed-form null vectors of the ground state's BdG operators.
///
/// Ferromagnetic: a phi_g and b phi_g with the single-mode profile phi_g.
/// Antiferromagnetic: Phi_g and (b_1 phi_1, 0, b_-1 phi_-1); at zero
/// magnetization also S_x Phi_g, which spin rotation about x leaves invariant.
/// Spin-independent (beta_s = 0): Phi_g and the two directions orthogonal to
/// its constant spinor; the latter are also null for H+.
DeflationSpace analytic_nullspace(const GroundState &ground);

/// Replaces each basis vector b by b - c with c solving H c = H b in the
/// complement of the basis, for H- on null_minus and H+ on null_plus, then
/// re-derives gen_sources. Removes the tilt inherited from the ground-state
/// residual, so the deflated complement matches the discrete operators.
DeflationSpace refine_nullspace(const BdGOperator &op, DeflationSpace space, int passes = 2, int max_iter = 5000);

/// Fills gen_vectors by deflated CG solves H+ x = source in null(H+)^perp.
DeflationSpace generalized_nullvectors(const BdGOperator &op, DeflationSpace space, double tol,
                                       int max_iter = 5000);

/// Orthonormal basis of the part of null_minus orthogonal to null_plus.
std::vector<SpinorField> generalized_sources(const DeflationSpace &space);

/// x - sum_i <x, b_i> b_i for an orthonormal basis.
SpinorField project_out(const SpinorField &x, const std::vector<SpinorField> &basis);
void project_out_inplace(SpinorField &x, const std::vector<SpinorField> &basis);

/// Modified Gram-Schmidt; vectors whose remaining norm drops below
/// drop_tol times their original norm are discarded.
std::vector<SpinorField> orthonormalize(std::vector<SpinorField> vectors, double drop_tol = 1e-8);

/// Deterministic random real field with independent uniform node values.
SpinorField random_real_field(const GridPtr &grid, std::uint64_t seed);

struct DefinitenessProbe
{
  /// Smallest <H x, x> / ||x||^2 over the samples.
  double min_plus = 0.0;
  double min_minus = 0.0;
  int samples = 0;
};

DefinitenessProbe probe_definiteness(const BdGOperator &op, int samples = 200, std::uint64_t seed = 7);

}  // namespace spinbdg
