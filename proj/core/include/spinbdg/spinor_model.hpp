// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "spinbdg/fields.hpp"

namespace spinbdg
{

using Mat3c = std::array<std::array<cplx, 3>, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

/// Spin-1 matrices (S_x, S_y, S_z) in the basis (m = +1, 0, -1).
const std::array<Mat3c, 3> &spin_matrices();

enum class Phase
{
  ferromagnetic,      ///< beta_s < 0
  antiferromagnetic,  ///< beta_s > 0
  spin_independent,   ///< beta_s == 0
};

std::string to_string(Phase p);

struct ModelParams
{
  double beta_n = 0.0;
  double beta_s = 0.0;
  std::array<double, 3> gamma{1.0, 1.0, 1.0};
  double magnetization = 0.0;

  Phase phase() const;
  /// Throws ConstraintError when gamma or magnetization are out of range.
  void validate(int dim) const;
};

/// Real external potential sampled at the grid nodes.
struct Potential
{
  GridPtr grid;
  std::vector<double> values;
  bool harmonic = false;
  std::array<double, 3> gamma{1.0, 1.0, 1.0};

  /// V(x) = (gamma_x^2 x^2 + gamma_y^2 y^2 + gamma_z^2 z^2) / 2 over the grid's axes.
  static Potential make_harmonic(GridPtr grid, const std::array<double, 3> &gamma);
  static Potential tabulated(GridPtr grid, std::vector<double> values);

  double max_value() const;
};

struct SpinVector
{
  ScalarField x, y, z;
};

ScalarField density(const SpinorField &psi);
SpinVector spin_vector(const SpinorField &psi);

double mass(const SpinorField &psi);
double magnetization(const SpinorField &psi);

/// Sum over components of (1/2) integral |grad psi_j|^2, evaluated in Fourier space.
double kinetic_energy(const SpinorField &psi);
double energy(const SpinorField &psi, const ModelParams &params, const Potential &potential);

/// Applies the mean-field Hamiltonian (-Lap/2 + V + beta_n rho) + beta_s S.s(psi).
SpinorField apply_gpe_hamiltonian(const SpinorField &psi, const ModelParams &params, const Potential &potential);

/// Squared component norm below which a component counts as vanishing.
inline constexpr double kVanishingNorm = 1e-12;

enum class PotentialStatus
{
  computed,  ///< Rayleigh quotient of the component
  derived,   ///< vanishing component, recovered from mu_1 + mu_-1 = 2 mu_0
  undefined,
};

struct ChemicalPotentials
{
  std::array<double, 3> mu{0.0, 0.0, 0.0};
  std::array<PotentialStatus, 3> status{PotentialStatus::computed, PotentialStatus::computed,
                                        PotentialStatus::computed};

  bool all_defined() const;
  /// mu_1 + mu_-1 - 2 mu_0
  double relation_defect() const { return mu[0] + mu[2] - 2.0 * mu[1]; }
};

/// mu_j = <H_j phi_j, phi_j> / ||phi_j||^2 where H_j is row j of the Hamiltonian.
ChemicalPotentials chemical_potentials(const SpinorField &phi, const ModelParams &params,
                                       const Potential &potential);
/// Same as above, reusing a precomputed H phi.
ChemicalPotentials chemical_potentials_from(const SpinorField &phi, const SpinorField &h_phi);

}  // namespace spinbdg
