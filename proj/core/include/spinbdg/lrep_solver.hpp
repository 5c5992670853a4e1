// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spinbdg/bdg_operator.hpp"
#include "spinbdg/dense.hpp"
#include "spinbdg/nullspace.hpp"

namespace spinbdg
{

/// Paired columns (f_i, g_i) of a subspace for the pairing <f, g>.
struct PairBlock
{
  std::vector<SpinorField> f;
  std::vector<SpinorField> g;

  std::size_t size() const { return f.size(); }
};

enum class PairingMode
{
  /// f and g are independent; each side is corrected with its own coefficient.
  two_sided,
  /// g = H f for a symmetric H; one coefficient updates both sides so the
  /// relation is preserved.
  linked,
};

/// Modified Gram-Schmidt in the real pairing <f, g> with one
/// re-orthogonalization pass. Columns whose pivot |<f_i, g_i>| falls below
/// 1e-12 ||f_i|| ||g_i|| are dropped. Returns the retained rank; throws
/// StructureError when nothing is left.
std::size_t biorthonormalize(PairBlock &block, PairingMode mode = PairingMode::two_sided);

struct PcgResult
{
  SpinorField x;
  int iterations = 0;
  /// ||(op + shift) x - rhs|| / ||rhs|| on the deflated complement.
  double relative_residual = 0.0;
  std::vector<double> history;
};

/// Preconditioned CG for (op + shift) x = rhs on the orthogonal complement
/// of an orthonormal deflation basis. The preconditioner is the Fourier
/// multiplier (|mu|^2/2 + c)^{-1}, c = shift + mean diagonal, clamped from below.
/// An optional initial guess is projected onto the complement before use; the
/// iteration then also stops once the initial residual has dropped by the
/// factor `reduction`.
PcgResult deflated_pcg(const OperatorHandle &op, const SpinorField &rhs, const std::vector<SpinorField> &defl,
                       double shift, double tol, int max_iter, const SpinorField *guess = nullptr,
                       double reduction = 0.0);

/// Lower bound applied to the preconditioner constant c.
inline constexpr double kMinPreconditionerShift = 1.0;
/// Generalized null vectors are solved to this fraction of the eigen tolerance.
inline constexpr double kGenVectorTolerance = 1e-4;

struct SpectrumOptions
{
  int nev = 40;
  /// Residual target for the normalized pairs.
  double tol = 1e-10;
  int max_outer = 300;
  /// Extra block columns; negative selects max(10, ceil(nev / 5)).
  int pad = -1;
  std::uint64_t seed = 0x5eed2024ULL;
  int max_inner = 20000;
};

struct Spectrum
{
  /// Ascending omega, each normalized so that integral |u|^2 - |v|^2 = 1.
  std::vector<ModePair> pairs;
  int iterations = 0;
  std::uint64_t apply_count = 0;
  long inner_iterations = 0;
  double wall_seconds = 0.0;
  bool converged = false;
  std::vector<std::string> notes;
};

/// Smallest positive frequencies of H+ f = omega g, H- g = omega f.
///
/// Block inverse iteration on H- H+ in null(H-)^perp, with Rayleigh-Ritz in
/// the H+ pairing. Converged pairs stop iterating but stay in the Ritz basis.
/// The generalized vectors of the deflation space are computed first if missing.
Spectrum solve_spectrum(const BdGOperator &op, DeflationSpace space, const SpectrumOptions &options = {});

/// Dense matrix of one operator block, assembled column by column.
DenseMatrix assemble_dense(const BdGOperator &op, Block block);

/// Largest 3 N^d accepted by the dense oracle.
inline constexpr std::size_t kDenseOracleLimit = 512;

struct OracleSpectrum
{
  /// Ascending positive frequencies, at most nev of them.
  std::vector<double> omegas;
  /// Number of eigenvalues of H+^{1/2} H- H+^{1/2} treated as zero.
  int zero_count = 0;
  /// Dimension of the supplied null(H-) basis, for comparison.
  int expected_zero_count = 0;
};

/// Dense reference: omega^2 are the eigenvalues of H+^{1/2} H- H+^{1/2}.
OracleSpectrum dense_oracle_spectrum(const BdGOperator &op, const DeflationSpace &space, int nev);

}  // namespace spinbdg
