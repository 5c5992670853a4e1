// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "spinbdg/ground_state.hpp"

namespace spinbdg
{

/// Which operator of the real reduction to apply.
enum class Block
{
  plus,   ///< H+ = A + B
  minus,  ///< H- = A - B
  a,      ///< A (kinetic term included)
  b,      ///< B (pointwise only)
};

/// Pointwise real symmetric 3x3 matrices, six entries per node in the order
/// (00, 01, 02, 11, 12, 22).
class SymmetricField
{
public:
  SymmetricField() = default;
  explicit SymmetricField(std::size_t nodes) : data_(6 * nodes, 0.0) {}

  std::size_t nodes() const { return data_.size() / 6; }
  double *at(std::size_t node) { return data_.data() + 6 * node; }
  const double *at(std::size_t node) const { return data_.data() + 6 * node; }
  /// Entry (r, c) at a node.
  double entry(std::size_t node, int r, int c) const;
  Mat3 matrix(std::size_t node) const;
  void set(std::size_t node, const Mat3 &m);

private:
  std::vector<double> data_;
};

/// Symmetric linear operator on spinor fields plus the data its Fourier
/// diagonal preconditioner needs.
struct OperatorHandle
{
  std::function<void(const SpinorField &, SpinorField &)> apply;
  /// Mean over nodes and components of the pointwise diagonal coefficient.
  double mean_diagonal = 0.0;
  /// Whether apply includes the -Lap/2 term.
  bool has_kinetic = true;
};

/// Matrix-free real BdG operators built around a real ground state.
///
/// Every apply costs one forward and one inverse FFT per component plus a
/// pointwise 3x3 multiply. The operator is immutable after construction;
/// only the apply counter changes.
class BdGOperator
{
public:
  explicit BdGOperator(const GroundState &ground);
  BdGOperator(const BdGOperator &) = delete;
  BdGOperator &operator=(const BdGOperator &) = delete;

  const GridPtr &grid() const { return ground_.grid(); }
  const GroundState &ground() const { return ground_; }

  void apply(Block block, const SpinorField &in, SpinorField &out) const;
  SpinorField apply(Block block, const SpinorField &in) const;
  SpinorField apply_h_plus(const SpinorField &f) const { return apply(Block::plus, f); }
  SpinorField apply_h_minus(const SpinorField &g) const { return apply(Block::minus, g); }

  /// Pointwise part of the block (A and B without the kinetic term).
  const SymmetricField &coefficient(Block block) const;
  OperatorHandle handle(Block block) const;

  std::uint64_t apply_count() const { return applies_.load(std::memory_order_relaxed); }
  void reset_apply_count() const { applies_.store(0, std::memory_order_relaxed); }

private:
  GroundState ground_;
  SymmetricField coeff_a_, coeff_b_, coeff_plus_, coeff_minus_;
  mutable std::atomic<std::uint64_t> applies_{0};
};

/// Pointwise coefficients of A and B at one node for a real ground-state
/// spinor value, the density-independent parts excluded: the returned A
/// omits V - Lambda.
std::pair<Mat3, Mat3> interaction_blocks(const std::array<double, 3> &phi, const ModelParams &params);

struct ModePair
{
  double omega = 0.0;
  SpinorField u;
  SpinorField v;
  double residual_plus = 0.0;
  double residual_minus = 0.0;
};

/// f = (u + v)/2, g = (u - v)/2.
std::pair<SpinorField, SpinorField> fg_from_uv(const SpinorField &u, const SpinorField &v);
/// u = f + g, v = f - g.
std::pair<SpinorField, SpinorField> uv_from_fg(const SpinorField &f, const SpinorField &g);

/// Integral of |u|^2 - |v|^2.
double bdg_norm(const SpinorField &u, const SpinorField &v);

inline constexpr double kIndefiniteNorm = 1e-12;

/// Scales (u, v) so bdg_norm is one; throws StructureError when it is not positive.
ModePair normalize_mode(ModePair pair);

/// (||H+ f - omega g||, ||H- g - omega f||).
std::pair<double, double> mode_residual(const BdGOperator &op, const ModePair &pair);

/// Residual norms (||A u + B v - omega u||, ||-B u - A v - omega v||) of the
/// unreduced BdG system.
std::pair<double, double> full_bdg_residual(const BdGOperator &op, double omega, const SpinorField &u,
                                            const SpinorField &v);

}  // namespace spinbdg
