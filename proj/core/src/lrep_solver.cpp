// SPDX-License-Identifier: Apache-2.0

#include "spinbdg/lrep_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <tuple>

#include <Eigen/Dense>

#include "spinbdg/error.hpp"

namespace spinbdg
{

namespace
{

/// Columns keeping less than this fraction of their norm after projection are dependent.
constexpr double kDependentColumn = 1e-8;

}  // namespace

std::size_t biorthonormalize(PairBlock &block, PairingMode mode)
{
  if (block.f.size() != block.g.size())
    throw StructureError("pair block has unequal column counts");
  PairBlock out;
  for (std::size_t i = 0; i < block.f.size(); ++i) {
    SpinorField f = std::move(block.f[i]);
    SpinorField g = std::move(block.g[i]);
    const double f0 = norm(f);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < out.f.size(); ++j) {
        const double cf = dot(f, out.g[j]);
        const double cg = mode == PairingMode::linked ? cf : dot(g, out.f[j]);
        axpy(-cf, out.f[j], f);
        axpy(-cg, out.g[j], g);
      }
    }
    // A column the projection all but cancels is dependent; its remainder is rounding noise.
    if (!(norm(f) > kDependentColumn * f0))
      continue;
    const double pivot = dot(f, g);
    if (!(std::abs(pivot) >= 1e-12 * norm(f) * norm(g)) || pivot == 0.0)
      continue;
    if (mode == PairingMode::linked && pivot < 0.0)
      throw StructureError("linked pairing is not positive; operator is indefinite on the block");
    const double s = 1.0 / std::sqrt(std::abs(pivot));
    f *= s;
    g *= std::copysign(s, pivot);
    out.f.push_back(std::move(f));
    out.g.push_back(std::move(g));
  }
  block = std::move(out);
  if (block.f.empty())
    throw StructureError("bi-orthonormalization left no columns");
  return block.f.size();
}

PcgResult deflated_pcg(const OperatorHandle &op, const SpinorField &rhs, const std::vector<SpinorField> &defl,
                       double shift, double tol, int max_iter, const SpinorField *guess,
                       double reduction)
{
  const auto &grid = rhs.grid();
  PcgResult res;
  res.x = SpinorField(grid);
  const double rhs_norm = norm(rhs);
  SpinorField r = project_out(rhs, defl);
  const double r0 = norm(r);
  if (rhs_norm == 0.0 || r0 <= 1e-13 * rhs_norm)
    return res;
  SpinorField q(grid);
  if (guess) {
    res.x = project_out(*guess, defl);
    op.apply(res.x, q);
    if (shift != 0.0)
      axpy(shift, res.x, q);
    project_out_inplace(q, defl);
    r -= q;
  }

  double c = std::max(shift + op.mean_diagonal, kMinPreconditionerShift);
  std::vector<double> precond(grid->size());
  {
    const auto &kin = grid->kinetic_symbol();
    for (std::size_t i = 0; i < precond.size(); ++i)
      precond[i] = 1.0 / ((op.has_kinetic ? kin[i] : 0.0) + c);
  }
  auto apply_precond = [&](const SpinorField &in) {
    SpinorField out = in;
    for (int j = 0; j < 3; ++j)
      grid->apply_even_multiplier(out.component(j), precond);
    project_out_inplace(out, defl);
    return out;
  };

  const double start = norm(r);
  const double target = guess ? std::max(tol * rhs_norm, reduction * start) : tol * rhs_norm;
  res.relative_residual = start / rhs_norm;
  if (res.relative_residual * rhs_norm <= target)
    return res;
  SpinorField z = apply_precond(r);
  SpinorField p = z;
  double rz = dot(r, z);
  for (int it = 1; it <= max_iter; ++it) {
    op.apply(p, q);
    if (shift != 0.0)
      axpy(shift, p, q);
    project_out_inplace(q, defl);
    const double pq = dot(p, q);
    if (!(pq > 0.0))
      throw StructureError("deflated CG met non-positive curvature; operator is not positive on the complement");
    const double alpha = rz / pq;
    axpy(alpha, p, res.x);
    axpy(-alpha, q, r);
    const double rn = norm(r);
    res.history.push_back(rn / rhs_norm);
    res.iterations = it;
    res.relative_residual = rn / rhs_norm;
    if (rn <= target)
      return res;
    z = apply_precond(r);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    p *= beta;
    p += z;
  }
  std::string msg = "deflated CG did not reach relative residual " + std::to_string(tol) + " in " +
                    std::to_string(max_iter) + " iterations (last " + std::to_string(res.relative_residual) + ")";
  throw ConvergenceError(msg);
}

namespace
{

/// Gaussian elimination with partial pivoting for the small oblique system.
std::vector<double> solve_small(DenseMatrix a, std::vector<double> b)
{
  const std::size_t n = b.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t r = k + 1; r < n; ++r)
      if (std::abs(a(r, k)) > std::abs(a(piv, k)))
        piv = r;
    if (a(piv, k) == 0.0)
      throw StructureError("generalized null vectors are degenerate");
    if (piv != k) {
      for (std::size_t c = 0; c < n; ++c)
        std::swap(a(k, c), a(piv, c));
      std::swap(b[k], b[piv]);
    }
    for (std::size_t r = k + 1; r < n; ++r) {
      const double f = a(r, k) / a(k, k);
      for (std::size_t c = k; c < n; ++c)
        a(r, c) -= f * a(k, c);
      b[r] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t k = n; k-- > 0;) {
    double s = b[k];
    for (std::size_t c = k + 1; c < n; ++c)
      s -= a(k, c) * x[c];
    x[k] = s / a(k, k);
  }
  return x;
}

/// Absolute floor for warm-started inner solves, relative to the right-hand side.
constexpr double kInnerFloor = 1e-15;
/// Residual reduction asked of each inner solve; cold starts use it as a relative tolerance.
constexpr double kInnerReduction = 0.1;
/// Basis directions whose scaled Gram eigenvalue falls below this are dropped.
constexpr double kBasisDropTolerance = 1e-12;

struct Locked
{
  double omega;
  SpinorField f;  // <f, w> = 1 with w = H+ f
  SpinorField w;
};

/// Active block column; a Ritz column keeps theta and w = H+ f as a warm start.
struct Column
{
  SpinorField f;
  SpinorField w;
  double theta = 0.0;
};

class Iteration
{
public:
  Iteration(const BdGOperator &op, const DeflationSpace &space, const SpectrumOptions &opt)
      : op_(op), space_(space), opt_(opt), plus_(op.handle(Block::plus)), minus_(op.handle(Block::minus))
  {
    // The kernel of H- H+ beyond null(H-) is spanned by gen_vectors and null(H+).
    correction_ = space_.gen_vectors;
    correction_.insert(correction_.end(), space_.null_plus.begin(), space_.null_plus.end());
    const std::size_t k = space_.null_minus.size();
    if (correction_.size() != k)
      throw StructureError("deflation space dimensions are inconsistent");
    gram_ = DenseMatrix(k, k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j)
        gram_(i, j) = dot(space_.null_minus[i], correction_[j]);
  }

  /// Keeps x real, in null(H-)^perp and H+-orthogonal to the locked pairs.
  void clean(SpinorField &x, const std::vector<Locked> &locked) const
  {
    // The reduced operators are real; transform roundoff in the imaginary part
    // would otherwise seed a spurious copy i*f of every mode.
    for (auto &v : x.data())
      v = cplx(v.real(), 0.0);
    project_out_inplace(x, space_.null_minus);
    for (const auto &l : locked)
      axpy(-dot(x, l.w), l.f, x);
    project_out_inplace(x, space_.null_minus);
  }

  /// y with H- H+ y = f inside null(H-)^perp.
  SpinorField inverse(const Column &col, double eta)
  {
    // For an exact pair H- w = theta f, so the solves return w/theta and f/theta.
    const SpinorField &f = col.f;
    SpinorField z0, y0;
    if (col.theta > 0.0) {
      z0 = col.w;
      z0 *= 1.0 / col.theta;
      y0 = f;
      y0 *= 1.0 / col.theta;
    }
    const bool warm = col.theta > 0.0;
    const double tol = warm ? kInnerFloor : eta;
    PcgResult z = deflated_pcg(minus_, f, space_.null_minus, 0.0, tol, opt_.max_inner, warm ? &z0 : nullptr, eta);
    if (warm) {
      // Restore the null(H-) part of the guess: it only moves y along the
      // correction span below, but keeps the second solve close to f/theta.
      for (const auto &b : space_.null_minus)
        axpy(inner_product(z0, b), b, z.x);
    }
    PcgResult y = deflated_pcg(plus_, z.x, space_.null_plus, 0.0, tol, opt_.max_inner, warm ? &y0 : nullptr, eta);
    inner_ += z.iterations + y.iterations;
    // Solutions differ by gen_vectors and null(H+) terms; pick the one orthogonal to null(H-).
    const std::size_t k = correction_.size();
    if (k > 0) {
      std::vector<double> b(k);
      for (std::size_t i = 0; i < k; ++i)
        b[i] = dot(space_.null_minus[i], y.x);
      auto c = solve_small(gram_, b);
      for (std::size_t i = 0; i < k; ++i)
        axpy(-c[i], correction_[i], y.x);
    }
    return std::move(y.x);
  }

  SpinorField random_start(std::uint64_t salt) const
  {
    return random_real_field(op_.grid(), opt_.seed * 6364136223846793005ULL + salt);
  }

  long inner_iterations() const { return inner_; }

private:
  const BdGOperator &op_;
  const DeflationSpace &space_;
  const SpectrumOptions &opt_;
  OperatorHandle plus_;
  OperatorHandle minus_;
  std::vector<SpinorField> correction_;
  DenseMatrix gram_;
  long inner_ = 0;
};

bool all_real(const std::vector<SpinorField> &cols)
{
  for (const auto &c : cols)
    for (const auto &v : c.data())
      if (v.imag() != 0.0)
        return false;
  return true;
}

/// Columns as a dense real matrix whose plain dot products are `dot` up to
/// the cell volume; real fields drop their zero imaginary parts.
Eigen::MatrixXd pack(const std::vector<SpinorField> &cols, bool real)
{
  const std::size_t values = cols.front().data().size();
  const auto rows = static_cast<Eigen::Index>(real ? values : 2 * values);
  Eigen::MatrixXd m(rows, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const double *raw = reinterpret_cast<const double *>(cols[j].data().data());
    auto col = m.col(static_cast<Eigen::Index>(j));
    if (real)
      col = Eigen::Map<const Eigen::VectorXd, 0, Eigen::InnerStride<2>>(raw, rows);
    else
      col = Eigen::Map<const Eigen::VectorXd>(raw, rows);
  }
  return m;
}

SpinorField unpack(const GridPtr &grid, const Eigen::Ref<const Eigen::VectorXd> &col, bool real)
{
  SpinorField x(grid);
  double *raw = reinterpret_cast<double *>(x.data().data());
  if (real)
    Eigen::Map<Eigen::VectorXd, 0, Eigen::InnerStride<2>>(raw, col.size()) = col;
  else
    Eigen::Map<Eigen::VectorXd>(raw, col.size()) = col;
  return x;
}

/// Rayleigh-Ritz for H- H+ on span(F) with W = H+ F and HW = H- W.
///
/// Returns Ritz values and coefficient columns Z with Z^T F^T W Z = I, so
/// f = F z is paired with w = W z and theta = z^T W^T HW z.
struct RitzBasis
{
  Eigen::VectorXd theta;
  Eigen::MatrixXd coeffs;
};

RitzBasis rayleigh_ritz(const Eigen::MatrixXd &f, const Eigen::MatrixXd &w, const Eigen::MatrixXd &hw)
{
  Eigen::MatrixXd gram = f.transpose() * w;
  Eigen::MatrixXd proj = w.transpose() * hw;
  gram = 0.5 * (gram + gram.transpose()).eval();
  proj = 0.5 * (proj + proj.transpose()).eval();

  // Unit diagonal first, so the drop threshold is relative per direction.
  const Eigen::Index m = gram.rows();
  Eigen::VectorXd scale(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!(gram(i, i) > 0.0))
      throw StructureError("linked pairing is not positive; operator is indefinite on the block");
    scale(i) = 1.0 / std::sqrt(gram(i, i));
  }
  gram = scale.asDiagonal() * gram * scale.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ge(gram);
  const Eigen::VectorXd &lambda = ge.eigenvalues();
  const double top = lambda(m - 1);
  if (lambda(0) < -1e-8 * top)
    throw StructureError("linked pairing is not positive; operator is indefinite on the block");
  Eigen::Index first = 0;
  while (first < m && lambda(first) <= kBasisDropTolerance * top)
    ++first;
  if (first == m)
    throw StructureError("bi-orthonormalization left no columns");
  const Eigen::Index r = m - first;
  Eigen::MatrixXd c = scale.asDiagonal() * ge.eigenvectors().rightCols(r) *
                      lambda.tail(r).cwiseSqrt().cwiseInverse().asDiagonal();

  Eigen::MatrixXd t = c.transpose() * proj * c;
  t = 0.5 * (t + t.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> te(t);
  return {te.eigenvalues(), c * te.eigenvectors()};
}

ModePair make_pair(const BdGOperator &op, double omega, const SpinorField &f, const SpinorField &w)
{
  // <f, g> = 1 / omega before scaling; the BdG norm 4 <f, g> becomes one.
  const double s = std::sqrt(omega) / 2.0;
  SpinorField fn = f;
  fn *= s;
  SpinorField gn = w;
  gn *= s / omega;
  ModePair pair;
  pair.omega = omega;
  std::tie(pair.u, pair.v) = uv_from_fg(fn, gn);
  pair = normalize_mode(std::move(pair));
  std::tie(pair.residual_plus, pair.residual_minus) = mode_residual(op, pair);
  return pair;
}

}  // namespace

Spectrum solve_spectrum(const BdGOperator &op, DeflationSpace space, const SpectrumOptions &options)
{
  const auto start = std::chrono::steady_clock::now();
  if (options.nev <= 0)
    throw ConstraintError("nev must be positive");
  if (!space.refined)
    space = refine_nullspace(op, std::move(space));
  if (space.gen_vectors.size() != space.gen_sources.size())
    space = generalized_nullvectors(op, std::move(space), kGenVectorTolerance * options.tol, options.max_inner);
  op.reset_apply_count();

  const int nev = options.nev;
  const int pad = options.pad >= 0 ? options.pad : std::max(10, (nev + 4) / 5);
  const std::size_t dof = 3 * op.grid()->size() - space.null_minus.size();
  Iteration iter(op, space, options);
  Spectrum out;
  std::vector<Locked> locked;

  std::uint64_t salt = 0;
  std::vector<Column> active;
  auto target_size = [&] {
    return std::min<std::size_t>(static_cast<std::size_t>(nev - static_cast<int>(locked.size()) + pad),
                                 dof - locked.size());
  };
  auto refill = [&] {
    while (active.size() < target_size()) {
      SpinorField x = iter.random_start(salt++);
      iter.clean(x, locked);
      active.push_back({std::move(x), SpinorField(), 0.0});
    }
  };
  refill();

  for (int outer = 1; outer <= options.max_outer; ++outer) {
    out.iterations = outer;

    // Rayleigh-Ritz basis: locked pairs, current Ritz vectors and their
    // inverse-iteration corrections. Locked pairs stay in the basis so their
    // small errors do not cap the accuracy of pairs converged later.
    PairBlock block;
    for (auto &l : locked) {
      block.f.push_back(std::move(l.f));
      block.g.push_back(std::move(l.w));
    }
    locked.clear();
    std::vector<SpinorField> directions;
    for (auto &c : active) {
      SpinorField y = iter.inverse(c, kInnerReduction);
      if (c.theta > 0.0) {
        // Keep only the correction y - f/theta; f itself is already in the basis.
        axpy(-1.0 / c.theta, c.f, y);
        block.f.push_back(std::move(c.f));
        block.g.push_back(std::move(c.w));
      }
      directions.push_back(std::move(y));
    }
    active.clear();
    for (auto &d : directions) {
      iter.clean(d, locked);
      block.g.push_back(op.apply_h_plus(d));
      block.f.push_back(std::move(d));
    }
    std::vector<SpinorField> hw;
    hw.reserve(block.size());
    for (const auto &w : block.g)
      hw.push_back(op.apply_h_minus(w));
    const bool real = all_real(block.f) && all_real(block.g) && all_real(hw);
    const Eigen::MatrixXd fm = pack(block.f, real);
    const Eigen::MatrixXd wm = pack(block.g, real);
    block = PairBlock();
    const Eigen::MatrixXd hwm = pack(hw, real);
    hw.clear();
    // The cell volume scales both Gram matrices alike; theta is unaffected
    // and the coefficients absorb 1/sqrt(volume).
    RitzBasis ritz = rayleigh_ritz(fm, wm, hwm);
    ritz.coeffs *= 1.0 / std::sqrt(op.grid()->cell_volume());

    const std::size_t keep = static_cast<std::size_t>(nev + pad);
    std::vector<Eigen::Index> chosen;
    std::vector<bool> wanted;
    int rank = 0;
    for (Eigen::Index i = 0; i < ritz.theta.size() && chosen.size() < keep; ++i) {
      const double theta = ritz.theta(i);
      if (theta < -1e-10)
        throw StructureError("negative Ritz value " + std::to_string(theta) +
                             ": H+ or H- is indefinite on the deflated space");
      if (theta <= 1e-10) {
        out.notes.push_back("discarded near-zero Ritz value " + std::to_string(theta));
        continue;
      }
      chosen.push_back(i);
      wanted.push_back(rank++ < nev);
    }
    Eigen::MatrixXd z(ritz.coeffs.rows(), static_cast<Eigen::Index>(chosen.size()));
    for (std::size_t k = 0; k < chosen.size(); ++k)
      z.col(static_cast<Eigen::Index>(k)) = ritz.coeffs.col(chosen[k]);
    const Eigen::MatrixXd fz = fm * z;
    const Eigen::MatrixXd wz = wm * z;
    const Eigen::MatrixXd hwz = hwm * z;
    for (std::size_t k = 0; k < chosen.size(); ++k) {
      const auto col = static_cast<Eigen::Index>(k);
      const double theta = ritz.theta(chosen[k]);
      const double omega = std::sqrt(theta);
      SpinorField f = unpack(op.grid(), fz.col(col), real);
      SpinorField w = unpack(op.grid(), wz.col(col), real);
      SpinorField r = unpack(op.grid(), hwz.col(col), real);
      r *= 1.0 / omega;
      axpy(-omega, f, r);
      const double residual = norm(r) * std::sqrt(omega) / 2.0;
      if (wanted[k] && residual <= options.tol)
        locked.push_back({omega, std::move(f), std::move(w)});
      else
        active.push_back({std::move(f), std::move(w), theta});
    }
    if (static_cast<int>(locked.size()) >= nev) {
      out.converged = true;
      break;
    }
    for (auto &c : active)
      iter.clean(c.f, locked);
    while (active.size() > target_size())
      active.pop_back();
    refill();
  }

  std::sort(locked.begin(), locked.end(), [](const Locked &a, const Locked &b) { return a.omega < b.omega; });
  for (const auto &l : locked) {
    if (static_cast<int>(out.pairs.size()) >= nev)
      break;
    out.pairs.push_back(make_pair(op, l.omega, l.f, l.w));
  }
  if (!out.converged) {
    // Best available approximations for the missing pairs.
    for (std::size_t i = 0; i < active.size() && static_cast<int>(out.pairs.size()) < nev; ++i) {
      SpinorField w = op.apply_h_plus(active[i].f);
      const double pairing = dot(active[i].f, w);
      SpinorField hw = op.apply_h_minus(w);
      const double theta = dot(w, hw) / pairing;
      if (!(theta > 0.0) || !(pairing > 0.0))
        continue;
      SpinorField f = active[i].f;
      f *= 1.0 / std::sqrt(pairing);
      w *= 1.0 / std::sqrt(pairing);
      out.pairs.push_back(make_pair(op, std::sqrt(theta), f, w));
    }
    std::sort(out.pairs.begin(), out.pairs.end(),
              [](const ModePair &a, const ModePair &b) { return a.omega < b.omega; });
    out.notes.push_back("eigensolver stopped after " + std::to_string(out.iterations) + " outer iterations with " +
                        std::to_string(locked.size()) + " of " + std::to_string(nev) + " pairs converged");
  }
  out.apply_count = op.apply_count();
  out.inner_iterations = iter.inner_iterations();
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

DenseMatrix assemble_dense(const BdGOperator &op, Block block)
{
  const std::size_t n = 3 * op.grid()->size();
  DenseMatrix m(n, n);
  SpinorField e(op.grid());
  SpinorField col(op.grid());
  for (std::size_t k = 0; k < n; ++k) {
    e.set_zero();
    e.data()[k] = 1.0;
    op.apply(block, e, col);
    for (std::size_t r = 0; r < n; ++r)
      m(r, k) = col.data()[r].real();
  }
  return m;
}

OracleSpectrum dense_oracle_spectrum(const BdGOperator &op, const DeflationSpace &space, int nev)
{
  const std::size_t n = 3 * op.grid()->size();
  if (n > kDenseOracleLimit)
    throw ConstraintError("dense oracle limited to 3 N^d <= " + std::to_string(kDenseOracleLimit) + ", got " +
                          std::to_string(n));
  DenseMatrix hp = assemble_dense(op, Block::plus);
  DenseMatrix hm = assemble_dense(op, Block::minus);
  // Symmetrize away rounding in the assembled columns.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      hp(i, j) = hp(j, i) = 0.5 * (hp(i, j) + hp(j, i));
      hm(i, j) = hm(j, i) = 0.5 * (hm(i, j) + hm(j, i));
    }

  auto ep = jacobi_eigh(hp);
  const double pmax = std::max(std::abs(ep.values.front()), std::abs(ep.values.back()));
  DenseMatrix root(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double lam = ep.values[k];
    if (lam <= 1e-10 * pmax)
      continue;
    const double s = std::sqrt(lam);
    for (std::size_t i = 0; i < n; ++i) {
      const double vi = ep.vectors(i, k) * s;
      for (std::size_t j = 0; j < n; ++j)
        root(i, j) += vi * ep.vectors(j, k);
    }
  }
  DenseMatrix s = root * hm * root;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      s(i, j) = s(j, i) = 0.5 * (s(i, j) + s(j, i));
  auto es = jacobi_eigh(s);
  const double scale = std::max(std::abs(es.values.front()), std::abs(es.values.back()));

  OracleSpectrum out;
  out.expected_zero_count = static_cast<int>(space.null_minus.size());
  for (double theta : es.values) {
    if (std::abs(theta) <= 1e-10 * scale) {
      ++out.zero_count;
      continue;
    }
    if (theta < 0.0)
      throw StructureError("dense oracle found a negative eigenvalue " + std::to_string(theta));
    if (static_cast<int>(out.omegas.size()) < nev)
      out.omegas.push_back(std::sqrt(theta));
  }
  return out;
}

}  // namespace spinbdg
