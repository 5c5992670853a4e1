// SPDX-License-Identifier: Apache-2.0

#include "spinbdg/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <ostream>

#include <nlohmann/json.hpp>

#include "spinbdg/error.hpp"
#include "spinbdg/field_io.hpp"
#include "spinbdg/lrep_solver.hpp"
#include "spinbdg/nullspace.hpp"
#include "spinbdg/study.hpp"

namespace spinbdg
{

namespace
{

std::string path_in(const RunConfig &c, const std::string &name)
{
  return (std::filesystem::path(c.out_dir) / name).string();
}

std::string fmt(double v, const char *spec = "%.6e")
{
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

GroundStateOptions ground_options(const RunConfig &c)
{
  GroundStateOptions o;
  o.tol = c.tol_ground;
  return o;
}

SpectrumOptions spectrum_options(const RunConfig &c, int nev)
{
  SpectrumOptions o;
  o.nev = nev;
  o.tol = c.tol_eig;
  return o;
}

GroundState prepare_ground(const RunConfig &c, std::ostream &out)
{
  const ModelParams params = c.model();
  if (!c.ground_in.empty()) {
    SpinorField phi = read_field(c.ground_in);
    const auto &g = phi.grid();
    if (g->dim() != c.dim || g->points() != c.points || g->half_width() != c.half_width)
      throw ConstraintError("ground state file '" + c.ground_in + "' has d=" + std::to_string(g->dim()) +
                            ", N=" + std::to_string(g->points()) + ", L=" + fmt(g->half_width(), "%g") +
                            ", which does not match the configuration");
    GroundState gs = evaluate_ground_state(std::move(phi), params, Potential::make_harmonic(g, params.gamma));
    gs.converged = gs.residual <= c.tol_ground;
    out << "ground: loaded " << c.ground_in << ", residual " << fmt(gs.residual) << "\n";
    return gs;
  }
  auto grid = SpectralGrid::create(c.dim, c.half_width, c.points);
  GroundState gs = solve_ground_state(params, Potential::make_harmonic(grid, params.gamma), ground_options(c));
  out << "ground: " << to_string(params.phase()) << ", " << gs.iterations << " iterations, residual "
      << fmt(gs.residual) << (gs.converged ? "" : " (not converged)") << "\n";
  return gs;
}

void report_spectrum(const Spectrum &s, std::ostream &out)
{
  out << "spectrum: " << s.pairs.size() << " pairs, " << s.iterations << " outer iterations, " << s.apply_count
      << " operator applications, " << fmt(s.wall_seconds, "%.2f") << " s" << (s.converged ? "" : " (not converged)")
      << "\n";
  for (const auto &n : s.notes)
    out << "  note: " << n << "\n";
}

int cmd_ground(const RunConfig &c, std::ostream &out)
{
  GroundState gs = prepare_ground(c, out);
  write_field(path_in(c, "ground.spn"), gs.phi);
  write_text_atomic(path_in(c, "ground_log.txt"), ground_log(gs));
  out << "mu = (" << fmt(gs.mu.mu[0], "%.12f") << ", " << fmt(gs.mu.mu[1], "%.12f") << ", "
      << fmt(gs.mu.mu[2], "%.12f") << "), energy " << fmt(gs.energy, "%.12f") << "\n";
  return gs.converged ? 0 : 3;
}

int cmd_bdg(const RunConfig &c, std::ostream &out)
{
  GroundState gs = prepare_ground(c, out);
  if (c.ground_in.empty()) {
    write_field(path_in(c, "ground.spn"), gs.phi);
    write_text_atomic(path_in(c, "ground_log.txt"), ground_log(gs));
  }
  BdGOperator op(gs);
  Spectrum s = solve_spectrum(op, analytic_nullspace(gs), spectrum_options(c, c.nev));
  write_spectrum_csv(path_in(c, "spectrum.csv"), s);
  report_spectrum(s, out);
  for (std::size_t i = 0; i < s.pairs.size() && i < 10; ++i)
    out << "  omega[" << i + 1 << "] = " << fmt(s.pairs[i].omega, "%.12f") << "\n";
  return s.converged ? 0 : 3;
}

class Checks
{
public:
  explicit Checks(std::ostream &out) : out_(out) {}
  void add(const std::string &name, bool ok, const std::string &detail)
  {
    out_ << (ok ? "PASS " : "FAIL ") << name << " " << detail << "\n";
    failed_ = failed_ || !ok;
  }
  bool failed() const { return failed_; }

private:
  std::ostream &out_;
  bool failed_ = false;
};

int cmd_verify(const RunConfig &c, std::ostream &out)
{
  Checks checks(out);
  GroundState gs = prepare_ground(c, out);
  checks.add("ground_converged", gs.converged, "residual=" + fmt(gs.residual));
  const double defect = std::abs(gs.mu.relation_defect());
  checks.add("chemical_potential_relation", defect <= 1e-8, "defect=" + fmt(defect));

  BdGOperator op(gs);
  DeflationSpace space = analytic_nullspace(gs);
  const double bound = space.null_tolerance;
  double worst_minus = 0.0, worst_plus = 0.0;
  for (const auto &b : space.null_minus)
    worst_minus = std::max(worst_minus, norm(op.apply_h_minus(b)));
  for (const auto &b : space.null_plus)
    worst_plus = std::max(worst_plus, norm(op.apply_h_plus(b)));
  checks.add("nullspace_minus", worst_minus <= bound, "max|H-b|=" + fmt(worst_minus) + " bound=" + fmt(bound));
  checks.add("nullspace_plus", worst_plus <= bound, "max|H+b|=" + fmt(worst_plus) + " bound=" + fmt(bound));

  space = generalized_nullvectors(op, refine_nullspace(op, space), kGenVectorTolerance * c.tol_eig);
  double worst_gen = 0.0;
  for (std::size_t i = 0; i < space.gen_vectors.size(); ++i) {
    SpinorField r = op.apply_h_plus(space.gen_vectors[i]);
    r -= space.gen_sources[i];
    worst_gen = std::max(worst_gen, norm(r));
  }
  checks.add("generalized_nullvectors", worst_gen <= c.tol_eig,
             std::to_string(space.gen_vectors.size()) + " vectors max|H+x-b|=" + fmt(worst_gen));

  Spectrum s = solve_spectrum(op, space, spectrum_options(c, c.nev));
  report_spectrum(s, out);
  checks.add("spectrum_converged", s.converged, std::to_string(s.pairs.size()) + " pairs");

  double worst_res = 0.0, worst_norm = 0.0, worst_pair = 0.0, worst_sym = 0.0, worst_bi = 0.0;
  std::vector<std::pair<SpinorField, SpinorField>> fg;
  for (const auto &p : s.pairs) {
    worst_res = std::max({worst_res, p.residual_plus, p.residual_minus});
    worst_norm = std::max(worst_norm, std::abs(bdg_norm(p.u, p.v) - 1.0));
    fg.push_back(fg_from_uv(p.u, p.v));
    worst_pair = std::max(worst_pair, std::abs(dot(fg.back().first, fg.back().second) - 0.25));
    const auto [a1, a2] = full_bdg_residual(op, p.omega, p.u, p.v);
    const auto [b1, b2] = full_bdg_residual(op, -p.omega, conj(p.v), conj(p.u));
    // The mirrored pair swaps the two residual blocks.
    worst_sym = std::max({worst_sym, std::abs(a1 - b2), std::abs(a2 - b1)});
  }
  for (std::size_t i = 0; i < s.pairs.size(); ++i)
    for (std::size_t j = 0; j < s.pairs.size(); ++j) {
      const double wi = s.pairs[i].omega, wj = s.pairs[j].omega;
      if (std::abs(wi - wj) <= kClusterTolerance * std::max(wi, wj))
        continue;
      worst_bi = std::max(worst_bi, std::abs(dot(fg[i].first, fg[j].second)));
    }
  checks.add("pair_residuals", worst_res <= c.tol_eig, "max=" + fmt(worst_res));
  checks.add("mode_normalization", worst_norm <= 1e-10 && worst_pair <= 1e-10,
             "max|norm-1|=" + fmt(worst_norm) + " max|<f,g>-1/4|=" + fmt(worst_pair));
  checks.add("spectrum_symmetry", worst_sym <= 1e-12, "max_diff=" + fmt(worst_sym));
  checks.add("biorthogonality", worst_bi <= 1e-8, "max=" + fmt(worst_bi));

  double top = 0.0;
  for (const auto &p : s.pairs)
    top = std::max(top, p.omega);
  double lowest = INFINITY;
  if (gs.potential.harmonic)
    for (int axis = 0; axis < gs.grid()->dim(); ++axis)
      lowest = std::min(lowest, gs.potential.gamma[axis]);
  if (gs.potential.harmonic && top < lowest * (1.0 - kMatchWindow)) {
    // The requested frequencies all lie below the first analytic mode.
    out << "info analytic_modes above computed range omega_max=" << fmt(top) << "; raise nev to check them\n";
  } else if (gs.potential.harmonic) {
    try {
      ErrorReport r = eigen_error_report(s, gs);
      checks.add("analytic_modes_found", true, std::to_string(r.modes.size()) + " modes");
      for (const auto &m : r.modes)
        out << "info analytic_mode axis=" << m.axis << " omega=" << fmt(m.omega, "%.12f")
            << " e_omega=" << fmt(m.e_omega) << " e_uv=" << fmt(m.e_uv) << " multiplicity=" << m.multiplicity
            << "\n";
    } catch (const StructureError &e) {
      checks.add("analytic_modes_found", false, e.what());
    }
  }

  if (3 * gs.grid()->size() <= kDenseOracleLimit) {
    const int k = std::min<int>(8, static_cast<int>(s.pairs.size()));
    OracleSpectrum o = dense_oracle_spectrum(op, space, k);
    double worst = 0.0;
    for (int i = 0; i < k && i < static_cast<int>(o.omegas.size()); ++i)
      worst = std::max(worst, std::abs(s.pairs[i].omega - o.omegas[i]) / o.omegas[i]);
    const bool complete = static_cast<int>(o.omegas.size()) >= k;
    checks.add("dense_oracle", complete && worst <= 1e-8,
               "max_rel=" + fmt(worst) + " zero_count=" + std::to_string(o.zero_count));
  }

  out << "spectrum:";
  for (const auto &p : s.pairs)
    out << " " << fmt(p.omega, "%.10g");
  out << "\n";
  write_spectrum_csv(path_in(c, "spectrum.csv"), s);
  return checks.failed() ? 2 : 0;
}

std::vector<int> study_sizes(const RunConfig &c)
{
  if (!c.sizes.empty())
    return c.sizes;
  return {c.points / 4, c.points / 2, c.points};
}

int cmd_convergence(const RunConfig &c, std::ostream &out)
{
  ConvergenceCase study;
  study.params = c.model();
  study.dim = c.dim;
  study.half_width = c.half_width;
  study.points = study_sizes(c);
  study.ground = ground_options(c);
  study.spectrum = spectrum_options(c, c.nev);
  auto rows = convergence_study(study);
  write_text_atomic(path_in(c, "convergence.csv"), convergence_csv(rows));
  bool ok = true;
  for (const auto &row : rows) {
    ok = ok && row.ground_converged && row.spectrum_converged;
    for (const auto &m : row.report.modes)
      out << "N=" << row.report.points << " h=" << fmt(row.report.h, "%g") << " axis=" << m.axis
          << " omega=" << fmt(m.omega, "%.12f") << " e_omega=" << fmt(m.e_omega, "%.3e")
          << " e_uv=" << fmt(m.e_uv, "%.3e") << "\n";
  }
  return ok ? 0 : 3;
}

int cmd_perturb(const RunConfig &c, std::ostream &out)
{
  GroundState gs = prepare_ground(c, out);
  const int needed = *std::max_element(c.modes.begin(), c.modes.end());
  BdGOperator op(gs);
  Spectrum s = solve_spectrum(op, analytic_nullspace(gs), spectrum_options(c, std::max(needed, c.nev)));
  report_spectrum(s, out);
  if (static_cast<int>(s.pairs.size()) < needed)
    throw ConvergenceError("only " + std::to_string(s.pairs.size()) + " modes available, mode " +
                           std::to_string(needed) + " requested");
  for (int l : c.modes) {
    const auto &mode = s.pairs[static_cast<std::size_t>(l - 1)];
    auto n = perturbed_density(gs, mode, c.eps, c.t);
    double m = 0.0, lo = INFINITY;
    const double cell = gs.grid()->cell_volume();
    for (const auto &comp : n)
      for (std::size_t i = 0; i < comp.size(); ++i) {
        m += comp[i].real() * cell;
        lo = std::min(lo, comp[i].real());
      }
    const std::string name = "perturb_mode" + std::to_string(l) + ".spn";
    write_field(path_in(c, name), n);
    out << "mode " << l << ": omega=" << fmt(mode.omega, "%.12f") << " mass=" << fmt(m, "%.12f")
        << " min_density=" << fmt(lo) << " -> " << name << "\n";
  }
  return 0;
}

int cmd_bench(const RunConfig &c, std::ostream &out)
{
  ConvergenceCase study;
  study.params = c.model();
  study.dim = c.dim;
  study.half_width = c.half_width;
  study.points = c.sizes.empty() ? std::vector<int>{c.points / 2, c.points} : c.sizes;
  study.ground = ground_options(c);
  study.spectrum = spectrum_options(c, c.nev);
  auto solves = timing_benchmark(study);
  write_text_atomic(path_in(c, "timing.csv"), timing_csv(solves));
  auto applies = apply_timing(study.params, c.dim, c.half_width, study.points);
  write_text_atomic(path_in(c, "apply_timing.csv"), timing_csv(applies));
  for (std::size_t i = 0; i < solves.size(); ++i)
    out << "dof=" << solves[i].dof << " solve_seconds=" << fmt(solves[i].seconds, "%.3f")
        << " applies=" << solves[i].applies << " seconds_per_apply=" << fmt(applies[i].seconds, "%.3e") << "\n";
  if (applies.size() >= 2)
    out << "slope log(t_apply) vs log(dof log dof): " << fmt(complexity_slope(applies), "%.3f") << "\n";
  return 0;
}

}  // namespace

std::string error_kind(const std::exception &e)
{
  if (dynamic_cast<const GridError *>(&e))
    return "grid";
  if (dynamic_cast<const ConstraintError *>(&e))
    return "constraint";
  if (dynamic_cast<const ConvergenceError *>(&e))
    return "convergence";
  if (dynamic_cast<const StructureError *>(&e))
    return "structure";
  if (dynamic_cast<const FormatError *>(&e))
    return "format";
  return "internal";
}

std::string error_json(const std::exception &e, const std::string &command)
{
  const nlohmann::json j{{"error", error_kind(e)}, {"command", command}, {"message", e.what()}};
  return j.dump();
}

int run_command(const RunConfig &config, std::ostream &out, std::ostream &err)
{
  try {
    if (config.command.empty())
      throw ConstraintError("no command given");
    std::filesystem::create_directories(config.out_dir);
    const auto &cmd = config.command;
    if (cmd == "ground")
      return cmd_ground(config, out);
    if (cmd == "bdg")
      return cmd_bdg(config, out);
    if (cmd == "verify")
      return cmd_verify(config, out);
    if (cmd == "convergence")
      return cmd_convergence(config, out);
    if (cmd == "perturb")
      return cmd_perturb(config, out);
    if (cmd == "bench")
      return cmd_bench(config, out);
    throw ConstraintError("unknown command '" + cmd + "'");
  } catch (const std::exception &e) {
    err << error_json(e, config.command) << "\n";
    return 1;
  }
}

}  // namespace spinbdg
