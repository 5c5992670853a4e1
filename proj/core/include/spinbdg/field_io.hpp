// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <string>
#include <vector>

#include "spinbdg/ground_state.hpp"
#include "spinbdg/lrep_solver.hpp"
#include "spinbdg/study.hpp"

namespace spinbdg
{

/// Binary field layout: "SPN1", u32 version, u32 d, u32 N, f64 L, u32 ncomp,
/// u8 is_complex, then little-endian f64 values component by component in
/// row-major node order, (re, im) interleaved when complex.
inline constexpr std::uint32_t kFieldVersion = 1;

/// Real fields (no nonzero imaginary part) are stored with is_complex = 0.
void write_field(const std::string &path, const SpinorField &field);
/// Three real densities stored as one real three-component file.
void write_field(const std::string &path, const std::array<ScalarField, 3> &components);
/// Validates magic, version, sizes and rebuilds the grid. Throws FormatError.
SpinorField read_field(const std::string &path);

/// Header `index,omega,residual_plus,residual_minus,norm_check`, one row per
/// pair ordered by omega then index, 17 significant digits.
void write_spectrum_csv(const std::string &path, const Spectrum &spectrum);
std::string spectrum_csv(const Spectrum &spectrum);

std::string convergence_csv(const std::vector<ConvergenceRow> &rows);
std::string timing_csv(const std::vector<TimingRecord> &records);

/// `key = value` lines with mu, residual, energy and iteration data.
std::string ground_log(const GroundState &ground);

/// Writes to a temporary sibling and renames it over the target.
void write_text_atomic(const std::string &path, const std::string &text);

}  // namespace spinbdg
