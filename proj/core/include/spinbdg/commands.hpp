// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>

#include "spinbdg/config.hpp"

namespace spinbdg
{

/// Runs one of ground, bdg, verify, convergence, perturb, bench.
///
/// Results go to config.out_dir (created if needed) and a short report to
/// `out`. Returns 0 on success. Failures print one JSON object
/// {"error": kind, "command": ..., "message": ...} to `err` and return 1;
/// a `verify` run with failing checks returns 2.
int run_command(const RunConfig &config, std::ostream &out, std::ostream &err);

/// Error kind used in the JSON error line ("constraint", "convergence", ...).
std::string error_kind(const std::exception &e);

/// One-line JSON error object as printed by run_command.
std::string error_json(const std::exception &e, const std::string &command);

}  // namespace spinbdg
