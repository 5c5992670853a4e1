// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spinbdg/spinor_model.hpp"

namespace spinbdg
{

/// Everything one CLI run needs. Keys of the text form are listed in
/// config_keys(); values not given keep the defaults below.
struct RunConfig
{
  std::string command;
  int dim = 1;
  double half_width = 16.0;
  int points = 128;
  double beta_n = 0.0;
  /// Unset until given; the phase is undefined without it.
  std::optional<double> beta_s;
  std::array<double, 3> gamma{1.0, 1.0, 1.0};
  double magnetization = 0.0;
  int nev = 40;
  double tol_ground = 1e-10;
  double tol_eig = 1e-10;
  double eps = 0.1;
  double t = 0.0;
  std::string out_dir = "out";
  std::string ground_in;
  /// Grid sizes for `convergence` and `bench`.
  std::vector<int> sizes;
  /// 1-based mode indices for `perturb`.
  std::vector<int> modes{1};

  bool operator==(const RunConfig &) const = default;

  /// Throws ConstraintError when beta_s is missing or a value is out of range.
  ModelParams model() const;
};

/// Recognized keys, in serialization order.
const std::vector<std::string_view> &config_keys();

/// Parses `key = value` lines; `#` starts a comment. Unknown keys, malformed
/// values and range violations throw FormatError or ConstraintError with the
/// line number in the message.
RunConfig parse_config(std::string_view text);

/// Every key with its value; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig &config);

/// Reads and parses a file; errors name the path.
RunConfig load_config(const std::string &path);

}  // namespace spinbdg
