// SPDX-License-Identifier: Apache-2.0

#include "spinbdg/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "spinbdg/error.hpp"

namespace spinbdg
{

namespace
{

const std::vector<std::string_view> kCommands{"ground", "bdg", "verify", "convergence", "perturb", "bench"};

std::string_view trim(std::string_view s)
{
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(std::string_view s)
{
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw FormatError("expected a finite number, got '" + std::string(s) + "'");
  return v;
}

int to_int(std::string_view s)
{
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw FormatError("expected an integer, got '" + std::string(s) + "'");
  return v;
}

std::vector<int> to_int_list(std::string_view s)
{
  std::vector<int> out;
  while (!s.empty()) {
    const auto comma = s.find(',');
    out.push_back(to_int(trim(s.substr(0, comma))));
    if (comma == std::string_view::npos)
      break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

void require(bool ok, const std::string &message)
{
  if (!ok)
    throw ConstraintError(message);
}

void check_points(int n)
{
  require(n % 2 == 0, "N must be even, got " + std::to_string(n));
  require(n >= 4, "N must be at least 4, got " + std::to_string(n));
}

std::string fmt(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join(const std::vector<int> &v)
{
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i)
    s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

using Setter = std::function<void(RunConfig &, std::string_view)>;
using Getter = std::function<std::string(const RunConfig &)>;

struct Key
{
  std::string_view name;
  Setter set;
  Getter get;
};

const std::vector<Key> &keys()
{
  static const std::vector<Key> k{
      {"command",
       [](RunConfig &c, std::string_view v) {
         require(v.empty() || std::find(kCommands.begin(), kCommands.end(), v) != kCommands.end(),
                 "unknown command '" + std::string(v) + "'");
         c.command = std::string(v);
       },
       [](const RunConfig &c) { return c.command; }},
      {"d",
       [](RunConfig &c, std::string_view v) {
         c.dim = to_int(v);
         require(c.dim >= 1 && c.dim <= 3, "d must be 1, 2 or 3, got " + std::to_string(c.dim));
       },
       [](const RunConfig &c) { return std::to_string(c.dim); }},
      {"L",
       [](RunConfig &c, std::string_view v) {
         c.half_width = to_double(v);
         require(c.half_width > 0.0, "L must be positive");
       },
       [](const RunConfig &c) { return fmt(c.half_width); }},
      {"N",
       [](RunConfig &c, std::string_view v) {
         c.points = to_int(v);
         check_points(c.points);
       },
       [](const RunConfig &c) { return std::to_string(c.points); }},
      {"beta_n", [](RunConfig &c, std::string_view v) { c.beta_n = to_double(v); },
       [](const RunConfig &c) { return fmt(c.beta_n); }},
      {"beta_s", [](RunConfig &c, std::string_view v) { c.beta_s = v.empty() ? std::nullopt : std::optional(to_double(v)); },
       [](const RunConfig &c) { return c.beta_s ? fmt(*c.beta_s) : std::string(); }},
      {"gamma_x",
       [](RunConfig &c, std::string_view v) {
         c.gamma[0] = to_double(v);
         require(c.gamma[0] > 0.0, "gamma_x must be positive");
       },
       [](const RunConfig &c) { return fmt(c.gamma[0]); }},
      {"gamma_y",
       [](RunConfig &c, std::string_view v) {
         c.gamma[1] = to_double(v);
         require(c.gamma[1] > 0.0, "gamma_y must be positive");
       },
       [](const RunConfig &c) { return fmt(c.gamma[1]); }},
      {"gamma_z",
       [](RunConfig &c, std::string_view v) {
         c.gamma[2] = to_double(v);
         require(c.gamma[2] > 0.0, "gamma_z must be positive");
       },
       [](const RunConfig &c) { return fmt(c.gamma[2]); }},
      {"M",
       [](RunConfig &c, std::string_view v) {
         c.magnetization = to_double(v);
         require(std::abs(c.magnetization) < 1.0, "M must lie in (-1, 1)");
       },
       [](const RunConfig &c) { return fmt(c.magnetization); }},
      {"nev",
       [](RunConfig &c, std::string_view v) {
         c.nev = to_int(v);
         require(c.nev >= 1, "nev must be positive");
       },
       [](const RunConfig &c) { return std::to_string(c.nev); }},
      {"tol_ground",
       [](RunConfig &c, std::string_view v) {
         c.tol_ground = to_double(v);
         require(c.tol_ground > 0.0, "tol_ground must be positive");
       },
       [](const RunConfig &c) { return fmt(c.tol_ground); }},
      {"tol_eig",
       [](RunConfig &c, std::string_view v) {
         c.tol_eig = to_double(v);
         require(c.tol_eig > 0.0, "tol_eig must be positive");
       },
       [](const RunConfig &c) { return fmt(c.tol_eig); }},
      {"eps",
       [](RunConfig &c, std::string_view v) {
         c.eps = to_double(v);
         require(c.eps >= 0.0, "eps must be nonnegative");
       },
       [](const RunConfig &c) { return fmt(c.eps); }},
      {"t", [](RunConfig &c, std::string_view v) { c.t = to_double(v); }, [](const RunConfig &c) { return fmt(c.t); }},
      {"out",
       [](RunConfig &c, std::string_view v) {
         require(!v.empty(), "out must not be empty");
         c.out_dir = std::string(v);
       },
       [](const RunConfig &c) { return c.out_dir; }},
      {"ground_in", [](RunConfig &c, std::string_view v) { c.ground_in = std::string(v); },
       [](const RunConfig &c) { return c.ground_in; }},
      {"sizes",
       [](RunConfig &c, std::string_view v) {
         c.sizes = to_int_list(v);
         for (int n : c.sizes)
           check_points(n);
       },
       [](const RunConfig &c) { return join(c.sizes); }},
      {"modes",
       [](RunConfig &c, std::string_view v) {
         c.modes = to_int_list(v);
         for (int m : c.modes)
           require(m >= 1, "mode indices are 1-based");
       },
       [](const RunConfig &c) { return join(c.modes); }},
  };
  return k;
}

}  // namespace

ModelParams RunConfig::model() const
{
  if (!beta_s)
    throw ConstraintError("beta_s is not set; the phase (ferromagnetic, antiferromagnetic or spin-independent) "
                          "is undefined");
  ModelParams p;
  p.beta_n = beta_n;
  p.beta_s = *beta_s;
  p.gamma = gamma;
  p.magnetization = magnetization;
  p.validate(dim);
  return p;
}

const std::vector<std::string_view> &config_keys()
{
  static const std::vector<std::string_view> names = [] {
    std::vector<std::string_view> n;
    for (const auto &k : keys())
      n.push_back(k.name);
    return n;
  }();
  return names;
}

RunConfig parse_config(std::string_view text)
{
  RunConfig c;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty())
      continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw FormatError(where + "expected 'key = value', got '" + std::string(line) + "'");
    const auto name = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto &k = keys();
    auto it = std::find_if(k.begin(), k.end(), [&](const Key &key) { return key.name == name; });
    if (it == k.end())
      throw FormatError(where + "unknown key '" + std::string(name) + "'");
    try {
      it->set(c, value);
    } catch (const FormatError &e) {
      throw FormatError(where + std::string(name) + ": " + e.what());
    } catch (const ConstraintError &e) {
      throw ConstraintError(where + e.what());
    }
  }
  return c;
}

std::string serialize_config(const RunConfig &config)
{
  std::string s;
  for (const auto &k : keys())
    s += std::string(k.name) + " = " + k.get(config) + "\n";
  return s;
}

RunConfig load_config(const std::string &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw FormatError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const FormatError &e) {
    throw FormatError(path + ": " + e.what());
  } catch (const ConstraintError &e) {
    throw ConstraintError(path + ": " + e.what());
  }
}

}  // namespace spinbdg
