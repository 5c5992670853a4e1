// SPDX-License-Identifier: Apache-2.0

#include "spinbdg/field_io.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "spinbdg/error.hpp"

namespace spinbdg
{

namespace
{

constexpr char kMagic[4] = {'S', 'P', 'N', '1'};
constexpr std::size_t kHeaderBytes = 4 + 4 + 4 + 4 + 8 + 4 + 1;

void put_u32(std::string &b, std::uint32_t v)
{
  for (int i = 0; i < 4; ++i)
    b.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

void put_f64(std::string &b, double v)
{
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i)
    b.push_back(static_cast<char>((bits >> (8 * i)) & 0xffu));
}

class Reader
{
public:
  Reader(const std::string &data, const std::string &path) : data_(data), path_(path) {}

  std::uint64_t bytes(int n)
  {
    if (pos_ + static_cast<std::size_t>(n) > data_.size())
      throw FormatError(path_ + ": truncated field file");
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }
  std::uint32_t u32() { return static_cast<std::uint32_t>(bytes(4)); }
  double f64() { return std::bit_cast<double>(bytes(8)); }
  std::size_t remaining() const { return data_.size() - pos_; }

private:
  const std::string &data_;
  const std::string &path_;
  std::size_t pos_ = 0;
};

std::string encode(const GridPtr &grid, const std::vector<std::span<const cplx>> &components)
{
  bool is_complex = false;
  for (const auto &c : components)
    is_complex = is_complex || std::any_of(c.begin(), c.end(), [](const cplx &v) { return v.imag() != 0.0; });
  std::string b(kMagic, 4);
  put_u32(b, kFieldVersion);
  put_u32(b, static_cast<std::uint32_t>(grid->dim()));
  put_u32(b, static_cast<std::uint32_t>(grid->points()));
  put_f64(b, grid->half_width());
  put_u32(b, static_cast<std::uint32_t>(components.size()));
  b.push_back(static_cast<char>(is_complex ? 1 : 0));
  b.reserve(b.size() + components.size() * grid->size() * (is_complex ? 16 : 8));
  for (const auto &c : components)
    for (const auto &v : c) {
      put_f64(b, v.real());
      if (is_complex)
        put_f64(b, v.imag());
    }
  return b;
}

std::string fmt(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_text_atomic(const std::string &path, const std::string &text)
{
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw FormatError("cannot open '" + tmp.string() + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out)
      throw FormatError("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw FormatError("cannot rename onto '" + path + "': " + ec.message());
  }
}

void write_field(const std::string &path, const SpinorField &field)
{
  if (!field.grid())
    throw GridError("cannot write a field without a grid");
  write_text_atomic(path, encode(field.grid(), {field.component(0), field.component(1), field.component(2)}));
}

void write_field(const std::string &path, const std::array<ScalarField, 3> &components)
{
  const auto &grid = components[0].grid();
  for (const auto &c : components)
    require_same_grid(grid, c.grid(), "write_field");
  write_text_atomic(path, encode(grid, {components[0].values(), components[1].values(), components[2].values()}));
}

SpinorField read_field(const std::string &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw FormatError("cannot open field file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string data = ss.str();
  if (data.size() < kHeaderBytes)
    throw FormatError(path + ": truncated field file");
  if (!std::equal(kMagic, kMagic + 4, data.begin()))
    throw FormatError(path + ": bad magic, not an SPN1 field file");
  Reader r(data, path);
  r.bytes(4);
  const auto version = r.u32();
  if (version != kFieldVersion)
    throw FormatError(path + ": unsupported field version " + std::to_string(version));
  const auto dim = r.u32();
  const auto points = r.u32();
  const double half_width = r.f64();
  const auto ncomp = r.u32();
  const auto is_complex = r.bytes(1);
  if (ncomp != 3)
    throw FormatError(path + ": expected 3 components, found " + std::to_string(ncomp));
  if (is_complex > 1)
    throw FormatError(path + ": invalid complex flag");
  GridPtr grid;
  try {
    grid = SpectralGrid::create(static_cast<int>(dim), half_width, static_cast<int>(points));
  } catch (const GridError &e) {
    throw FormatError(path + ": inconsistent grid header: " + e.what());
  }
  const std::size_t expect = 3 * grid->size() * (is_complex ? 16 : 8);
  if (r.remaining() < expect)
    throw FormatError(path + ": truncated field file");
  if (r.remaining() > expect)
    throw FormatError(path + ": trailing bytes after field data; grid header inconsistent");
  SpinorField f(grid);
  for (auto &v : f.data()) {
    const double re = r.f64();
    const double im = is_complex ? r.f64() : 0.0;
    v = cplx(re, im);
  }
  return f;
}

std::string spectrum_csv(const Spectrum &spectrum)
{
  std::vector<std::size_t> order(spectrum.pairs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return spectrum.pairs[a].omega < spectrum.pairs[b].omega; });
  std::string s = "index,omega,residual_plus,residual_minus,norm_check\n";
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto &p = spectrum.pairs[order[k]];
    s += std::to_string(k + 1) + "," + fmt(p.omega) + "," + fmt(p.residual_plus) + "," + fmt(p.residual_minus) +
         "," + fmt(bdg_norm(p.u, p.v)) + "\n";
  }
  return s;
}

void write_spectrum_csv(const std::string &path, const Spectrum &spectrum)
{
  write_text_atomic(path, spectrum_csv(spectrum));
}

std::string convergence_csv(const std::vector<ConvergenceRow> &rows)
{
  std::string s = "dim,phase,N,h,axis,multiplicity,omega_exact,omega,e_omega,e_uv,ground_residual,converged\n";
  for (const auto &row : rows)
    for (const auto &m : row.report.modes)
      s += std::to_string(row.report.dim) + "," + to_string(row.report.phase) + "," +
           std::to_string(row.report.points) + "," + fmt(row.report.h) + "," + std::to_string(m.axis) + "," +
           std::to_string(m.multiplicity) + "," + fmt(m.omega_exact) + "," + fmt(m.omega) + "," + fmt(m.e_omega) +
           "," + fmt(m.e_uv) + "," + fmt(row.ground_residual) + "," +
           (row.ground_converged && row.spectrum_converged ? "1" : "0") + "\n";
  return s;
}

std::string timing_csv(const std::vector<TimingRecord> &records)
{
  std::string s = "dof,nev,seconds,applies\n";
  for (const auto &r : records)
    s += std::to_string(r.dof) + "," + std::to_string(r.nev) + "," + fmt(r.seconds) + "," +
         std::to_string(r.applies) + "\n";
  return s;
}

std::string ground_log(const GroundState &ground)
{
  std::string s;
  s += "phase = " + to_string(ground.params.phase()) + "\n";
  s += "mu_plus = " + fmt(ground.mu.mu[0]) + "\n";
  s += "mu_zero = " + fmt(ground.mu.mu[1]) + "\n";
  s += "mu_minus = " + fmt(ground.mu.mu[2]) + "\n";
  s += "relation_defect = " + fmt(ground.mu.relation_defect()) + "\n";
  s += "residual = " + fmt(ground.residual) + "\n";
  s += "energy = " + fmt(ground.energy) + "\n";
  s += "iterations = " + std::to_string(ground.iterations) + "\n";
  s += "converged = " + std::string(ground.converged ? "1" : "0") + "\n";
  return s;
}

}  // namespace spinbdg
