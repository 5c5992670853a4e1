// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "spinbdg/commands.hpp"
#include "spinbdg/config.hpp"
#include "spinbdg/error.hpp"
#include "spinbdg/field_io.hpp"
#include "spinbdg/nullspace.hpp"

using namespace spinbdg;
namespace fs = std::filesystem;

namespace
{

class TempDir
{
public:
  TempDir()
  {
    const auto *info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() / (std::string("spinbdg_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string &name) const { return (path_ / name).string(); }
  std::string str() const { return path_.string(); }

private:
  fs::path path_;
};

std::string slurp(const std::string &path)
{
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string &path, const std::string &bytes)
{
  std::ofstream out(path, std::ios::binary);
  out << bytes;
}

template <class E>
std::string message_of(auto fn)
{
  try {
    fn();
  } catch (const E &e) {
    return e.what();
  }
  return "<no exception>";
}

}  // namespace

TEST(Config, ParsesDocumentedExample)
{
  auto c = parse_config("beta_n = 885.4\nbeta_s = -4.1\nd = 1\nL = 16\nN = 128");
  EXPECT_EQ(c.dim, 1);
  EXPECT_EQ(c.points, 128);
  EXPECT_DOUBLE_EQ(c.half_width, 16.0);
  EXPECT_EQ(c.model().phase(), Phase::ferromagnetic);
  EXPECT_EQ(c.nev, 40);
  EXPECT_DOUBLE_EQ(c.magnetization, 0.0);
  EXPECT_DOUBLE_EQ(c.tol_eig, 1e-10);
  EXPECT_DOUBLE_EQ(c.eps, 0.1);
}

TEST(Config, EmptyFileHasNoPhase)
{
  auto c = parse_config("");
  EXPECT_EQ(c, RunConfig{});
  EXPECT_THROW(c.model(), ConstraintError);
}

TEST(Config, ErrorsCarryLineNumbers)
{
  auto odd = message_of<ConstraintError>([] { parse_config("# grid\nN = 33\n"); });
  EXPECT_NE(odd.find("line 2"), std::string::npos) << odd;
  EXPECT_NE(odd.find("N must be even"), std::string::npos) << odd;
  auto unknown = message_of<FormatError>([] { parse_config("d = 2\nbogus = 1\n"); });
  EXPECT_NE(unknown.find("line 2"), std::string::npos) << unknown;
  auto bad = message_of<FormatError>([] { parse_config("nev = ten\n"); });
  EXPECT_NE(bad.find("line 1"), std::string::npos) << bad;
  EXPECT_THROW(parse_config("d = 4"), ConstraintError);
  EXPECT_THROW(parse_config("M = 1.0"), ConstraintError);
  EXPECT_THROW(parse_config("just words"), FormatError);
  EXPECT_THROW(parse_config("command = dance"), ConstraintError);
}

TEST(Config, SerializationRoundTrips)
{
  RunConfig c;
  c.command = "bdg";
  c.dim = 2;
  c.points = 64;
  c.beta_n = 240.8;
  c.beta_s = 7.5;
  c.gamma = {1.0, 1.0 / 3.0, 2.0};
  c.magnetization = -0.125;
  c.tol_eig = 3.3e-11;
  c.t = 10.6;
  c.out_dir = "results/afm";
  c.ground_in = "in/ground.spn";
  c.sizes = {32, 64, 128};
  c.modes = {1, 4};
  EXPECT_EQ(parse_config(serialize_config(c)), c);
  EXPECT_EQ(parse_config(serialize_config(RunConfig{})), RunConfig{});
  EXPECT_EQ(config_keys().size(), 19u);
}

TEST(FieldIo, RoundTripIsBitIdentical)
{
  TempDir dir;
  auto g = SpectralGrid::create(2, 3.5, 8);
  SpinorField real = random_real_field(g, 5);
  SpinorField cplx_field = real;
  axpy(cplx(0.0, 1.0), random_real_field(g, 6), cplx_field);
  for (const SpinorField *f : {&real, &cplx_field}) {
    write_field(dir.file("f.spn"), *f);
    SpinorField back = read_field(dir.file("f.spn"));
    EXPECT_TRUE(back.grid()->same_as(*g));
    ASSERT_EQ(back.data().size(), f->data().size());
    for (std::size_t i = 0; i < back.data().size(); ++i)
      EXPECT_EQ(back.data()[i], f->data()[i]);
  }
  // Real data is stored without imaginary parts: 4+4+4+4+8+4+1 header bytes.
  write_field(dir.file("r.spn"), real);
  EXPECT_EQ(fs::file_size(dir.file("r.spn")), 29u + 3u * 64u * 8u);
  EXPECT_FALSE(fs::exists(dir.file("r.spn.tmp")));
}

TEST(FieldIo, RejectsCorruptFiles)
{
  TempDir dir;
  auto g = SpectralGrid::create(1, 2.0, 8);
  write_field(dir.file("ok.spn"), random_real_field(g, 1));
  const std::string bytes = slurp(dir.file("ok.spn"));

  std::string magic = bytes;
  magic[0] = 'X';
  spit(dir.file("magic.spn"), magic);
  EXPECT_THROW(read_field(dir.file("magic.spn")), FormatError);

  std::string version = bytes;
  version[4] = 2;
  spit(dir.file("version.spn"), version);
  EXPECT_THROW(read_field(dir.file("version.spn")), FormatError);

  spit(dir.file("short.spn"), bytes.substr(0, bytes.size() - 3));
  EXPECT_THROW(read_field(dir.file("short.spn")), FormatError);

  spit(dir.file("long.spn"), bytes + "xx");
  EXPECT_THROW(read_field(dir.file("long.spn")), FormatError);

  std::string odd = bytes;
  odd[12] = 7;  // N = 7
  spit(dir.file("odd.spn"), odd);
  EXPECT_THROW(read_field(dir.file("odd.spn")), FormatError);

  EXPECT_THROW(read_field(dir.file("missing.spn")), FormatError);
}

TEST(FieldIo, SpectrumCsv)
{
  EXPECT_EQ(spectrum_csv(Spectrum{}), "index,omega,residual_plus,residual_minus,norm_check\n");
  auto g = SpectralGrid::create(1, 2.0, 8);
  SpinorField u = random_real_field(g, 1);
  SpinorField v(g);
  Spectrum s;
  s.pairs.push_back({2.0, u, v, 1e-12, 2e-12});
  s.pairs.push_back({1.0, u, v, 3e-12, 4e-12});
  const std::string csv = spectrum_csv(s);
  std::istringstream lines(csv);
  std::string header, first, second;
  std::getline(lines, header);
  std::getline(lines, first);
  std::getline(lines, second);
  EXPECT_EQ(first.substr(0, 4), "1,1,");
  EXPECT_EQ(second.substr(0, 4), "2,2,");
  // 17 significant digits round-trip exactly.
  std::istringstream fields(first);
  std::string cell;
  std::vector<std::string> cells;
  while (std::getline(fields, cell, ','))
    cells.push_back(cell);
  ASSERT_EQ(cells.size(), 5u);
  EXPECT_EQ(std::stod(cells[2]), 3e-12);
  EXPECT_EQ(std::stod(cells[3]), 4e-12);
}

TEST(Commands, UnknownCommandGivesJsonError)
{
  TempDir dir;
  RunConfig c;
  c.command = "dance";
  c.out_dir = dir.str();
  std::ostringstream out, err;
  EXPECT_EQ(run_command(c, out, err), 1);
  EXPECT_EQ(err.str(), R"({"command":"dance","error":"constraint","message":"unknown command 'dance'"})"
                       "\n");
}

TEST(Commands, MissingPhaseIsReported)
{
  TempDir dir;
  RunConfig c;
  c.command = "ground";
  c.out_dir = dir.str();
  std::ostringstream out, err;
  EXPECT_EQ(run_command(c, out, err), 1);
  EXPECT_NE(err.str().find(R"("error":"constraint")"), std::string::npos);
}

TEST(Commands, GroundStateFileReproducesChemicalPotentials)
{
  TempDir dir;
  RunConfig c = parse_config("command = ground\nbeta_n = 40\nbeta_s = -2\nN = 64\n");
  c.out_dir = dir.str();
  std::ostringstream out, err;
  ASSERT_EQ(run_command(c, out, err), 0) << err.str();
  const std::string log = slurp(dir.file("ground_log.txt"));
  auto value = [&](const std::string &key) {
    const auto at = log.find(key + " = ");
    return std::stod(log.substr(at + key.size() + 3));
  };
  auto gs = evaluate_ground_state(read_field(dir.file("ground.spn")), c.model(),
                                  Potential::make_harmonic(SpectralGrid::create(1, 16.0, 64), c.gamma));
  EXPECT_NEAR(gs.mu.mu[0], value("mu_plus"), 1e-12);
  EXPECT_NEAR(gs.mu.mu[1], value("mu_zero"), 1e-12);
  EXPECT_NEAR(gs.mu.mu[2], value("mu_minus"), 1e-12);

  // bdg can start from the stored state; a mismatched grid is refused.
  c.command = "bdg";
  c.ground_in = dir.file("ground.spn");
  c.nev = 4;
  ASSERT_EQ(run_command(c, out, err), 0) << err.str();
  EXPECT_TRUE(fs::exists(dir.file("spectrum.csv")));
  c.points = 32;
  EXPECT_EQ(run_command(c, out, err), 1);
}

TEST(Commands, VerifyLinearOscillatorPassesAndPrintsLadder)
{
  TempDir dir;
  RunConfig c = parse_config("command = verify\nbeta_n = 0\nbeta_s = 0\nN = 32\nL = 8\nnev = 6\n");
  c.out_dir = dir.str();
  std::ostringstream out, err;
  EXPECT_EQ(run_command(c, out, err), 0) << out.str() << err.str();
  EXPECT_EQ(out.str().find("FAIL"), std::string::npos) << out.str();
  EXPECT_NE(out.str().find("spectrum: 1 1 1 2 2 2"), std::string::npos) << out.str();
}
