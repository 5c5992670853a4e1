// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "spinbdg/commands.hpp"
#include "spinbdg/config.hpp"

namespace
{

// Parsed thread hint; the solvers run on one thread and only report it.
int thread_hint(int flag)
{
  if (flag > 0)
    return flag;
  if (const char *env = std::getenv("BDG_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0)
        return n;
    } catch (const std::exception &) {
    }
  }
  return 1;
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Spinor condensate ground states and Bogoliubov-de Gennes spectra"};
  std::string config_path, command, out_dir;
  int threads = 0;
  app.add_option("--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);
  app.add_option("--command", command, "ground, bdg, verify, convergence, perturb or bench (overrides the config)");
  app.add_option("--out", out_dir, "output directory (overrides the config)");
  app.add_option("--threads", threads, "thread count hint; BDG_THREADS is the fallback")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  spinbdg::RunConfig config;
  try {
    if (!config_path.empty())
      config = spinbdg::load_config(config_path);
  } catch (const std::exception &e) {
    std::cerr << spinbdg::error_json(e, command.empty() ? "config" : command) << "\n";
    return 1;
  }
  if (!command.empty())
    config.command = command;
  if (!out_dir.empty())
    config.out_dir = out_dir;
  if (thread_hint(threads) > 1)
    std::cout << "note: thread hint " << thread_hint(threads) << " ignored; running on one thread\n";
  return spinbdg::run_command(config, std::cout, std::cerr);
}
