// Command-line front end: sklab <simulate|sweep|reconstruct|fit-duffing|limits>
//   --config PATH --out DIR [--seed N] [--workers N]
// Exit codes: 0 ok, 2 configuration error, 3 numerical failure.

#include "sklab/commands.hpp"
#include "sklab/io.hpp"

#include <CLI11.hpp>

#include <iostream>

#include <omp.h>

int main(int argc, char** argv) {
  using namespace sklab;
  CLI::App app{"Squeezing and Kerr dynamics of a qubit-coupled phonon mode"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(commands::kVersion));

  std::string config_path;
  std::string out_dir = ".";
  std::optional<long long> seed;
  std::optional<int> workers;

  const std::vector<std::string> names = {"simulate", "sweep", "reconstruct", "fit-duffing", "limits"};
  for (const auto& name : names) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "YAML run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "overrides the config seed")->check(CLI::NonNegativeNumber);
    sub->add_option("--workers", workers, "worker threads, 0 for all")->check(CLI::NonNegativeNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    auto cfg = config::load_config(config_path);
    if (seed) cfg.seed = static_cast<std::uint64_t>(*seed);
    if (workers) cfg.workers = *workers;
    if (cfg.workers > 0) omp_set_num_threads(cfg.workers);

    commands::json report;
    if (command == "simulate") {
      report = commands::cmd_simulate(cfg, out_dir);
    } else if (command == "sweep") {
      report = commands::cmd_sweep(cfg, out_dir);
    } else if (command == "reconstruct") {
      report = commands::cmd_reconstruct(cfg, out_dir);
    } else if (command == "fit-duffing") {
      report = commands::cmd_fit_duffing(cfg, out_dir);
    } else {
      report = commands::cmd_limits(cfg, out_dir);
    }
    std::cout << commands::json{{"command", command}, {"status", "ok"}, {"out", out_dir}}.dump() << "\n";
    return 0;
  } catch (const std::exception& e) {
    const auto err = commands::error_json(command, e);
    std::cerr << err.dump() << "\n";
    try {
      io::write_text(std::filesystem::path(out_dir) / "error.json", err.dump(2) + "\n");
    } catch (const std::exception&) {
    }
    return commands::exit_code(e);
  }
}
