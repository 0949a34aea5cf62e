#pragma once

// Subcommands of the command-line tool. Each writes its data files into
// `out_dir` and returns the JSON report it also writes there.

#include "sklab/config.hpp"

#include <json.hpp>

#include <exception>
#include <filesystem>
#include <string>

namespace sklab::commands {

using nlohmann::json;

constexpr const char* kVersion = SKLAB_VERSION;

// trajectory.csv, wigner_*.csv, summary.json
json cmd_simulate(const config::RunConfig& cfg, const std::filesystem::path& out_dir);

// sweep.csv (long format), sweep.json; per-point results cached under
// <out_dir>/cache unless sweep.cache_dir is set.
json cmd_sweep(const config::RunConfig& cfg, const std::filesystem::path& out_dir);

// reconstruction.json
json cmd_reconstruct(const config::RunConfig& cfg, const std::filesystem::path& out_dir);

// duffing_fit.json, duffing_curve.csv
json cmd_fit_duffing(const config::RunConfig& cfg, const std::filesystem::path& out_dir);

// decoherence_limit.csv, kerr_limit.csv, measurement_loss.csv, limits.json
json cmd_limits(const config::RunConfig& cfg, const std::filesystem::path& out_dir);

// 2 for configuration and input errors, 3 for numerical failures.
int exit_code(const std::exception& e);
json error_json(const std::string& command, const std::exception& e);

}  // namespace sklab::commands
