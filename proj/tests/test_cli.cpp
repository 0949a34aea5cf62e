#include "sklab/commands.hpp"
#include "sklab/config.hpp"
#include "sklab/io.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>

using namespace sklab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("sklab_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string config_error(const std::string& yaml) {
  try {
    config::parse_config(yaml, ".", "cfg.yaml");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SKLAB_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kZeroDrive = R"(seed: 3
drives:
  xi1: 0.0
  xi2: 0.0
simulation:
  model: effective
  derive: true
  phonon_levels: 8
  t_max_us: 2
  n_times: 5
  snapshot_times_us: [1.0]
  wigner_points: 11
)";

}  // namespace

TEST_CASE("config errors carry source and line") {
  const auto msg = config_error("seed: 1\ndrives:\n  xi1: 0.1\n  bogus: 2\n");
  CHECK(msg.find("cfg.yaml:4") != std::string::npos);
  CHECK(msg.find("bogus") != std::string::npos);
  CHECK_FALSE(config_error("simulation:\n  n_times: -3\n").empty());
  CHECK_FALSE(config_error("sweep:\n  kind: kerr\n  axes:\n    delta_a_mhz: []\n").empty());
  CHECK_FALSE(config_error("sweep:\n  kind: nonsense\n  axes: {}\n").empty());
  CHECK_FALSE(config_error("drives: [1, 2]\n").empty());
}

TEST_CASE("defaults resolve the two-phonon correction") {
  const auto cfg = config::parse_config("drives:\n  xi1: 0.2\n  xi2: 0.1\n");
  const auto d = cfg.drive_params();
  CHECK(d.delta_correction == doctest::Approx(2.0 * cfg.device.g * cfg.device.g / d.delta_a));
  const auto j = config::to_json(cfg);
  CHECK(j["drives"]["delta_a_mhz"].get<double>() == doctest::Approx(1.5));
}

TEST_CASE("CSV round trips") {
  tomography::WignerMap m;
  m.xs = {-1.0, 0.0, 1.0};
  m.ps = {-0.5, 0.5};
  m.values = RMatrix(3, 2);
  m.values << 0.1, -0.2, 1.0 / 3.0, 0.25, 1e-17, 0.0;
  const auto back = io::parse_wigner_csv(io::wigner_csv(m));
  CHECK(back.xs == m.xs);
  CHECK(back.ps == m.ps);
  CHECK((back.values - m.values).norm() == 0.0);
  CHECK_THROWS_AS(io::parse_wigner_csv("x\\p,0\n1,2,3\n"), ConfigError);

  const auto spec = io::parse_spectroscopy_csv(io::spectroscopy_csv({0.01, 0.02}, {0.1, 0.2}));
  CHECK(spec.detunings[1] == doctest::Approx(mhz_to_rad_per_us(0.02)));
  CHECK(spec.qubit_populations[0] == 0.1);
  CHECK_THROWS_AS(io::parse_spectroscopy_csv("a,b\n1,2\n"), ConfigError);
}

TEST_CASE("simulate with zero drive stays in vacuum") {
  const auto out = scratch("zero");
  const auto cfg = config::parse_config(kZeroDrive);
  const auto report = commands::cmd_simulate(cfg, out);
  CHECK(report["command"] == "simulate");
  CHECK(report["final"]["wigner_min"].get<double>() >= 0.0);
  CHECK(report["final"]["stats"]["v_min"].get<double>() == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(fs::exists(out / "trajectory.csv"));
  CHECK(fs::exists(out / "wigner_t1.000us.csv"));
  const auto w = io::read_wigner_csv(out / "wigner_final.csv");
  CHECK(w.values(5, 5) == doctest::Approx(1.0 / kPi).epsilon(1e-8));
}

TEST_CASE("exit codes") {
  CHECK(commands::exit_code(ConfigError("x")) == 2);
  CHECK(commands::exit_code(std::invalid_argument("x")) == 2);
  CHECK(commands::exit_code(InvalidDimension("x")) == 2);
  CHECK(commands::exit_code(NumericalFailure("x")) == 3);
  CHECK(commands::exit_code(SaturationError("x")) == 3);
  const auto j = commands::error_json("simulate", ConfigError("bad"));
  CHECK(j["command"] == "simulate");
}

TEST_CASE("binary: reruns are byte-identical and errors map to exit codes") {
  const auto dir = scratch("bin");
  io::write_text(dir / "ok.yaml", kZeroDrive);
  io::write_text(dir / "bad.yaml", "simulation:\n  unknown_key: 1\n");
  io::write_text(dir / "dim.yaml", "simulation:\n  model: full\n  qubit_levels: 2\n  phonon_levels: 4\n  t_max_us: 0.1\n  n_times: 2\n");

  REQUIRE(run_cli("simulate --config " + (dir / "ok.yaml").string() + " --out " + (dir / "a").string()) == 0);
  REQUIRE(run_cli("simulate --config " + (dir / "ok.yaml").string() + " --out " + (dir / "b").string()) == 0);
  for (const char* f : {"summary.json", "trajectory.csv", "wigner_final.csv"}) {
    CHECK(io::read_text(dir / "a" / f) == io::read_text(dir / "b" / f));
  }
  CHECK(run_cli("simulate --config " + (dir / "bad.yaml").string() + " --out " + (dir / "c").string()) == 2);
  CHECK(fs::exists(dir / "c" / "error.json"));
  CHECK(run_cli("simulate --config " + (dir / "dim.yaml").string() + " --out " + (dir / "d").string()) == 2);
  CHECK(run_cli("simulate --config " + (dir / "missing.yaml").string()) == 2);
  CHECK(run_cli("frobnicate") == 2);
}
