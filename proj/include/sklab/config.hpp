#pragma once

// Run configuration: a YAML file with frequencies in MHz (kHz where noted)
// and times in us, converted to rad/us at load time. Unknown keys and
// malformed values fail with the offending line.

#include "sklab/duffing.hpp"
#include "sklab/model.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sklab::config {

struct DriveConfig {
  double xi1 = 0.0;
  double xi2 = 0.0;
  double delta_a = mhz_to_rad_per_us(1.5);
  double spacing = mhz_to_rad_per_us(30.0);
  double phi = 0.0;
  // Unset: 2 g^2/Delta_a, or calibrated when the full model runs.
  std::optional<double> delta_correction;
};

struct SimulationConfig {
  std::string model = "effective";  // effective | full
  int qubit_levels = 4;
  int phonon_levels = 25;
  double rtol = 1e-8;
  double atol = 1e-10;
  double t_max = 12.0;
  int n_times = 61;
  std::vector<double> snapshot_times;
  double wigner_extent = 3.0;
  int wigner_points = 41;
  double wigner_rotation = 0.0;  // rad; config in degrees

  // Effective model. Without `derive`, epsilon/kerr/detuning are taken as given.
  bool derive = false;
  double detuning = 0.0;
  double epsilon = 0.0;
  double epsilon_phase = 0.0;
  double kerr = 0.0;
  double decay_time = 0.0;      // 0: no decay
  double dephasing_time = 0.0;  // pure dephasing T_phi, 0: none
  bool inherited_dephasing = false;
  double p_e = 0.0;

  // Full model.
  bool calibrate_delta = true;
  bool stark_shift = true;
  bool decoherence = true;
};

struct TomographyConfig {
  std::filesystem::path wigner_csv;
  int truncation = 15;
  int sensitivity_delta = 2;
  double noise_sigma = 0.0;
  int max_iterations = 5000;
  double ll_rtol = 1e-10;
};

struct SweepAxis {
  std::string name;
  std::vector<double> values;  // config units
};

struct SweepConfig {
  std::string kind;  // squeezing_rate | kerr | kerr_limit | decoherence_limit | measurement_loss
  std::vector<SweepAxis> axes;
  bool simulate = false;            // squeezing_rate: also run the full model per point
  double decay_time = 100.0;        // measurement_loss
  double p_e = 0.0;                 // decoherence_limit
  int kerr_dim = 40;                // kerr_limit
  std::filesystem::path cache_dir;  // empty: <out>/cache
};

struct DuffingConfig {
  std::filesystem::path data_csv;
  double delta_a = 0.0;
  double g_a = 0.0;
  duffing::DuffingParams init;
  duffing::Branch branch = duffing::Branch::lowest;
  double weight_width = 5.0;
  double weight_floor = 0.2;
};

struct DecoherenceLimitConfig {
  double epsilon = 0.0;
  std::vector<double> delta_a;
  double p_e = 0.0;
  bool purcell = true;
  bool inherited_dephasing = true;
};

struct KerrLimitConfig {
  std::vector<double> eps_over_k;
  std::vector<double> gamma_over_k;
  int dim = 40;
};

struct MeasurementLossConfig {
  double v0 = 0.25;
  double decay_time = 100.0;
  std::vector<double> t_meas;
};

struct LimitsConfig {
  std::optional<DecoherenceLimitConfig> decoherence;
  std::optional<KerrLimitConfig> kerr;
  std::optional<MeasurementLossConfig> measurement;
};

struct RunConfig {
  std::uint64_t seed = 0;
  int workers = 0;  // 0: all available threads
  model::DeviceParams device = model::DeviceParams::reference();
  DriveConfig drives;
  SimulationConfig simulation;
  std::optional<TomographyConfig> tomography;
  std::optional<SweepConfig> sweep;
  std::optional<DuffingConfig> duffing;
  std::optional<LimitsConfig> limits;

  // Drive parameters with delta_correction resolved to 2 g^2/Delta_a if unset.
  model::DriveParams drive_params() const;
};

// Relative paths inside the file resolve against `base_dir`.
RunConfig parse_config(const std::string& yaml, const std::filesystem::path& base_dir = ".",
                       const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path);

// Fully resolved configuration in config units (defaults filled in).
nlohmann::json to_json(const RunConfig& cfg);

}  // namespace sklab::config
