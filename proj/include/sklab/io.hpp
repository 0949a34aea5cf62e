#pragma once

// File formats: Wigner maps and trajectories as CSV, reconstructions and
// reports as JSON (complex numbers as [re, im]), spectroscopy data as CSV.

#include "sklab/duffing.hpp"
#include "sklab/dynamics.hpp"
#include "sklab/tomography.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace sklab::io {

using json = nlohmann::json;

// Shortest round-trip decimal form; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double v);

// Writes through a temporary file and renames it into place.
void write_text(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);

json complex_json(cplx z);
json matrix_json(const CMatrix& m);
CMatrix matrix_from_json(const json& j);

// First row: a label cell then the ps grid; each following row: x, then W(x, p).
std::string wigner_csv(const tomography::WignerMap& map);
tomography::WignerMap parse_wigner_csv(const std::string& text, const std::string& source = "<string>");
tomography::WignerMap read_wigner_csv(const std::filesystem::path& path);

struct TrajectoryRow {
  double t = 0.0;
  dynamics::Moments moments;
  dynamics::QuadratureStats stats;
};
std::string trajectory_csv(const std::vector<TrajectoryRow>& rows);

json stats_json(const dynamics::QuadratureStats& s);
json reconstruction_json(const tomography::ReconstructionResult& r);

// Columns delta_p_MHz, p_e (header required). Detunings are returned in rad/us.
duffing::SpectroscopyDataset parse_spectroscopy_csv(const std::string& text,
                                                    const std::string& source = "<string>");
duffing::SpectroscopyDataset read_spectroscopy_csv(const std::filesystem::path& path);
std::string spectroscopy_csv(const std::vector<double>& delta_p_mhz, const std::vector<double>& p_e);

// Long format: axis columns, then metric, value, status.
struct LongRow {
  std::vector<double> axes;
  std::string metric;
  double value = 0.0;
  std::string status = "ok";
};
std::string long_csv(const std::vector<std::string>& axis_names, const std::vector<LongRow>& rows);

}  // namespace sklab::io
