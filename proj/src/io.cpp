#include "sklab/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace sklab::io {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open " + tmp.string() + " for writing");
    f << content;
    if (!f) throw Error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

json matrix_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix matrix_from_json(const json& j) {
  const auto n = static_cast<Eigen::Index>(j.size());
  CMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = j.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != n) throw DimensionMismatch("matrix_from_json: ragged rows");
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto& z = row.at(static_cast<std::size_t>(k));
      m(i, k) = cplx(z.at(0).get<double>(), z.at(1).get<double>());
    }
  }
  return m;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s, const std::string& where) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  double v = 0.0;
  const char* first = s.data();
  if (!s.empty() && s[0] == '+') ++first;
  const auto res = std::from_chars(first, s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ConfigError(where + ": not a number: '" + s + "'");
  }
  return v;
}

std::vector<std::pair<int, std::string>> nonblank_lines(const std::string& text) {
  std::vector<std::pair<int, std::string>> lines;
  std::istringstream ss(text);
  std::string line;
  int n = 0;
  while (std::getline(ss, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    lines.emplace_back(n, line);
  }
  return lines;
}

std::string where(const std::string& source, int line, std::size_t col = 0) {
  std::string w = source + ":" + std::to_string(line);
  if (col > 0) w += " column " + std::to_string(col);
  return w;
}

}  // namespace

std::string wigner_csv(const tomography::WignerMap& map) {
  std::string out = "x\\p";
  for (double p : map.ps) out += "," + format_double(p);
  out += "\n";
  for (std::size_t i = 0; i < map.xs.size(); ++i) {
    out += format_double(map.xs[i]);
    for (std::size_t j = 0; j < map.ps.size(); ++j) {
      out += "," + format_double(map.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
    out += "\n";
  }
  return out;
}

tomography::WignerMap parse_wigner_csv(const std::string& text, const std::string& source) {
  const auto lines = nonblank_lines(text);
  if (lines.size() < 2) throw ConfigError(source + ": Wigner CSV needs a header row and at least one data row");
  tomography::WignerMap map;
  const auto header = split_csv_line(lines[0].second);
  if (header.size() < 2) throw ConfigError(where(source, lines[0].first) + ": header has no p values");
  for (std::size_t j = 1; j < header.size(); ++j) {
    map.ps.push_back(parse_number(header[j], where(source, lines[0].first, j + 1)));
  }
  const std::size_t np = map.ps.size();
  map.values = RMatrix(static_cast<Eigen::Index>(lines.size() - 1), static_cast<Eigen::Index>(np));
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split_csv_line(lines[i].second);
    if (cells.size() != np + 1) {
      throw ConfigError(where(source, lines[i].first) + ": expected " + std::to_string(np + 1) +
                        " cells, found " + std::to_string(cells.size()));
    }
    map.xs.push_back(parse_number(cells[0], where(source, lines[i].first, 1)));
    for (std::size_t j = 0; j < np; ++j) {
      const double w = parse_number(cells[j + 1], where(source, lines[i].first, j + 2));
      if (!std::isfinite(w)) throw ConfigError(where(source, lines[i].first, j + 2) + ": non-finite W");
      map.values(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j)) = w;
    }
  }
  return map;
}

tomography::WignerMap read_wigner_csv(const std::filesystem::path& path) {
  return parse_wigner_csv(read_text(path), path.string());
}

std::string trajectory_csv(const std::vector<TrajectoryRow>& rows) {
  std::string out = "t_us,re_a,im_a,n,re_aa,im_aa,v_min,v_max,angle\n";
  for (const auto& r : rows) {
    const double cells[] = {r.t,
                            r.moments.mean_a.real(),
                            r.moments.mean_a.imag(),
                            r.moments.mean_n,
                            r.moments.mean_aa.real(),
                            r.moments.mean_aa.imag(),
                            r.stats.v_min,
                            r.stats.v_max,
                            r.stats.angle};
    for (std::size_t k = 0; k < std::size(cells); ++k) {
      if (k) out += ",";
      out += format_double(cells[k]);
    }
    out += "\n";
  }
  return out;
}

json stats_json(const dynamics::QuadratureStats& s) {
  return {{"v_min", s.v_min},
          {"v_max", s.v_max},
          {"angle", s.angle},
          {"n_thermal", s.n_thermal},
          {"purity", s.purity},
          {"squeezing_dB", dynamics::to_db(s.v_min)}};
}

json reconstruction_json(const tomography::ReconstructionResult& r) {
  json j;
  j["truncation"] = r.truncation;
  j["log_likelihood"] = r.log_likelihood;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["message"] = r.message;
  j["rho"] = matrix_json(r.rho.matrix());
  std::vector<double> pops;
  const RVector p = r.rho.populations();
  for (Eigen::Index k = 0; k < p.size(); ++k) pops.push_back(p[k]);
  j["fock_populations"] = pops;
  if (r.truncation_sensitivity) {
    const auto& ts = *r.truncation_sensitivity;
    j["truncation_sensitivity"] = {
        {"truncations", ts.truncations}, {"v_min", ts.v_min}, {"v_min_spread", ts.v_min_spread}};
  }
  return j;
}

duffing::SpectroscopyDataset parse_spectroscopy_csv(const std::string& text, const std::string& source) {
  const auto lines = nonblank_lines(text);
  if (lines.empty()) throw ConfigError(source + ": empty spectroscopy CSV");
  const auto header = split_csv_line(lines[0].second);
  if (header.size() != 2 || header[0] != "delta_p_MHz" || header[1] != "p_e") {
    throw ConfigError(where(source, lines[0].first) + ": header must be 'delta_p_MHz,p_e'");
  }
  duffing::SpectroscopyDataset d;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split_csv_line(lines[i].second);
    if (cells.size() != 2) {
      throw ConfigError(where(source, lines[i].first) + ": expected 2 cells, found " +
                        std::to_string(cells.size()));
    }
    const double dp = parse_number(cells[0], where(source, lines[i].first, 1));
    const double pe = parse_number(cells[1], where(source, lines[i].first, 2));
    if (!std::isfinite(dp) || !std::isfinite(pe)) {
      throw ConfigError(where(source, lines[i].first) + ": non-finite value");
    }
    d.detunings.push_back(mhz_to_rad_per_us(dp));
    d.qubit_populations.push_back(pe);
  }
  return d;
}

duffing::SpectroscopyDataset read_spectroscopy_csv(const std::filesystem::path& path) {
  return parse_spectroscopy_csv(read_text(path), path.string());
}

std::string spectroscopy_csv(const std::vector<double>& delta_p_mhz, const std::vector<double>& p_e) {
  std::string out = "delta_p_MHz,p_e\n";
  for (std::size_t i = 0; i < delta_p_mhz.size(); ++i) {
    out += format_double(delta_p_mhz[i]) + "," + format_double(p_e[i]) + "\n";
  }
  return out;
}

std::string long_csv(const std::vector<std::string>& axis_names, const std::vector<LongRow>& rows) {
  std::string out;
  for (const auto& a : axis_names) out += a + ",";
  out += "metric,value,status\n";
  for (const auto& r : rows) {
    for (double v : r.axes) out += format_double(v) + ",";
    std::string status = r.status;
    for (char& c : status) {
      if (c == ',' || c == '\n' || c == '"') c = ' ';
    }
    out += r.metric + "," + format_double(r.value) + "," + status + "\n";
  }
  return out;
}

}  // namespace sklab::io
