#pragma once

// Serialization: matrices and scenario results as JSON, result tables as
// CSV, diagnostic SVG plots, grid specs and run configuration files.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "eurlab/error.hpp"
#include "eurlab/experiments.hpp"
#include "eurlab/linalg.hpp"

namespace eurlab {

using Json = nlohmann::ordered_json;

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline double parse_double(const std::string& text, const std::string& what) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || text.empty()) {
    throw Error(ErrorCode::ParseError, what + ": '" + text + "' is not a number");
  }
  return v;
}

/// "start:stop:step" (inclusive; the step is adjusted so the points divide
/// [start, stop] evenly) or a comma-separated list of values.
inline std::vector<double> parse_grid(const std::string& spec) {
  std::vector<std::string> parts;
  const char sep = spec.find(':') != std::string::npos ? ':' : ',';
  std::string field;
  std::istringstream ss(spec);
  while (std::getline(ss, field, sep)) parts.push_back(field);
  if (!spec.empty() && spec.back() == sep) parts.emplace_back();

  std::vector<double> grid;
  if (sep == ':') {
    if (parts.size() != 3) throw Error(ErrorCode::ParseError, "grid range must be start:stop:step");
    const double a = parse_double(parts[0], "grid start");
    const double b = parse_double(parts[1], "grid stop");
    const double h = parse_double(parts[2], "grid step");
    if (!(h > 0.0) || !(b >= a)) throw Error(ErrorCode::ParseError, "grid range needs step > 0 and stop >= start");
    const double steps = std::round((b - a) / h);
    if (steps > 1e6) throw Error(ErrorCode::ParseError, "grid too large");
    grid.push_back(a);
    for (long i = 1; i <= static_cast<long>(steps); ++i) grid.push_back(a + (b - a) * static_cast<double>(i) / steps);
  } else {
    for (const std::string& p : parts) grid.push_back(parse_double(p, "grid value"));
  }
  if (grid.empty()) throw Error(ErrorCode::ParseError, "empty grid");
  return grid;
}

// Matrices: {"basis": ..., "real": [[...]], "imag": [[...]]}, row-major.

template <std::size_t N>
Json matrix_to_json(const Matrix<N>& m, const std::string& basis) {
  Json re = Json::array(), im = Json::array();
  for (std::size_t i = 0; i < N; ++i) {
    Json r = Json::array(), c = Json::array();
    for (std::size_t j = 0; j < N; ++j) {
      r.push_back(m(i, j).real());
      c.push_back(m(i, j).imag());
    }
    re.push_back(r);
    im.push_back(c);
  }
  return Json{{"basis", basis}, {"real", re}, {"imag", im}};
}

template <std::size_t N>
Matrix<N> matrix_from_json(const Json& j, std::string* basis = nullptr) {
  try {
    const std::string b = j.at("basis").get<std::string>();
    if (b != "canonical" && b != "pauli-IXYZ") throw Error(ErrorCode::ParseError, "unknown basis '" + b + "'");
    if (basis) *basis = b;
    const Json& re = j.at("real");
    const Json& im = j.at("imag");
    if (re.size() != N || im.size() != N) throw Error(ErrorCode::ParseError, "matrix has the wrong number of rows");
    Matrix<N> m;
    for (std::size_t r = 0; r < N; ++r) {
      if (re[r].size() != N || im[r].size() != N) throw Error(ErrorCode::ParseError, "matrix row has the wrong size");
      for (std::size_t c = 0; c < N; ++c) m(r, c) = cplx(re[r][c].get<double>(), im[r][c].get<double>());
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("matrix JSON: ") + e.what());
  }
}

inline Json metadata_json(const ScenarioResult& res) {
  const SimConfig& c = res.config;
  Json phases = Json::array();
  if (c.fiber_phases) {
    for (double p : {c.fiber_phases->h1, c.fiber_phases->v1, c.fiber_phases->h2, c.fiber_phases->v2}) phases.push_back(p);
  }
  return Json{{"simulated", res.simulated},
              {"seed", c.seed},
              {"shots", c.shots},
              {"replicas", c.replicas},
              {"noise", c.noise},
              {"fiber_phases", phases}};
}

inline Json result_to_json(const ScenarioResult& res) {
  Json series = Json::array();
  for (const Series& s : res.series) {
    Json j{{"name", s.name}, {"kind", s.simulated() ? "simulated" : "theory"}};
    if (s.simulated()) j["theory"] = s.theory;
    j["values"] = s.values;
    if (s.simulated()) {
      Json std_dev = Json::array(), mean = Json::array(), failed = Json::array();
      for (const ErrorBar& e : s.errors) {
        std_dev.push_back(e.std);
        mean.push_back(e.mean);
        failed.push_back(e.n_failed);
      }
      j["std"] = std_dev;
      j["mc_mean"] = mean;
      j["failed_replicas"] = failed;
    }
    series.push_back(j);
  }
  Json scalars = Json::object();
  for (const auto& [k, v] : res.scalars) scalars[k] = v;
  Json matrices = Json::object();
  for (const NamedMatrix& m : res.matrices) matrices[m.name] = matrix_to_json(m.m, m.basis);

  return Json{{"scenario", res.scenario}, {"grid_name", res.grid_name}, {"grid", res.grid},
              {"metadata", metadata_json(res)}, {"series", series},   {"scalars", scalars},
              {"matrices", matrices}};
}

/// One row per grid point: grid value, then every series value, with a
/// `<name>_std` column after each simulated series.
inline void write_result_csv(std::ostream& os, const ScenarioResult& res) {
  os << res.grid_name;
  for (const Series& s : res.series) {
    os << ',' << s.name;
    if (s.simulated()) os << ',' << s.name << "_std";
  }
  os << '\n';
  for (std::size_t i = 0; i < res.grid.size(); ++i) {
    os << format_double(res.grid[i]);
    for (const Series& s : res.series) {
      os << ',' << format_double(s.values[i]);
      if (s.simulated()) os << ',' << format_double(s.errors[i].std);
    }
    os << '\n';
  }
}

/// Minimal line plot: closed-form series as polylines, simulated series as
/// markers with vertical error-bar ticks.
inline void write_result_svg(std::ostream& os, const ScenarioResult& res) {
  constexpr double W = 720, H = 440, left = 60, right = 200, top = 30, bottom = 50;
  const double pw = W - left - right, ph = H - top - bottom;
  static constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                            "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22"};

  double x0 = *std::min_element(res.grid.begin(), res.grid.end());
  double x1 = *std::max_element(res.grid.begin(), res.grid.end());
  if (x1 <= x0) x1 = x0 + 1.0;
  double y0 = 0.0, y1 = 0.0;
  bool first = true;
  for (const Series& s : res.series)
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      const double e = s.simulated() ? s.errors[i].std : 0.0;
      if (!std::isfinite(s.values[i])) continue;
      if (first) {
        y0 = s.values[i] - e;
        y1 = s.values[i] + e;
        first = false;
      }
      y0 = std::min(y0, s.values[i] - e);
      y1 = std::max(y1, s.values[i] + e);
    }
  if (y1 - y0 < 1e-9) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;

  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + (y1 - y) / (y1 - y0) * ph; };
  char buf[256];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
     << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << left << "\" y=\"18\">" << res.scenario << "</text>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph
     << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = x0 + (x1 - x0) * t / 4.0, yv = y0 + (y1 - y0) * t / 4.0;
    os << "<text x=\"" << num(px(xv)) << "\" y=\"" << num(top + ph + 18) << "\" text-anchor=\"middle\">" << num(xv)
       << "</text>\n";
    os << "<text x=\"" << num(left - 6) << "\" y=\"" << num(py(yv) + 4) << "\" text-anchor=\"end\">" << num(yv)
       << "</text>\n";
  }
  os << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(H - 10) << "\" text-anchor=\"middle\">"
     << res.grid_name << "</text>\n";
  if (y0 < 0.0 && y1 > 0.0) {
    os << "<line x1=\"" << left << "\" y1=\"" << num(py(0.0)) << "\" x2=\"" << left + pw << "\" y2=\"" << num(py(0.0))
       << "\" stroke=\"#cccccc\" stroke-dasharray=\"4 3\"/>\n";
  }

  for (std::size_t k = 0; k < res.series.size(); ++k) {
    const Series& s = res.series[k];
    const char* color = palette[k % std::size(palette)];
    if (!s.simulated()) {
      os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.values.size(); ++i) {
        if (!std::isfinite(s.values[i])) continue;
        os << (i ? " " : "") << num(px(res.grid[i])) << ',' << num(py(s.values[i]));
      }
      os << "\"/>\n";
    } else {
      for (std::size_t i = 0; i < s.values.size(); ++i) {
        if (!std::isfinite(s.values[i])) continue;
        const double x = px(res.grid[i]), e = s.errors[i].std;
        os << "<line x1=\"" << num(x) << "\" y1=\"" << num(py(s.values[i] - e)) << "\" x2=\"" << num(x) << "\" y2=\""
           << num(py(s.values[i] + e)) << "\" stroke=\"" << color << "\"/>\n";
        os << "<circle cx=\"" << num(x) << "\" cy=\"" << num(py(s.values[i])) << "\" r=\"3\" fill=\"" << color
           << "\"/>\n";
      }
    }
    const double ly = top + 14.0 * static_cast<double>(k);
    os << "<rect x=\"" << num(left + pw + 12) << "\" y=\"" << num(ly) << "\" width=\"10\" height=\"10\" fill=\"" << color
       << "\"/>\n";
    os << "<text x=\"" << num(left + pw + 28) << "\" y=\"" << num(ly + 9) << "\">" << s.name << "</text>\n";
  }
  os << "</svg>\n";
}

/// Run configuration read from JSON; absent keys leave defaults untouched.
struct RunConfig {
  std::optional<std::uint64_t> seed;
  std::optional<double> shots;
  std::optional<int> replicas;
  std::optional<std::string> grid;
  std::optional<double> noise;
  std::optional<FiberPhases> fiber_phases;
};

inline RunConfig parse_run_config(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "config must be a JSON object");
  RunConfig c;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "seed") {
        if (!v.is_number_unsigned()) throw Error(ErrorCode::ParseError, "config seed must be a nonnegative integer");
        c.seed = v.get<std::uint64_t>();
      } else if (key == "shots") {
        c.shots = v.get<double>();
      } else if (key == "replicas") {
        if (!v.is_number_integer()) throw Error(ErrorCode::ParseError, "config replicas must be an integer");
        c.replicas = v.get<int>();
      } else if (key == "grid") {
        if (v.is_string()) {
          c.grid = v.get<std::string>();
        } else if (v.is_array()) {
          std::string joined;
          for (const auto& g : v) joined += (joined.empty() ? "" : ",") + format_double(g.get<double>());
          c.grid = joined;
        } else {
          throw Error(ErrorCode::ParseError, "config grid must be a string or an array");
        }
      } else if (key == "noise") {
        c.noise = v.get<double>();
      } else if (key == "fiber_phases") {
        if (!v.is_array() || v.size() != 4) throw Error(ErrorCode::ParseError, "fiber_phases needs 4 numbers");
        c.fiber_phases = FiberPhases{v[0].get<double>(), v[1].get<double>(), v[2].get<double>(), v[3].get<double>()};
      } else {
        throw Error(ErrorCode::ParseError, "unknown config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("config: ") + e.what());
  }
  return c;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open config '" + path + "'");
  try {
    return parse_run_config(Json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, "config '" + path + "': " + e.what());
  }
}

/// Overlays the file values onto `cfg`.
inline void apply_run_config(const RunConfig& file, SimConfig& cfg) {
  if (file.seed) cfg.seed = *file.seed;
  if (file.shots) cfg.shots = *file.shots;
  if (file.replicas) cfg.replicas = *file.replicas;
  if (file.noise) cfg.noise = *file.noise;
  if (file.fiber_phases) cfg.fiber_phases = *file.fiber_phases;
}

}  // namespace eurlab
