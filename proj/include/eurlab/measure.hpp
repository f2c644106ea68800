#pragma once

// Simulated coincidence counting: Born probabilities for product settings,
// Poisson count sampling, count-based estimators and the counts CSV format.

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "eurlab/error.hpp"
#include "eurlab/quantify.hpp"
#include "eurlab/rng.hpp"

namespace eurlab {

/// Observable measured on A and on B. Outcomes are ordered
/// (a0 b0, a0 b1, a1 b0, a1 b1).
struct MeasurementSetting {
  Observable obs_a;
  Observable obs_b;
  std::string label;

  MeasurementSetting(Observable a, Observable b) : obs_a(std::move(a)), obs_b(std::move(b)) {
    label = obs_a.code() + obs_b.code();
  }

  Vec4 outcome_vector(std::size_t k) const {
    return tensor_product(obs_a.eigenvector(k / 2).amplitudes(), obs_b.eigenvector(k % 2).amplitudes());
  }
};

using Probabilities = std::array<double, 4>;

/// Four outcome weights for one setting. Counts are integers; weights are
/// real so exact (infinite-count) probabilities can be fed to the same
/// estimators.
using OutcomeWeights = std::array<double, 4>;

struct CountRow {
  MeasurementSetting setting;
  std::array<std::uint64_t, 4> counts{};

  std::uint64_t total() const { return counts[0] + counts[1] + counts[2] + counts[3]; }

  OutcomeWeights weights() const {
    return {double(counts[0]), double(counts[1]), double(counts[2]), double(counts[3])};
  }
};

struct CountTable {
  std::vector<CountRow> rows;

  const CountRow* find(const std::string& label) const {
    for (const CountRow& r : rows)
      if (r.setting.label == label) return &r;
    return nullptr;
  }
};

/// p_ij = <a_i b_j| rho |a_i b_j>
inline Probabilities born_probabilities(const TwoQubitDensity& rho, const MeasurementSetting& setting) {
  Probabilities p;
  for (std::size_t k = 0; k < 4; ++k) p[k] = std::max(0.0, expectation(rho.matrix(), setting.outcome_vector(k)));
  return p;
}

/// Independent Poisson(mean_total * p_ij) count per outcome; the total
/// fluctuates as in free-running coincidence counting.
inline std::array<std::uint64_t, 4> sample_counts(const Probabilities& probs, double mean_total, std::uint64_t seed) {
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw Error(ErrorCode::DomainError, "negative probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw Error(ErrorCode::DomainError, "probabilities do not sum to 1");
  if (!(mean_total > 0.0)) throw Error(ErrorCode::DomainError, "mean_total must be positive");
  CounterRng rng(seed);
  std::array<std::uint64_t, 4> n{};
  for (std::size_t k = 0; k < 4; ++k) n[k] = poisson(rng, mean_total * probs[k]);
  return n;
}

/// Samples every setting of a plan from `rho`; setting k uses stream
/// derive_stream(seed, {k}).
inline CountTable simulate_counts(const TwoQubitDensity& rho, const std::vector<MeasurementSetting>& plan,
                                  double mean_total, std::uint64_t seed) {
  CountTable t;
  t.rows.reserve(plan.size());
  for (std::size_t k = 0; k < plan.size(); ++k) {
    t.rows.push_back({plan[k], sample_counts(born_probabilities(rho, plan[k]), mean_total, derive_stream(seed, {k}))});
  }
  return t;
}

/// (N_01 + N_10) / N
inline double estimate_disagreement(const OutcomeWeights& n) {
  const double total = n[0] + n[1] + n[2] + n[3];
  if (!(total > 0.0)) throw Error(ErrorCode::EmptyCounts, "setting has no counts");
  return (n[1] + n[2]) / total;
}
inline double estimate_disagreement(const CountRow& row) { return estimate_disagreement(row.weights()); }

/// H(joint) - H(B marginal) of the empirical outcome distribution: the
/// count-based H(R|R) when the same observable is measured on both photons.
inline double empirical_conditional_entropy(const OutcomeWeights& n) {
  const double total = n[0] + n[1] + n[2] + n[3];
  if (!(total > 0.0)) throw Error(ErrorCode::EmptyCounts, "setting has no counts");
  const std::array<double, 2> b_marginal{n[0] + n[2], n[1] + n[3]};
  return shannon_entropy(n) - shannon_entropy(b_marginal);
}
inline double empirical_conditional_entropy(const CountRow& row) { return empirical_conditional_entropy(row.weights()); }

// Counts CSV: header `setting,outcome_a,outcome_b,count`, four rows per
// setting in outcome order. Setting labels concatenate basis codes of A and B.

namespace detail {

inline Observable observable_from_code(const std::string& code) {
  if (code == "X") return sigma_x();
  if (code == "Y") return sigma_y();
  if (code == "Z") return sigma_z();
  if (code.size() > 1 && code[0] == 'T') {
    double deg = 0.0;
    const char* first = code.data() + 1;
    const char* last = code.data() + code.size();
    auto [ptr, ec] = std::from_chars(first, last, deg);
    if (ec == std::errc() && ptr == last) return rotated_observable(deg);
  }
  throw Error(ErrorCode::ParseError, "unknown basis code '" + code + "'");
}

inline std::vector<std::string> split_label(const std::string& label) {
  std::vector<std::string> codes;
  std::size_t i = 0;
  while (i < label.size()) {
    std::size_t j = i + 1;
    if (label[i] == 'T') {
      while (j < label.size() && label[j] != 'X' && label[j] != 'Y' && label[j] != 'Z' && label[j] != 'T') ++j;
    }
    codes.push_back(label.substr(i, j - i));
    i = j;
  }
  return codes;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace detail

inline MeasurementSetting setting_from_label(const std::string& label) {
  const auto codes = detail::split_label(label);
  if (codes.size() != 2) throw Error(ErrorCode::ParseError, "setting label '" + label + "' must name two bases");
  MeasurementSetting s(detail::observable_from_code(codes[0]), detail::observable_from_code(codes[1]));
  s.label = label;
  return s;
}

inline void write_counts_csv(std::ostream& os, const CountTable& table) {
  os << "setting,outcome_a,outcome_b,count\n";
  for (const CountRow& row : table.rows) {
    for (std::size_t k = 0; k < 4; ++k) {
      os << row.setting.label << ',' << row.setting.obs_a.token(k / 2) << ',' << row.setting.obs_b.token(k % 2) << ','
         << row.counts[k] << '\n';
    }
  }
}

inline CountTable read_counts_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorCode::ParseError, "empty counts file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "setting,outcome_a,outcome_b,count") throw Error(ErrorCode::ParseError, "bad header '" + line + "'");

  CountTable table;
  std::map<std::string, std::size_t> index;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    const std::string where = " (line " + std::to_string(lineno) + ")";
    if (f.size() != 4) throw Error(ErrorCode::ParseError, "expected 4 fields" + where);
    auto it = index.find(f[0]);
    if (it == index.end()) {
      it = index.emplace(f[0], table.rows.size()).first;
      table.rows.push_back({setting_from_label(f[0]), {}});
    }
    CountRow& row = table.rows[it->second];
    std::size_t ia = 2, ib = 2;
    for (std::size_t i = 0; i < 2; ++i) {
      if (row.setting.obs_a.token(i) == f[1]) ia = i;
      if (row.setting.obs_b.token(i) == f[2]) ib = i;
    }
    if (ia == 2 || ib == 2) throw Error(ErrorCode::ParseError, "outcome tokens do not match setting" + where);
    std::uint64_t n = 0;
    auto [ptr, ec] = std::from_chars(f[3].data(), f[3].data() + f[3].size(), n);
    if (ec != std::errc() || ptr != f[3].data() + f[3].size()) {
      throw Error(ErrorCode::ParseError, "count is not a nonnegative integer" + where);
    }
    row.counts[2 * ia + ib] = n;
  }
  return table;
}

}  // namespace eurlab
