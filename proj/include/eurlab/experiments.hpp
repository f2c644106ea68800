#pragma once

// Figure-level scenarios: sweeps over the mixing ratio x or the measurement
// angle theta with closed-form curves, simulated count data, tomographic
// reconstruction and Monte Carlo error bars.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eurlab/error.hpp"
#include "eurlab/measure.hpp"
#include "eurlab/quantify.hpp"
#include "eurlab/rng.hpp"
#include "eurlab/states.hpp"
#include "eurlab/stats.hpp"
#include "eurlab/tomography.hpp"
#include "eurlab/uncertainty.hpp"

namespace eurlab {

enum class Scenario { Fig2, Fig3, Fig4, Fig5 };

constexpr std::string_view scenario_name(Scenario s) {
  switch (s) {
    case Scenario::Fig2: return "fig2";
    case Scenario::Fig3: return "fig3";
    case Scenario::Fig4: return "fig4";
    case Scenario::Fig5: return "fig5";
  }
  return "?";
}

inline Scenario parse_scenario(std::string_view name) {
  for (Scenario s : {Scenario::Fig2, Scenario::Fig3, Scenario::Fig4, Scenario::Fig5})
    if (scenario_name(s) == name) return s;
  throw Error(ErrorCode::DomainError, "unknown scenario '" + std::string(name) + "'");
}

/// Concurrence of the state prepared for the memory experiment.
inline constexpr double kMemoryStateConcurrence = 0.921;
/// Process fidelity the memory noise is calibrated to.
inline constexpr double kMemoryProcessFidelity = 0.983;

struct SimConfig {
  std::uint64_t seed = 1;
  /// Mean coincidence counts per measurement setting.
  double shots = 6000.0;
  int replicas = kDefaultReplicas;
  /// Depolarizing weight of the memory channel.
  double noise = noise_for_process_fidelity(kMemoryProcessFidelity);
  /// Drawn from the seed (matched fibers) when absent.
  std::optional<FiberPhases> fiber_phases;
  /// Worker threads over grid points; 0 means one per hardware thread.
  unsigned threads = 0;
};

struct Series {
  std::string name;
  std::vector<double> values;
  /// One Monte Carlo error bar per grid point; empty for closed-form curves.
  std::vector<ErrorBar> errors;
  /// Name of the closed-form series a simulated series estimates.
  std::string theory;

  bool simulated() const { return !errors.empty(); }
};

struct NamedMatrix {
  std::string name;
  /// "canonical" or "pauli-IXYZ"
  std::string basis;
  Mat4 m;
};

struct ScenarioResult {
  std::string scenario;
  /// "x" or "theta_deg"
  std::string grid_name;
  std::vector<double> grid;
  std::vector<Series> series;
  std::vector<std::pair<std::string, double>> scalars;
  std::vector<NamedMatrix> matrices;
  bool simulated = false;
  /// Configuration with the fiber phases resolved.
  SimConfig config;

  const Series& get(std::string_view name) const {
    for (const Series& s : series)
      if (s.name == name) return s;
    throw Error(ErrorCode::DomainError, "no series '" + std::string(name) + "'");
  }

  double scalar(std::string_view name) const {
    for (const auto& [k, v] : scalars)
      if (k == name) return v;
    throw Error(ErrorCode::DomainError, "no scalar '" + std::string(name) + "'");
  }
};

/// x in {0, 0.1, ..., 1}; theta in {0, 5, ..., 45} merged with {35, ..., 41}.
inline std::vector<double> default_grid(Scenario s) {
  std::vector<double> g;
  if (s != Scenario::Fig5) {
    for (int i = 0; i <= 10; ++i) g.push_back(i / 10.0);
    return g;
  }
  for (int d = 0; d <= 45; ++d)
    if (d % 5 == 0 || (d >= 35 && d <= 41)) g.push_back(d);
  return g;
}

/// Angle in [0, 45] degrees where log2(1/c(theta)) + h_ab changes sign.
inline double find_bound_threshold(double h_ab) {
  if (std::isnan(h_ab) || h_ab < -1.0) throw Error(ErrorCode::DomainError, "H(A|B) below -1");
  if (h_ab >= 0.0) throw Error(ErrorCode::NoRoot, "bound is nonnegative for every angle");
  double lo = 0.0, hi = 45.0;
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    (rotated_bound(mid, h_ab) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

namespace detail {

inline SimConfig resolve(SimConfig cfg) {
  if (!cfg.fiber_phases) {
    CounterRng rng(derive_stream(cfg.seed, {0xF1BE5}));
    const double h = 2.0 * std::numbers::pi * rng.uniform();
    const double v = 2.0 * std::numbers::pi * rng.uniform();
    cfg.fiber_phases = FiberPhases::matched(h, v);
  }
  if (cfg.threads == 0) cfg.threads = std::max(1u, std::thread::hardware_concurrency());
  return cfg;
}

inline void check_grid(const std::vector<double>& grid, double lo, double hi) {
  if (grid.empty()) throw Error(ErrorCode::DomainError, "empty grid");
  for (double g : grid)
    if (!(g >= lo && g <= hi)) throw Error(ErrorCode::DomainError, "grid value outside its range");
}

inline void check_sim(const SimConfig& cfg) {
  if (!(cfg.shots > 0.0)) throw Error(ErrorCode::DomainError, "shots must be positive");
  if (cfg.replicas < 2) throw Error(ErrorCode::DomainError, "need at least 2 replicas");
}

/// Rows of `t` that belong to the nine-setting tomography plan.
inline TomographyData tomography_rows(const CountTable& t) {
  TomographyData d;
  for (const MeasurementSetting& s : tomography_plan()) {
    if (const CountRow* r = t.find(s.label)) d.push_back({r->setting, r->weights()});
  }
  return d;
}

inline TwoQubitDensity reconstruct(const CountTable& t) { return state_mle(tomography_rows(t)).state; }

inline double count_witness(const CountTable& t) {
  const CountRow* xx = t.find("XX");
  const CountRow* zz = t.find("ZZ");
  if (!xx || !zz) throw Error(ErrorCode::MissingSetting, "witness needs XX and ZZ");
  return fano_witness(estimate_disagreement(*xx), estimate_disagreement(*zz));
}

inline double state_witness(const TwoQubitDensity& rho) {
  return fano_witness(predicted_disagreement(rho, sigma_x()), predicted_disagreement(rho, sigma_z()));
}

/// Simulated values and error bars for one grid point.
struct Point {
  std::vector<double> values;
  std::vector<ErrorBar> errors;
};

inline Point simulate_point(const CountTable& table, const VectorStatistic& stat, const SimConfig& cfg,
                            std::uint64_t point_stream) {
  Point p;
  p.values = stat(table);
  p.errors = mc_error_bars(table, stat, cfg.replicas, derive_stream(point_stream, {1}), 1);
  return p;
}

inline Series theory_series(std::string name, std::vector<double> values) {
  return {std::move(name), std::move(values), {}, {}};
}

/// Runs `point(i)` for every grid index and appends one simulated series per
/// statistic component, named `names[k]` and tied to `theories[k]`.
template <class PointFn>
void add_simulated(ScenarioResult& res, const std::vector<std::string>& names,
                   const std::vector<std::string>& theories, PointFn&& point) {
  std::vector<Point> pts(res.grid.size());
  parallel_for(pts.size(), [&](std::size_t i) { pts[i] = point(i); }, res.config.threads);
  for (std::size_t k = 0; k < names.size(); ++k) {
    Series s{names[k], {}, {}, theories[k]};
    for (const Point& p : pts) {
      s.values.push_back(p.values.at(k));
      s.errors.push_back(p.errors.at(k));
    }
    res.series.push_back(std::move(s));
  }
  res.simulated = true;
}

inline std::uint64_t point_stream(const SimConfig& cfg, Scenario s, std::size_t i) {
  return derive_stream(cfg.seed, {static_cast<std::uint64_t>(s) + 2, i});
}

inline TwoQubitDensity memory_input_state() { return memory_experiment_state(kMemoryStateConcurrence); }

inline Channel memory_channel(const SimConfig& cfg) { return spin_echo_memory(*cfg.fiber_phases, cfg.noise); }

/// Process fidelity to the identity of the chi matrix reconstructed from
/// ancilla-assisted tomography counts (channel on B).
inline ChiMatrix chi_from_choi_counts(const TomographyData& data) {
  const auto choi = state_mle(data).state;
  const auto inputs = process_tomography_inputs();
  return chi_project_physical(process_chi_reconstruct(inputs, outputs_from_choi(choi, inputs)));
}

inline double count_direct_entropy(const CountTable& t, const std::string& r_label) {
  const CountRow* rr = t.find(r_label);
  const CountRow* zz = t.find("ZZ");
  if (!rr || !zz) throw Error(ErrorCode::MissingSetting, "direct route needs " + r_label + " and ZZ");
  return empirical_conditional_entropy(*rr) + empirical_conditional_entropy(*zz);
}

}  // namespace detail

/// Closed-form curves of one scenario.
inline ScenarioResult theory_scenario(Scenario s, const std::vector<double>& grid, const SimConfig& config = {}) {
  ScenarioResult res;
  res.scenario = scenario_name(s);
  res.grid = grid;
  res.config = detail::resolve(config);
  const std::size_t n = grid.size();

  if (s != Scenario::Fig5) {
    detail::check_grid(grid, 0.0, 1.0);
    res.grid_name = "x";
    const bool first = s != Scenario::Fig4;
    auto state = [&](double x) { return first ? bds_rho1(x) : bds_rho2(x); };
    std::vector<double> lhs(n), rhs(n), witness(n), neg(n), conc(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto rho = state(grid[i]);
      const auto rep = berta_relation(rho, sigma_x(), sigma_z());
      lhs[i] = rep.lhs;
      rhs[i] = rep.rhs;
      witness[i] = detail::state_witness(rho);
      neg[i] = -witness[i];
      conc[i] = concurrence(rho);
    }
    if (s != Scenario::Fig3) {
      res.series.push_back(detail::theory_series("lhs_theory", lhs));
      res.series.push_back(detail::theory_series("rhs_theory", rhs));
    }
    if (s != Scenario::Fig2) {
      res.series.push_back(detail::theory_series("witness_theory", witness));
      res.series.push_back(detail::theory_series("neg_witness_theory", neg));
      res.series.push_back(detail::theory_series("concurrence_theory", conc));
    }
    return res;
  }

  detail::check_grid(grid, 0.0, 45.0);
  res.grid_name = "theta_deg";
  const auto prepared = detail::memory_input_state();
  const Channel memory = detail::memory_channel(res.config);
  const auto stored = memory.apply_on_b(prepared);
  const double h_prepared = conditional_entropy(prepared);
  const double h_stored = conditional_entropy(stored);

  std::vector<double> lhs(n), direct(n), bound(n), unclamped(n), bound_stored(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Observable r = rotated_observable(grid[i]);
    lhs[i] = berta_relation(stored, r, sigma_z()).lhs;
    direct[i] = empirical_conditional_entropy(born_probabilities(stored, MeasurementSetting(r, r))) +
                empirical_conditional_entropy(born_probabilities(stored, MeasurementSetting(sigma_z(), sigma_z())));
    unclamped[i] = rotated_bound(grid[i], h_prepared);
    bound[i] = fig5_bound(grid[i], h_prepared);
    bound_stored[i] = fig5_bound(grid[i], h_stored);
  }
  res.series.push_back(detail::theory_series("lhs_theory", lhs));
  res.series.push_back(detail::theory_series("direct_theory", direct));
  res.series.push_back(detail::theory_series("bound_theory", bound));
  res.series.push_back(detail::theory_series("bound_unclamped_theory", unclamped));
  res.series.push_back(detail::theory_series("bound_stored_theory", bound_stored));

  const ChiMatrix chi = channel_chi(memory);
  const ProcessFidelity f = process_fidelity(chi, ChiMatrix::identity_process());
  res.scalars = {{"concurrence_prepared", concurrence(prepared)},
                 {"h_ab_prepared", h_prepared},
                 {"h_ab_stored", h_stored},
                 {"process_fidelity_theory", f.fidelity},
                 {"root_process_fidelity_theory", f.root_fidelity}};
  if (h_prepared < 0.0) res.scalars.emplace_back("theta_star", find_bound_threshold(h_prepared));
  if (h_stored < 0.0) res.scalars.emplace_back("theta_star_stored", find_bound_threshold(h_stored));
  res.matrices.push_back({"chi_theory", "pauli-IXYZ", chi.m});
  return res;
}

/// Entropic relation for rho_1(x) with sigma_x, sigma_z: closed forms plus
/// values from maximum-likelihood tomography of simulated counts.
inline ScenarioResult run_fig2(const std::vector<double>& grid, const SimConfig& config) {
  detail::check_sim(config);
  ScenarioResult res = theory_scenario(Scenario::Fig2, grid, config);
  const auto plan = tomography_plan();
  const double bound_bits = complementarity(sigma_x(), sigma_z()).bound_bits;
  const VectorStatistic stat = [&](const CountTable& t) {
    const auto rho = detail::reconstruct(t);
    return std::vector<double>{berta_relation(rho, sigma_x(), sigma_z()).lhs, bound_bits + conditional_entropy(rho)};
  };
  detail::add_simulated(res, {"lhs_sim", "rhs_sim"}, {"lhs_theory", "rhs_theory"}, [&](std::size_t i) {
    const auto stream = detail::point_stream(res.config, Scenario::Fig2, i);
    const auto table = simulate_counts(bds_rho1(grid[i]), plan, res.config.shots, derive_stream(stream, {0}));
    return detail::simulate_point(table, stat, res.config, stream);
  });
  return res;
}

namespace detail {

/// Witness from the XX and ZZ rows alone, concurrence and witness of the
/// reconstructed state, and optionally the entropic relation.
inline ScenarioResult run_witness_scenario(Scenario s, const std::vector<double>& grid, const SimConfig& config) {
  check_sim(config);
  ScenarioResult res = theory_scenario(s, grid, config);
  const bool with_entropies = s == Scenario::Fig4;
  const auto plan = tomography_plan();
  const VectorStatistic stat = [&](const CountTable& t) {
    const double w = count_witness(t);
    const auto rho = reconstruct(t);
    std::vector<double> v{w, -w, concurrence(rho), state_witness(rho)};
    if (with_entropies) {
      const auto rep = berta_relation(rho, sigma_x(), sigma_z());
      v.push_back(rep.lhs);
      v.push_back(rep.rhs);
    }
    return v;
  };
  std::vector<std::string> names{"witness_sim", "neg_witness_sim", "concurrence_sim", "witness_from_state_sim"};
  std::vector<std::string> theories{"witness_theory", "neg_witness_theory", "concurrence_theory", "witness_theory"};
  if (with_entropies) {
    names.insert(names.end(), {"lhs_sim", "rhs_sim"});
    theories.insert(theories.end(), {"lhs_theory", "rhs_theory"});
  }
  add_simulated(res, names, theories, [&](std::size_t i) {
    const auto stream = point_stream(res.config, s, i);
    const auto rho = s == Scenario::Fig3 ? bds_rho1(grid[i]) : bds_rho2(grid[i]);
    const auto table = simulate_counts(rho, plan, res.config.shots, derive_stream(stream, {0}));
    return simulate_point(table, stat, res.config, stream);
  });
  return res;
}

}  // namespace detail

/// Two-setting witness against tomographic concurrence for rho_1(x).
inline ScenarioResult run_fig3(const std::vector<double>& grid, const SimConfig& config) {
  return detail::run_witness_scenario(Scenario::Fig3, grid, config);
}

/// rho_2(x): entropic relation with equality, witness and concurrence.
inline ScenarioResult run_fig4(const std::vector<double>& grid, const SimConfig& config) {
  return detail::run_witness_scenario(Scenario::Fig4, grid, config);
}

/// Memory experiment: R(theta) and sigma_z on the Werner-model state with
/// qubit B stored in the noisy spin-echo memory. Each angle gets its own
/// nine-setting tomography plus R(theta)R(theta) counts for the direct route.
inline ScenarioResult run_fig5(const std::vector<double>& grid, const SimConfig& config) {
  detail::check_sim(config);
  ScenarioResult res = theory_scenario(Scenario::Fig5, grid, config);
  const Channel memory = detail::memory_channel(res.config);
  const auto stored = memory.apply_on_b(detail::memory_input_state());
  const auto plan = tomography_plan();

  detail::add_simulated(res, {"lhs_sim", "direct_sim"}, {"lhs_theory", "direct_theory"}, [&](std::size_t i) {
    const Observable r = rotated_observable(grid[i]);
    std::vector<MeasurementSetting> settings = plan;
    settings.emplace_back(r, r);
    const std::string r_label = settings.back().label;
    const VectorStatistic stat = [&](const CountTable& t) {
      const auto rho = detail::reconstruct(t);
      return std::vector<double>{berta_relation(rho, r, sigma_z()).lhs, detail::count_direct_entropy(t, r_label)};
    };
    const auto stream = detail::point_stream(res.config, Scenario::Fig5, i);
    const auto table = simulate_counts(stored, settings, res.config.shots, derive_stream(stream, {0}));
    return detail::simulate_point(table, stat, res.config, stream);
  });

  // Process tomography of the memory through its Choi state.
  const auto stream = derive_stream(res.config.seed, {0xC410});
  const auto choi_counts = simulate_counts(choi_state(memory), plan, res.config.shots, derive_stream(stream, {0}));
  const ChiMatrix chi = detail::chi_from_choi_counts(tomography_data(choi_counts));
  const ScalarStatistic fidelity = [](const CountTable& t) {
    return process_fidelity(detail::chi_from_choi_counts(tomography_data(t)), ChiMatrix::identity_process()).fidelity;
  };
  const ErrorBar bar = mc_error_bar(choi_counts, fidelity, res.config.replicas, derive_stream(stream, {1}),
                                    res.config.threads);
  const ProcessFidelity f = process_fidelity(chi, ChiMatrix::identity_process());
  res.scalars.emplace_back("process_fidelity_sim", f.fidelity);
  res.scalars.emplace_back("process_fidelity_sim_std", bar.std);
  res.scalars.emplace_back("root_process_fidelity_sim", f.root_fidelity);
  res.matrices.push_back({"chi_sim", "pauli-IXYZ", chi.m});
  return res;
}

inline ScenarioResult run_scenario(Scenario s, const std::vector<double>& grid, const SimConfig& config) {
  switch (s) {
    case Scenario::Fig2: return run_fig2(grid, config);
    case Scenario::Fig3: return run_fig3(grid, config);
    case Scenario::Fig4: return run_fig4(grid, config);
    case Scenario::Fig5: return run_fig5(grid, config);
  }
  throw Error(ErrorCode::DomainError, "unknown scenario");
}

struct Agreement {
  int points = 0;
  int within = 0;
};

/// Simulated points lying within k error bars of their closed-form value.
/// `floor` absorbs roundoff where both the error bar and the deviation
/// vanish, e.g. witness -1 from noiseless zero-count outcomes.
inline Agreement agreement(const ScenarioResult& res, double k = 3.0, double floor = 1e-9) {
  Agreement a;
  for (const Series& s : res.series) {
    if (!s.simulated()) continue;
    const Series& t = res.get(s.theory);
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      ++a.points;
      if (std::abs(s.values[i] - t.values[i]) <= k * s.errors[i].std + floor) ++a.within;
    }
  }
  return a;
}

}  // namespace eurlab
