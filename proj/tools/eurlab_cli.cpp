// Command-line front end: closed-form curves, simulated experiments,
// tomography and witness evaluation from count files, bound thresholds.
//
// Exit codes: 0 success, 2 invalid arguments or input, 3 numerical failure.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "eurlab/experiments.hpp"
#include "eurlab/io.hpp"
#include "eurlab/measure.hpp"
#include "eurlab/stats.hpp"
#include "eurlab/tomography.hpp"
#include "eurlab/uncertainty.hpp"

namespace {

using namespace eurlab;

/// Bad command-line usage detected after parsing (files, option combinations).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << text;
  if (!out) throw UsageError("write to '" + path + "' failed");
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

CountTable read_counts(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open counts file '" + path + "'");
  return read_counts_csv(in);
}

struct Options {
  std::string config;
  std::string scenario;
  std::string grid;
  std::string out;
  std::string svg;
  std::string counts;
  std::string mode = "state";
  std::string state = "rho1";
  std::string plan = "tomography";
  std::uint64_t seed = 1;
  double shots = 6000.0;
  int replicas = kDefaultReplicas;
  double noise = 0.0;
  double x = 0.5;
  double hab = 0.0;
  unsigned threads = 0;
};

/// Defaults, then the config file, then flags given on the command line.
SimConfig build_config(const Options& o, const CLI::App& cmd, RunConfig* file_out = nullptr) {
  SimConfig cfg;
  std::string path = o.config;
  if (path.empty()) {
    if (const char* env = std::getenv("EURLAB_CONFIG")) path = env;
  }
  RunConfig file;
  if (!path.empty()) file = load_run_config(path);
  apply_run_config(file, cfg);
  auto given = [&](const char* name) {
    const CLI::Option* opt = cmd.get_option_no_throw(name);
    return opt && opt->count() > 0;
  };
  if (given("--seed")) cfg.seed = o.seed;
  if (given("--shots")) cfg.shots = o.shots;
  if (given("--replicas")) cfg.replicas = o.replicas;
  if (given("--noise")) cfg.noise = o.noise;
  if (given("--threads")) cfg.threads = o.threads;
  if (file_out) *file_out = file;
  return cfg;
}

std::vector<double> choose_grid(const Options& o, const RunConfig& file, Scenario s) {
  if (!o.grid.empty()) return parse_grid(o.grid);
  if (file.grid) return parse_grid(*file.grid);
  return default_grid(s);
}

void emit_result(const ScenarioResult& res, const Options& o) {
  std::ostringstream text;
  if (ends_with(o.out, ".json")) {
    text << result_to_json(res).dump(2) << '\n';
  } else {
    write_result_csv(text, res);
  }
  write_output(o.out, text.str());
  if (!o.svg.empty()) {
    std::ostringstream svg;
    write_result_svg(svg, res);
    write_output(o.svg, svg.str());
  }
}

void cmd_theory(const Options& o, const CLI::App& cmd) {
  RunConfig file;
  const SimConfig cfg = build_config(o, cmd, &file);
  const Scenario s = parse_scenario(o.scenario);
  emit_result(theory_scenario(s, choose_grid(o, file, s), cfg), o);
}

void cmd_simulate(const Options& o, const CLI::App& cmd) {
  RunConfig file;
  const SimConfig cfg = build_config(o, cmd, &file);
  const Scenario s = parse_scenario(o.scenario);
  emit_result(run_scenario(s, choose_grid(o, file, s), cfg), o);
}

void cmd_tomo(const Options& o) {
  const CountTable table = read_counts(o.counts);
  const TomographyData data = tomography_data(table);
  Json j;
  j["mode"] = o.mode;
  if (o.mode == "state") {
    const Mat4 li = state_linear_inversion(data);
    const MleResult mle = state_mle(data);
    j["linear_inversion"] = matrix_to_json(li, "canonical");
    j["linear_inversion_min_eigenvalue"] = eigenvalues(li)[3];
    j["mle"] = matrix_to_json(mle.state.matrix(), "canonical");
    j["log_likelihood"] = mle.log_likelihood;
    j["iterations"] = mle.iterations;
    j["converged"] = mle.converged;
    j["conditional_entropy"] = conditional_entropy(mle.state);
    j["concurrence"] = concurrence(mle.state);
  } else {
    // Ancilla-assisted: the counts are a tomography of the Choi state with
    // the channel acting on qubit B.
    const MleResult mle = state_mle(data);
    const auto inputs = process_tomography_inputs();
    const ChiMatrix raw = process_chi_reconstruct(inputs, outputs_from_choi(mle.state, inputs));
    const ChiMatrix chi = chi_project_physical(raw);
    const ProcessFidelity f = process_fidelity(chi, ChiMatrix::identity_process());
    j["choi_state"] = matrix_to_json(mle.state.matrix(), "canonical");
    j["chi_raw"] = matrix_to_json(raw.m, "pauli-IXYZ");
    j["chi"] = matrix_to_json(chi.m, "pauli-IXYZ");
    j["process_fidelity"] = f.fidelity;
    j["root_process_fidelity"] = f.root_fidelity;
    j["converged"] = mle.converged;
  }
  write_output(o.out, j.dump(2) + "\n");
}

void cmd_witness(const Options& o, const CLI::App& cmd) {
  const SimConfig cfg = build_config(o, cmd);
  const CountTable table = read_counts(o.counts);
  const CountRow* xx = table.find("XX");
  const CountRow* zz = table.find("ZZ");
  if (!xx || !zz) throw Error(ErrorCode::MissingSetting, "witness needs XX and ZZ settings");
  const double dx = estimate_disagreement(*xx), dz = estimate_disagreement(*zz);
  const double w = fano_witness(dx, dz);
  const ErrorBar bar = mc_error_bar(
      table,
      [](const CountTable& t) {
        return fano_witness(estimate_disagreement(*t.find("XX")), estimate_disagreement(*t.find("ZZ")));
      },
      cfg.replicas, derive_stream(cfg.seed, {0x5711}), 1);
  Json j{{"d_x", dx},           {"d_z", dz},
         {"witness", w},        {"witness_std", bar.std},
         {"neg_witness", -w},   {"entanglement_certified", w < 0.0},
         {"seed", cfg.seed},    {"replicas", cfg.replicas}};
  write_output(o.out, j.dump(2) + "\n");
}

void cmd_threshold(const Options& o) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f\n", find_bound_threshold(o.hab));
  write_output(o.out, buf);
}

void cmd_sample(const Options& o, const CLI::App& cmd) {
  const SimConfig cfg = detail::resolve(build_config(o, cmd));
  TwoQubitDensity rho = TwoQubitDensity::maximally_mixed();
  if (o.state == "rho1") {
    rho = bds_rho1(o.x);
  } else if (o.state == "rho2") {
    rho = bds_rho2(o.x);
  } else if (o.state == "memory") {
    rho = detail::memory_channel(cfg).apply_on_b(detail::memory_input_state());
  } else if (o.state == "choi") {
    rho = choi_state(detail::memory_channel(cfg));
  } else {
    throw UsageError("unknown state '" + o.state + "'");
  }
  std::vector<MeasurementSetting> plan;
  if (o.plan == "tomography") {
    plan = tomography_plan();
  } else if (o.plan == "witness") {
    plan = {MeasurementSetting(sigma_x(), sigma_x()), MeasurementSetting(sigma_z(), sigma_z())};
  } else {
    throw UsageError("unknown plan '" + o.plan + "'");
  }
  if (!(cfg.shots > 0.0)) throw Error(ErrorCode::DomainError, "shots must be positive");
  std::ostringstream text;
  write_counts_csv(text, simulate_counts(rho, plan, cfg.shots, cfg.seed));
  write_output(o.out, text.str());
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Entropic uncertainty with quantum memory: theory curves, simulation and tomography"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  auto add_config = [&](CLI::App* c) {
    c->add_option("--config", o.config, "JSON config {seed, shots, replicas, grid, noise, fiber_phases}");
  };
  auto add_sim = [&](CLI::App* c) {
    c->add_option("--seed", o.seed, "Random seed");
    c->add_option("--shots", o.shots, "Mean coincidence counts per setting (default 6000)");
    c->add_option("--replicas", o.replicas, "Monte Carlo replicas (default 100)");
    c->add_option("--noise", o.noise, "Depolarizing weight of the memory channel");
  };

  CLI::App* theory = app.add_subcommand("theory", "Closed-form curves of a scenario");
  theory->add_option("--scenario", o.scenario, "fig2 | fig3 | fig4 | fig5")->required();
  theory->add_option("--grid", o.grid, "start:stop:step or a comma-separated list");
  theory->add_option("--out", o.out, "Output path, .json for JSON, otherwise CSV (default stdout)");
  theory->add_option("--svg", o.svg, "Also write an SVG plot");
  theory->add_option("--noise", o.noise, "Depolarizing weight of the memory channel");
  add_config(theory);

  CLI::App* simulate = app.add_subcommand("simulate", "Simulated experiment with Monte Carlo error bars");
  simulate->add_option("--scenario", o.scenario, "fig2 | fig3 | fig4 | fig5")->required();
  simulate->add_option("--grid", o.grid, "start:stop:step or a comma-separated list");
  simulate->add_option("--out", o.out, "Output path, .json for JSON, otherwise CSV (default stdout)");
  simulate->add_option("--svg", o.svg, "Also write an SVG plot");
  simulate->add_option("--threads", o.threads, "Worker threads (default: all hardware threads)");
  add_sim(simulate);
  add_config(simulate);

  CLI::App* tomo = app.add_subcommand("tomo", "Reconstruct a state or the memory process from a counts CSV");
  tomo->add_option("--counts", o.counts, "Counts CSV with the nine {X,Y,Z}^2 settings")->required();
  tomo->add_option("--mode", o.mode, "state | process")->check(CLI::IsMember({"state", "process"}));
  tomo->add_option("--out", o.out, "Output JSON path (default stdout)");

  CLI::App* witness = app.add_subcommand("witness", "Two-setting entanglement witness from a counts CSV");
  witness->add_option("--counts", o.counts, "Counts CSV containing XX and ZZ")->required();
  witness->add_option("--out", o.out, "Output JSON path (default stdout)");
  witness->add_option("--seed", o.seed, "Seed for the Monte Carlo error bar");
  witness->add_option("--replicas", o.replicas, "Monte Carlo replicas (default 100)");
  add_config(witness);

  CLI::App* threshold = app.add_subcommand("threshold", "Angle where the memory-assisted bound reaches zero");
  threshold->add_option("--hab", o.hab, "Conditional entropy H(A|B) in bits, in [-1, 0)")->required();
  threshold->add_option("--out", o.out, "Output path (default stdout)");

  CLI::App* sample = app.add_subcommand("sample", "Write simulated counts for a model state");
  sample->add_option("--state", o.state, "rho1 | rho2 | memory | choi");
  sample->add_option("--x", o.x, "Mixing ratio for rho1 and rho2");
  sample->add_option("--plan", o.plan, "tomography | witness");
  sample->add_option("--out", o.out, "Output CSV path (default stdout)");
  add_sim(sample);
  add_config(sample);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (theory->parsed()) cmd_theory(o, *theory);
    if (simulate->parsed()) cmd_simulate(o, *simulate);
    if (tomo->parsed()) cmd_tomo(o);
    if (witness->parsed()) cmd_witness(o, *witness);
    if (threshold->parsed()) cmd_threshold(o);
    if (sample->parsed()) cmd_sample(o, *sample);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.is_usage_error() ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
