// Copyright 2026 The platoon-risk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// platoon-risk: command-line front end for the platoon risk pipeline.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "platoon/report.hpp"
#include "platoon/scenario.hpp"

namespace {

using namespace platoon;

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kConfigError = 2,
  kInstability = 3,
  kNumericalError = 4,
};

struct CommonOptions {
  std::string config;
  std::optional<double> epsilon;
  std::optional<double> tau;
  std::optional<std::uint64_t> seed;
  std::string format;
  std::string output;
  std::optional<int> threads;
};

struct SimOverrides {
  std::optional<double> dt, burn, horizon;
  std::optional<int> traj, stride;
  std::string samples_csv;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "Scenario JSON file (defaults to the K11 reference scenario)");
  cmd->add_option("--epsilon", o.epsilon, "Override params.epsilon");
  cmd->add_option("--tau", o.tau, "Override params.tau");
  cmd->add_option("--seed", o.seed, "Override sim.seed");
  cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--output", o.output, "Output file (default: standard output)");
  cmd->add_option("--threads", o.threads, "Simulation worker threads")->check(CLI::PositiveNumber);
}

void add_sim(CLI::App* cmd, SimOverrides& s) {
  cmd->add_option("--dt", s.dt, "Integration step");
  cmd->add_option("--burn", s.burn, "Burn-in horizon");
  cmd->add_option("--horizon", s.horizon, "Sampling horizon per trajectory");
  cmd->add_option("--traj", s.traj, "Number of trajectories");
  cmd->add_option("--stride", s.stride, "Steps between retained samples");
}

ScenarioConfig load(const CommonOptions& o) {
  ScenarioConfig cfg = o.config.empty() ? default_scenario() : load_scenario(o.config);
  if (o.epsilon) cfg.params.epsilon = *o.epsilon;
  if (o.tau) cfg.params.tau = *o.tau;
  if (o.seed || o.threads) {
    if (!cfg.sim) cfg.sim = SimConfig{};
    if (o.seed) cfg.sim->seed = *o.seed;
    if (o.threads) cfg.sim->threads = *o.threads;
  }
  if (o.format == "csv") cfg.output.format = OutputFormat::Csv;
  if (o.format == "json") cfg.output.format = OutputFormat::Json;
  if (!o.output.empty()) cfg.output.path = o.output;
  cfg.params.validate();
  return cfg;
}

void apply_sim(ScenarioConfig& cfg, const SimOverrides& s) {
  if (!cfg.sim) cfg.sim = SimConfig{};
  if (s.dt) cfg.sim->dt = *s.dt;
  if (s.burn) cfg.sim->t_burn = *s.burn;
  if (s.horizon) cfg.sim->t_sample = *s.horizon;
  if (s.traj) cfg.sim->n_traj = *s.traj;
  if (s.stride) cfg.sim->sample_stride = *s.stride;
  if (!s.samples_csv.empty()) cfg.sim->keep_samples = true;
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::fwrite(content.data(), 1, content.size(), stdout);
    std::fflush(stdout);
    return;
  }
  report::write_atomic(report::resolve_output_path(path), content);
}

int cmd_analyze(const ScenarioConfig& cfg, const std::string& dump_spectrum, const std::string& dump_variances) {
  const Analysis a = run_analyze(cfg);
  // Auxiliary dumps first: every document is complete before the main one
  // appears.
  if (!dump_spectrum.empty())
    report::write_atomic(report::resolve_output_path(dump_spectrum),
                         report::spectrum_json(laplacian(a.graph), a.spectrum));
  if (!dump_variances.empty())
    report::write_atomic(report::resolve_output_path(dump_variances), report::variances_csv(a.variances));
  emit(cfg.output.path,
       cfg.output.format == OutputFormat::Json ? report::analyze_json(a) : report::analyze_csv(a));
  return kOk;
}

int cmd_stability(const ScenarioConfig& cfg) {
  const auto graph = build_graph(cfg.graph);
  const auto verdict = platoon_stable(spectrum(graph), cfg.params.tau, cfg.params.beta);
  emit(cfg.output.path, report::stability_csv(verdict));
  return verdict.stable ? kOk : kInstability;
}

int cmd_bounds(const ScenarioConfig& cfg) {
  const auto graph = build_graph(cfg.graph);
  const auto spec = spectrum(graph);
  const auto verdict = platoon_stable(spec, cfg.params.tau, cfg.params.beta);
  if (!verdict.stable) throw UnstablePlatoonError(verdict);
  emit(cfg.output.path, report::bounds_json(evar_bounds(spec, cfg.params, cfg.quadrature)));
  return kOk;
}

int cmd_sweep(ScenarioConfig cfg, const std::vector<double>& epsilons) {
  if (!epsilons.empty()) cfg.epsilon_sweep = epsilons;
  const SweepTable t = run_sweep_epsilon(cfg);
  for (const auto& w : t.warnings) std::cerr << "warning: " << w << "\n";
  emit(cfg.output.path,
       cfg.output.format == OutputFormat::Json ? report::sweep_json(t, cfg.params) : report::sweep_csv(t));
  return kOk;
}

int cmd_simulate(const ScenarioConfig& cfg, const std::string& samples_csv) {
  const auto graph = build_graph(cfg.graph);
  const auto spec = spectrum(graph);
  validate_sim_config(*cfg.sim, cfg.params, spec.lambda2());
  const SimulationResult res = simulate(graph, cfg.params, *cfg.sim);
  if (res.diverged) {
    emit(cfg.output.path, report::simulation_json(res, *cfg.sim, cfg.params));
    std::cerr << "error: simulation diverged at t = " << report::format_number(res.divergence_time)
              << " (trajectory " << res.diverged_trajectory << ")\n";
    return kNumericalError;
  }
  if (!samples_csv.empty())
    report::write_atomic(report::resolve_output_path(samples_csv), report::samples_csv(res));
  emit(cfg.output.path, report::simulation_json(res, *cfg.sim, cfg.params));
  return kOk;
}

int cmd_validate(const ScenarioConfig& cfg) {
  const ValidationReport r = run_validate(cfg);
  emit(cfg.output.path, report::validation_json(r));
  if (!r.stable) return kInstability;
  if (r.diverged) return kNumericalError;
  return r.all_pass() ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collision risk of delayed stochastic vehicle platoons"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "platoon-risk 1.0.0");

  CommonOptions common;
  SimOverrides sim;
  std::string dump_spectrum, dump_variances;
  std::vector<double> epsilons;

  auto* analyze = app.add_subcommand("analyze", "Per-pair VaR, CVaR and EVaR with spectral bounds");
  add_common(analyze, common);
  analyze->add_option("--dump-spectrum", dump_spectrum, "Write the Laplacian and its spectrum as JSON");
  analyze->add_option("--dump-variances", dump_variances, "Write per-pair variances as CSV");

  auto* stability = app.add_subcommand("stability", "Per-mode stability table (CSV)");
  add_common(stability, common);

  auto* bounds = app.add_subcommand("bounds", "Spectral EVaR bounds (JSON)");
  add_common(bounds, common);

  auto* sweep = app.add_subcommand("sweep-epsilon", "EVaR table over a list of confidence levels");
  add_common(sweep, common);
  sweep->add_option("--epsilons", epsilons, "Confidence levels, space or comma separated (overrides epsilon_sweep)")
      ->delimiter(',');

  auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo simulation summary (JSON)");
  add_common(simulate_cmd, common);
  add_sim(simulate_cmd, sim);
  simulate_cmd->add_option("--samples-csv", sim.samples_csv, "Write raw distance samples as CSV");

  auto* validate = app.add_subcommand("validate", "Compare simulation against the analytic model");
  add_common(validate, common);
  add_sim(validate, sim);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    ScenarioConfig cfg = load(common);
    if (*analyze) return cmd_analyze(cfg, dump_spectrum, dump_variances);
    if (*stability) return cmd_stability(cfg);
    if (*bounds) return cmd_bounds(cfg);
    if (*sweep) return cmd_sweep(cfg, epsilons);
    if (*simulate_cmd) {
      apply_sim(cfg, sim);
      return cmd_simulate(cfg, sim.samples_csv);
    }
    if (*validate) {
      apply_sim(cfg, sim);
      return cmd_validate(cfg);
    }
  } catch (const UnstablePlatoonError& e) {
    std::cerr << "error: " << e.what() << "\n" << report::stability_csv(e.verdict());
    return kInstability;
  } catch (const InstabilityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInstability;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericalError;
  }
  return kOk;
}
