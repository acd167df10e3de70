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

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "platoon/bounds.hpp"
#include "platoon/errors.hpp"
#include "platoon/graph.hpp"
#include "platoon/risk.hpp"
#include "platoon/simulator.hpp"
#include "platoon/stability.hpp"
#include "platoon/variance.hpp"

namespace platoon {

enum class GraphKind { Complete, PCycle, Path, Explicit };

struct GraphSpec {
  GraphKind kind = GraphKind::Complete;
  int n = 11;
  int p = 0;
  WeightSpec weights = UniformWeight{1.0};
  std::vector<Edge> edges;  // zero-based, Explicit only
};

WeightedGraph build_graph(const GraphSpec& spec);
std::string_view to_string(GraphKind kind);

enum class OutputFormat { Csv, Json };

struct OutputSpec {
  OutputFormat format = OutputFormat::Csv;
  std::string path;  // empty: standard output
};

/// One complete analysis request as read from a JSON scenario file.
struct ScenarioConfig {
  GraphSpec graph;
  PlatoonParams params;
  std::vector<double> epsilon_sweep;
  std::optional<SimConfig> sim;
  OutputSpec output;
  QuadratureOptions quadrature;
};

/// Complete graph on 11 vehicles with unit weights and the reference
/// parameters n = 11, c = 1.21, d = 1.01, tau = 0.01, beta = 1/3, g = 1,
/// eps = 0.1.
ScenarioConfig default_scenario();

/// Parses and validates a scenario document. Omitted blocks take the
/// defaults of default_scenario(); unknown keys are rejected. Errors are
/// ConfigError, with "line L, column C" for malformed JSON.
ScenarioConfig parse_scenario(std::string_view json_text);
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Raised by the pipeline when the stability check fails; carries the
/// per-mode verdict for reporting.
class UnstablePlatoonError : public InstabilityError {
 public:
  explicit UnstablePlatoonError(StabilityVerdict verdict);
  [[nodiscard]] const StabilityVerdict& verdict() const noexcept { return verdict_; }

 private:
  StabilityVerdict verdict_;
};

struct PairRisk {
  int pair = 0;  // zero-based
  double sigma = 0.0;
  double kappa = 0.0;
  RiskValue var;
  RiskValue cvar;
  RiskValue evar;
};

struct RiskReport {
  PlatoonParams params;
  std::vector<PairRisk> per_pair;
  SpectralBounds bounds;
};

/// VaR, CVaR and EVaR for every pair from its marginal variance.
std::vector<PairRisk> pair_risks(std::span<const double> sigma_sq, const PlatoonParams& params);

struct Analysis {
  GraphSpec graph_spec;
  WeightedGraph graph;
  LaplacianSpectrum spectrum;
  StabilityVerdict stability;
  PairVariances variances;
  RiskReport report;
};

/// graph -> spectrum -> stability -> variances -> per-pair risk -> bounds.
/// Throws UnstablePlatoonError when the stability check fails.
Analysis run_analyze(const ScenarioConfig& cfg);

struct SweepRow {
  double epsilon = 0.0;
  int pair = 0;
  double sigma = 0.0;
  RiskValue evar;
};

struct SweepTable {
  std::vector<SweepRow> rows;  // epsilon descending, then pair ascending
  std::vector<std::string> warnings;
};

/// EVaR of every pair for each confidence level of cfg.epsilon_sweep.
/// Duplicate levels are dropped with a warning.
SweepTable run_sweep_epsilon(const ScenarioConfig& cfg);

struct ValidationCheck {
  std::string name;
  int pair = -1;  // -1 for whole-platoon checks
  double observed = 0.0;
  double expected = 0.0;
  double limit = 0.0;
  bool pass = false;
};

struct ValidationReport {
  bool stable = true;
  bool diverged = false;
  double divergence_time = 0.0;
  double min_effective_samples = 0.0;
  std::size_t samples_per_pair = 0;
  std::vector<ValidationCheck> checks;

  [[nodiscard]] bool all_pass() const;
};

/// Test hook: multiplies every analytic sigma before comparison.
struct ValidationHooks {
  double sigma_scale = 1.0;
};

/// Runs the simulator and compares it with the analytic pipeline: per-pair
/// variance (5 % relative), covariance (10 % Frobenius-relative), mean
/// (3 standard errors), left-tail frequency at the EVaR level against the
/// Chernoff bound, and the ordering empirical VaR <= empirical CVaR <= EVaR.
/// Unstable platoons yield a report with the divergence status and no
/// comparisons. Throws ConfigError when the sim block is missing.
ValidationReport run_validate(const ScenarioConfig& cfg, const ValidationHooks& hooks = {});

}  // namespace platoon
