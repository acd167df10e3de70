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

#include "platoon/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace platoon {
namespace {

using nlohmann::json;

[[noreturn]] void config_fail(const std::string& what) { throw ConfigError("config: " + what); }

void reject_unknown_keys(const json& obj, std::string_view block, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) config_fail(std::string(block) + " must be an object");
  for (const auto& [key, _] : obj.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      config_fail("unknown key '" + key + "' in " + std::string(block));
}

double get_number(const json& obj, const char* key, std::string_view block) {
  const auto& v = obj.at(key);
  if (!v.is_number()) config_fail(std::string(block) + "." + key + " must be a number");
  return v.get<double>();
}

long long get_integer(const json& obj, const char* key, std::string_view block) {
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) config_fail(std::string(block) + "." + key + " must be an integer");
  return v.get<long long>();
}

std::pair<int, int> line_column(std::string_view text, std::size_t byte) {
  int line = 1;
  int col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  // nlohmann reports the byte after the offending token
  return {line, std::max(1, col - 1)};
}

GraphSpec parse_graph(const json& j) {
  reject_unknown_keys(j, "graph", {"kind", "n", "p", "weights", "edges"});
  GraphSpec g;
  if (!j.contains("kind") || !j.at("kind").is_string()) config_fail("graph.kind is required");
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "complete")
    g.kind = GraphKind::Complete;
  else if (kind == "pcycle")
    g.kind = GraphKind::PCycle;
  else if (kind == "path")
    g.kind = GraphKind::Path;
  else if (kind == "explicit")
    g.kind = GraphKind::Explicit;
  else
    config_fail("graph.kind must be complete, pcycle, path or explicit (got '" + kind + "')");

  if (!j.contains("n")) config_fail("graph.n is required");
  g.n = static_cast<int>(get_integer(j, "n", "graph"));
  if (j.contains("p")) g.p = static_cast<int>(get_integer(j, "p", "graph"));
  if (g.kind == GraphKind::PCycle && !j.contains("p")) config_fail("graph.p is required for pcycle");

  if (j.contains("weights")) {
    const auto& w = j.at("weights");
    if (w.is_object() && w.contains("uniform")) {
      reject_unknown_keys(w, "graph.weights", {"uniform"});
      g.weights = UniformWeight{get_number(w, "uniform", "graph.weights")};
    } else if (w.is_object() && w.contains("range")) {
      reject_unknown_keys(w, "graph.weights", {"range", "seed"});
      const auto& r = w.at("range");
      if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number())
        config_fail("graph.weights.range must be [lo, hi]");
      RandomWeight rw{r[0].get<double>(), r[1].get<double>(), 0};
      if (w.contains("seed")) {
        const auto& s = w.at("seed");
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
          config_fail("graph.weights.seed must be a non-negative integer");
        rw.seed = s.get<std::uint64_t>();
      }
      g.weights = rw;
    } else {
      config_fail("graph.weights must be {\"uniform\": w} or {\"range\": [lo, hi], \"seed\": s}");
    }
  }

  if (g.kind == GraphKind::Explicit) {
    if (!j.contains("edges") || !j.at("edges").is_array())
      config_fail("graph.edges (list of [i, j, w], 1-based) is required for explicit graphs");
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() < 2 || e.size() > 3 || !e[0].is_number_integer() ||
          !e[1].is_number_integer() || (e.size() == 3 && !e[2].is_number()))
        config_fail("graph.edges entries must be [i, j] or [i, j, w]");
      const double w = e.size() == 3 ? e[2].get<double>() : 1.0;
      g.edges.push_back({e[0].get<int>() - 1, e[1].get<int>() - 1, w});
    }
  } else if (j.contains("edges")) {
    config_fail("graph.edges is only valid for explicit graphs");
  }
  return g;
}

PlatoonParams parse_params(const json& j, PlatoonParams p) {
  reject_unknown_keys(j, "params", {"n", "d", "c", "tau", "beta", "g", "epsilon"});
  if (j.contains("n")) p.n = static_cast<int>(get_integer(j, "n", "params"));
  if (j.contains("d")) p.d = get_number(j, "d", "params");
  if (j.contains("c")) p.c = get_number(j, "c", "params");
  if (j.contains("tau")) p.tau = get_number(j, "tau", "params");
  if (j.contains("beta")) p.beta = get_number(j, "beta", "params");
  if (j.contains("g")) p.g = get_number(j, "g", "params");
  if (j.contains("epsilon")) p.epsilon = get_number(j, "epsilon", "params");
  return p;
}

SimConfig parse_sim(const json& j) {
  reject_unknown_keys(j, "sim",
                      {"dt", "burn", "horizon", "traj", "seed", "stride", "threads", "keep_samples",
                       "batch_time", "initial_velocity_perturbation", "noise_substeps",
                       "burn_floor_factor"});
  SimConfig s;
  if (j.contains("dt")) s.dt = get_number(j, "dt", "sim");
  if (j.contains("burn")) s.t_burn = get_number(j, "burn", "sim");
  if (j.contains("horizon")) s.t_sample = get_number(j, "horizon", "sim");
  if (j.contains("traj")) s.n_traj = static_cast<int>(get_integer(j, "traj", "sim"));
  if (j.contains("seed")) s.seed = static_cast<std::uint64_t>(get_integer(j, "seed", "sim"));
  if (j.contains("stride")) s.sample_stride = static_cast<int>(get_integer(j, "stride", "sim"));
  if (j.contains("threads")) s.threads = static_cast<int>(get_integer(j, "threads", "sim"));
  if (j.contains("keep_samples")) {
    if (!j.at("keep_samples").is_boolean()) config_fail("sim.keep_samples must be a boolean");
    s.keep_samples = j.at("keep_samples").get<bool>();
  }
  if (j.contains("batch_time")) s.batch_time = get_number(j, "batch_time", "sim");
  if (j.contains("initial_velocity_perturbation"))
    s.initial_velocity_perturbation = get_number(j, "initial_velocity_perturbation", "sim");
  if (j.contains("noise_substeps"))
    s.noise_substeps = static_cast<int>(get_integer(j, "noise_substeps", "sim"));
  if (j.contains("burn_floor_factor")) s.burn_floor_factor = get_number(j, "burn_floor_factor", "sim");
  return s;
}

std::string describe_modes(const StabilityVerdict& v) {
  std::ostringstream msg;
  msg << "platoon is not stable; failing modes:";
  // Repeated eigenvalues are reported once with their multiplicity.
  for (std::size_t k = 0; k < v.modes.size();) {
    const auto& m = v.modes[k];
    std::size_t run = 1;
    while (k + run < v.modes.size() &&
           std::abs(v.modes[k + run].lambda - m.lambda) <= 1e-12 * std::max(1.0, m.lambda))
      ++run;
    if (!m.pass) {
      msg << " lambda=" << m.lambda;
      if (run > 1) msg << " (x" << run << ")";
      msg << " [s1=" << m.s1 << ", s2=" << m.s2 << "]";
    }
    k += run;
  }
  return msg.str();
}

}  // namespace

std::string_view to_string(GraphKind kind) {
  switch (kind) {
    case GraphKind::Complete: return "complete";
    case GraphKind::PCycle: return "pcycle";
    case GraphKind::Path: return "path";
    case GraphKind::Explicit: return "explicit";
  }
  return "unknown";
}

WeightedGraph build_graph(const GraphSpec& spec) {
  switch (spec.kind) {
    case GraphKind::Complete: return build_topology(TopologyKind::Complete, spec.n, spec.weights);
    case GraphKind::PCycle: return build_topology(TopologyKind::PCycle, spec.n, spec.weights, spec.p);
    case GraphKind::Path: return build_topology(TopologyKind::Path, spec.n, spec.weights);
    case GraphKind::Explicit: return WeightedGraph(spec.n, spec.edges);
  }
  throw ConfigError("unknown graph kind");
}

ScenarioConfig default_scenario() { return ScenarioConfig{}; }

ScenarioConfig parse_scenario(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(json_text, e.byte);
    throw ConfigError("malformed JSON at line " + std::to_string(line) + ", column " +
                      std::to_string(col) + ": " + e.what());
  }

  ScenarioConfig cfg = default_scenario();
  try {
    reject_unknown_keys(doc, "scenario", {"graph", "params", "epsilon_sweep", "sim", "output", "quadrature"});
    if (doc.contains("graph")) cfg.graph = parse_graph(doc.at("graph"));
    const bool n_given = doc.contains("params") && doc.at("params").contains("n");
    if (doc.contains("params")) cfg.params = parse_params(doc.at("params"), cfg.params);
    if (n_given && cfg.params.n != cfg.graph.n)
      config_fail("params.n (" + std::to_string(cfg.params.n) + ") differs from graph.n (" +
                  std::to_string(cfg.graph.n) + ")");
    cfg.params.n = cfg.graph.n;
    if (doc.contains("epsilon_sweep")) {
      const auto& s = doc.at("epsilon_sweep");
      if (!s.is_array()) config_fail("epsilon_sweep must be a list of numbers");
      for (const auto& e : s) {
        if (!e.is_number()) config_fail("epsilon_sweep must be a list of numbers");
        cfg.epsilon_sweep.push_back(e.get<double>());
      }
    }
    if (doc.contains("sim")) cfg.sim = parse_sim(doc.at("sim"));
    if (doc.contains("output")) {
      const auto& o = doc.at("output");
      reject_unknown_keys(o, "output", {"format", "path"});
      if (o.contains("format")) {
        const auto f = o.at("format").get<std::string>();
        if (f == "csv")
          cfg.output.format = OutputFormat::Csv;
        else if (f == "json")
          cfg.output.format = OutputFormat::Json;
        else
          config_fail("output.format must be csv or json");
      }
      if (o.contains("path")) cfg.output.path = o.at("path").get<std::string>();
    }
    if (doc.contains("quadrature")) {
      const auto& q = doc.at("quadrature");
      reject_unknown_keys(q, "quadrature", {"rel_tol", "max_panels"});
      if (q.contains("rel_tol")) cfg.quadrature.rel_tol = get_number(q, "rel_tol", "quadrature");
      if (q.contains("max_panels"))
        cfg.quadrature.max_panels = static_cast<int>(get_integer(q, "max_panels", "quadrature"));
      if (!(cfg.quadrature.rel_tol > 0.0 && cfg.quadrature.rel_tol < 1.0))
        config_fail("quadrature.rel_tol must lie in (0, 1)");
    }
  } catch (const json::exception& e) {
    config_fail(e.what());
  }
  cfg.params.validate();
  for (double e : cfg.epsilon_sweep)
    if (!(e > 0.0 && e < 1.0)) config_fail("epsilon_sweep values must lie in (0, 1)");
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

UnstablePlatoonError::UnstablePlatoonError(StabilityVerdict verdict)
    : InstabilityError(describe_modes(verdict)), verdict_(std::move(verdict)) {}

std::vector<PairRisk> pair_risks(std::span<const double> sigma_sq, const PlatoonParams& params) {
  std::vector<PairRisk> out;
  out.reserve(sigma_sq.size());
  for (std::size_t j = 0; j < sigma_sq.size(); ++j) {
    PairRisk r;
    r.pair = static_cast<int>(j);
    r.sigma = std::sqrt(sigma_sq[j]);
    r.kappa = kappa_epsilon(params.d, r.sigma, params.epsilon);
    r.var = var(params.d, r.sigma, params.epsilon, params.c);
    r.cvar = cvar(params.d, r.sigma, params.epsilon, params.c);
    r.evar = evar(params.d, r.sigma, params.epsilon, params.c);
    out.push_back(r);
  }
  return out;
}

Analysis run_analyze(const ScenarioConfig& cfg) {
  cfg.params.validate();
  WeightedGraph graph = build_graph(cfg.graph);
  if (graph.size() != cfg.params.n) config_fail("graph size does not match params.n");
  LaplacianSpectrum spec = spectrum(graph);
  StabilityVerdict verdict = platoon_stable(spec, cfg.params.tau, cfg.params.beta);
  if (!verdict.stable) throw UnstablePlatoonError(verdict);

  PairVariances variances = pair_variances(spec, cfg.params, cfg.quadrature);
  RiskReport report;
  report.params = cfg.params;
  report.per_pair = pair_risks(variances.sigma_sq, cfg.params);
  report.bounds = evar_bounds(spec, cfg.params, cfg.quadrature);
  return Analysis{cfg.graph, std::move(graph), std::move(spec), std::move(verdict),
                  std::move(variances), std::move(report)};
}

SweepTable run_sweep_epsilon(const ScenarioConfig& cfg) {
  if (cfg.epsilon_sweep.empty()) config_fail("epsilon_sweep is empty");
  SweepTable table;
  std::vector<double> levels;
  std::set<double> seen;
  for (double e : cfg.epsilon_sweep) {
    if (!(e > 0.0 && e < 1.0)) config_fail("epsilon_sweep values must lie in (0, 1)");
    if (!seen.insert(e).second) {
      std::ostringstream msg;
      msg << "duplicate epsilon " << e << " ignored";
      table.warnings.push_back(msg.str());
      continue;
    }
    levels.push_back(e);
  }
  std::sort(levels.begin(), levels.end(), std::greater<>());

  WeightedGraph graph = build_graph(cfg.graph);
  const auto spec = spectrum(graph);
  const auto verdict = platoon_stable(spec, cfg.params.tau, cfg.params.beta);
  if (!verdict.stable) throw UnstablePlatoonError(verdict);
  const auto variances = pair_variances(spec, cfg.params, cfg.quadrature);

  for (double e : levels)
    for (std::size_t j = 0; j < variances.sigma_sq.size(); ++j) {
      const double sigma = std::sqrt(variances.sigma_sq[j]);
      table.rows.push_back({e, static_cast<int>(j), sigma, evar(cfg.params.d, sigma, e, cfg.params.c)});
    }
  return table;
}

bool ValidationReport::all_pass() const {
  if (!stable || diverged || checks.empty()) return false;
  return std::all_of(checks.begin(), checks.end(), [](const ValidationCheck& c) { return c.pass; });
}

ValidationReport run_validate(const ScenarioConfig& cfg, const ValidationHooks& hooks) {
  if (!cfg.sim) config_fail("validate requires a sim block");
  const PlatoonParams& p = cfg.params;
  WeightedGraph graph = build_graph(cfg.graph);
  const auto spec = spectrum(graph);
  const auto verdict = platoon_stable(spec, p.tau, p.beta);

  SimConfig sim = *cfg.sim;
  sim.keep_samples = verdict.stable;
  ValidationReport report;
  report.stable = verdict.stable;
  if (!verdict.stable) {
    // Burn-in floor is irrelevant when the run is expected to blow up.
    sim.burn_floor_factor = 0.0;
    const auto res = simulate(graph, p, sim);
    report.diverged = res.diverged;
    report.divergence_time = res.divergence_time;
    return report;
  }

  const auto analytic = pair_variances(spec, p, cfg.quadrature);
  const auto res = simulate(graph, p, sim);
  report.diverged = res.diverged;
  report.divergence_time = res.divergence_time;
  report.samples_per_pair = res.samples_per_pair;
  if (res.diverged || res.samples_per_pair < 2) return report;
  report.min_effective_samples = res.min_effective_samples();

  const double scale2 = hooks.sigma_scale * hooks.sigma_scale;
  const int pairs = res.pairs;
  std::vector<double> sigma(pairs);
  for (int j = 0; j < pairs; ++j) sigma[j] = std::sqrt(analytic.sigma_sq[j] * scale2);

  for (int j = 0; j < pairs; ++j) {
    const double expected = analytic.sigma_sq[j] * scale2;
    const double rel = std::abs(res.variance[j] - expected) / expected;
    report.checks.push_back({"variance_rel_error", j, res.variance[j], expected, 0.05, rel <= 0.05});
  }
  {
    double num = 0.0, den = 0.0;
    for (int i = 0; i < pairs; ++i)
      for (int j = 0; j < pairs; ++j) {
        const double a = analytic.covariance(i, j) * scale2;
        num += (res.covariance(i, j) - a) * (res.covariance(i, j) - a);
        den += a * a;
      }
    const double rel = std::sqrt(num / den);
    report.checks.push_back({"covariance_frobenius_rel_error", -1, rel, 0.0, 0.10, rel <= 0.10});
  }
  for (int j = 0; j < pairs; ++j) {
    const double se = res.mean_std_error[j];
    const double limit = std::isfinite(se) ? 3.0 * se : 0.0;
    report.checks.push_back({"mean_within_3se", j, res.mean[j], p.d, limit,
                             std::abs(res.mean[j] - p.d) <= limit});
  }

  for (int j = 0; j < pairs; ++j) {
    const RiskValue e = evar(p.d, sigma[j], p.epsilon, p.c);
    const double delta = e.branch == RiskBranch::Finite ? e.value : 0.0;
    const double p_hat = res.empirical_tail(j, alpha(delta, p.d, p.c));
    const double bound = std::exp(chernoff_exponent(delta, p.d, sigma[j], p.c));
    const double se = std::sqrt(p_hat * (1.0 - p_hat) / res.effective_samples[j]);
    const double limit = bound + 3.0 * se;
    report.checks.push_back({"tail_vs_chernoff", j, p_hat, bound, limit, p_hat <= limit});

    // Empirical VaR / CVaR from the sample quantile and tail mean.
    std::vector<float> s = res.distance_samples[j];
    const auto k = static_cast<std::size_t>(std::floor(p.epsilon * static_cast<double>(s.size())));
    std::nth_element(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(k), s.end());
    const double q = s[k];
    const RiskValue var_hat = q > 0.0 ? RiskValue::finite(p.d / q - p.c) : RiskValue::infinite();
    RiskValue cvar_hat = RiskValue::infinite();
    if (!var_hat.is_infinite() && k > 0) {
      // nth_element leaves the k smallest samples in front of the quantile.
      double sum = 0.0;
      for (std::size_t i = 0; i < k; ++i) sum += s[i];
      const double m = sum / static_cast<double>(k);
      cvar_hat = m > 0.0 ? RiskValue::finite(p.d / m - p.c) : RiskValue::infinite();
    }
    const bool ordered = var_hat.as_double() <= cvar_hat.as_double() &&
                         cvar_hat.as_double() <= e.as_double();
    report.checks.push_back({"empirical_var_cvar_le_evar", j, cvar_hat.as_double(), e.as_double(),
                             e.as_double(), ordered});
  }
  return report;
}

}  // namespace platoon
