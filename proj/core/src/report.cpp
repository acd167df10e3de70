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

#include "platoon/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <regex>

#include <json.hpp>

namespace platoon::report {
namespace {

using nlohmann::ordered_json;

// Finite numbers are stored as marked strings holding their 12-digit text
// and spliced back in as bare numbers by dump(); the library's own float
// printer does not guarantee the digit count. Non-finite values become
// strings, NaN becomes null.
constexpr char kNumberMark = '\x01';

ordered_json num(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return std::string(1, kNumberMark) + format_number(x);
}

std::string dump(const ordered_json& j) {
  static const std::regex marked("\"\\\\u0001([^\"]*)\"");
  return std::regex_replace(j.dump(2), marked, "$1") + "\n";
}

ordered_json risk_json(const RiskValue& r) {
  if (r.is_infinite()) return "inf";
  return num(r.value);
}

ordered_json params_json(const PlatoonParams& p) {
  ordered_json j;
  j["n"] = p.n;
  j["d"] = num(p.d);
  j["c"] = num(p.c);
  j["tau"] = num(p.tau);
  j["beta"] = num(p.beta);
  j["g"] = num(p.g);
  j["epsilon"] = num(p.epsilon);
  return j;
}

ordered_json bounds_object(const SpectralBounds& b) {
  ordered_json j;
  j["lambda2"] = num(b.lambda2);
  j["lambdan"] = num(b.lambdan);
  j["kappa2"] = num(b.kappa2);
  j["kappan"] = num(b.kappan);
  j["e_max"] = risk_json(b.e_max);
  j["e_min"] = risk_json(b.e_min);
  j["precondition_ok"] = b.precondition_ok;
  return j;
}

std::string header(std::string_view columns) {
  return "# schema_version=" + std::to_string(kSchemaVersion) + "\n" + std::string(columns) + "\n";
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string format_risk(const RiskValue& r) {
  return r.is_infinite() ? std::string("inf") : format_number(r.value);
}

std::string analyze_csv(const Analysis& a) {
  std::string out = header("pair_index,sigma,kappa_eps,var,cvar,evar,evar_branch");
  for (const auto& r : a.report.per_pair) {
    out += std::to_string(r.pair + 1) + "," + format_number(r.sigma) + "," + format_number(r.kappa) +
           "," + format_risk(r.var) + "," + format_risk(r.cvar) + "," + format_risk(r.evar) + "," +
           std::string(to_string(r.evar.branch)) + "\n";
  }
  return out;
}

std::string analyze_json(const Analysis& a) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["params"] = params_json(a.report.params);
  ordered_json g;
  g["kind"] = std::string(to_string(a.graph_spec.kind));
  g["n"] = a.graph.size();
  if (a.graph_spec.kind == GraphKind::PCycle) g["p"] = a.graph_spec.p;
  g["edges"] = a.graph.edges().size();
  j["graph"] = g;
  ordered_json s;
  s["lambda2"] = num(a.spectrum.lambda2());
  s["lambdan"] = num(a.spectrum.lambda_max());
  ordered_json ev = ordered_json::array();
  for (double x : a.spectrum.eigenvalues) ev.push_back(num(x));
  s["eigenvalues"] = ev;
  j["spectrum"] = s;
  ordered_json st;
  st["stable"] = a.stability.stable;
  st["margin"] = num(a.stability.margin());
  j["stability"] = st;
  ordered_json pairs = ordered_json::array();
  for (const auto& r : a.report.per_pair) {
    ordered_json p;
    p["pair_index"] = r.pair + 1;
    p["sigma"] = num(r.sigma);
    p["kappa_eps"] = num(r.kappa);
    p["var"] = risk_json(r.var);
    p["cvar"] = risk_json(r.cvar);
    p["evar"] = risk_json(r.evar);
    p["evar_branch"] = std::string(to_string(r.evar.branch));
    pairs.push_back(p);
  }
  j["pairs"] = pairs;
  j["bounds"] = bounds_object(a.report.bounds);
  return dump(j);
}

std::string stability_csv(const StabilityVerdict& v) {
  std::string out = header("lambda,s1,s2,a,s2_cap,pass");
  for (const auto& m : v.modes)
    out += format_number(m.lambda) + "," + format_number(m.s1) + "," + format_number(m.s2) + "," +
           format_number(m.a) + "," + format_number(m.s2_cap) + "," + (m.pass ? "true" : "false") + "\n";
  return out;
}

std::string bounds_json(const SpectralBounds& b) { return dump(bounds_object(b)); }

std::string variances_csv(const PairVariances& v) {
  std::string out = header("pair_index,sigma_sq,sigma");
  for (std::size_t j = 0; j < v.sigma_sq.size(); ++j)
    out += std::to_string(j + 1) + "," + format_number(v.sigma_sq[j]) + "," +
           format_number(std::sqrt(v.sigma_sq[j])) + "\n";
  return out;
}

std::string spectrum_json(const Matrix& laplacian, const LaplacianSpectrum& spec) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  ordered_json L = ordered_json::array();
  for (std::size_t i = 0; i < laplacian.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (double x : laplacian.row(i)) row.push_back(num(x));
    L.push_back(row);
  }
  j["laplacian"] = L;
  ordered_json ev = ordered_json::array();
  for (double x : spec.eigenvalues) ev.push_back(num(x));
  j["eigenvalues"] = ev;
  ordered_json vecs = ordered_json::array();
  for (int k = 0; k < spec.size(); ++k) {
    ordered_json col = ordered_json::array();
    for (double x : spec.eigenvector(k)) col.push_back(num(x));
    vecs.push_back(col);
  }
  j["eigenvectors"] = vecs;
  return dump(j);
}

std::string sweep_csv(const SweepTable& t) {
  std::string out = header("epsilon,pair_index,sigma,kappa_eps,evar,evar_branch");
  for (const auto& r : t.rows)
    out += format_number(r.epsilon) + "," + std::to_string(r.pair + 1) + "," + format_number(r.sigma) +
           "," + format_number(r.evar.kappa) + "," + format_risk(r.evar) + "," +
           std::string(to_string(r.evar.branch)) + "\n";
  return out;
}

std::string sweep_json(const SweepTable& t, const PlatoonParams& params) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["params"] = params_json(params);
  ordered_json rows = ordered_json::array();
  for (const auto& r : t.rows) {
    ordered_json row;
    row["epsilon"] = num(r.epsilon);
    row["pair_index"] = r.pair + 1;
    row["sigma"] = num(r.sigma);
    row["kappa_eps"] = num(r.evar.kappa);
    row["evar"] = risk_json(r.evar);
    row["evar_branch"] = std::string(to_string(r.evar.branch));
    rows.push_back(row);
  }
  j["rows"] = rows;
  j["warnings"] = t.warnings;
  return dump(j);
}

std::string simulation_json(const SimulationResult& r, const SimConfig& cfg, const PlatoonParams& params) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["params"] = params_json(params);
  ordered_json c;
  c["dt"] = num(cfg.resolved_dt(params.tau));
  c["burn"] = num(cfg.t_burn);
  c["horizon"] = num(cfg.t_sample);
  c["stride"] = cfg.resolved_stride(params.tau);
  c["traj"] = cfg.n_traj;
  c["seed"] = cfg.seed;
  j["config"] = c;
  j["diverged"] = r.diverged;
  if (r.diverged) {
    j["divergence_time"] = num(r.divergence_time);
    j["diverged_trajectory"] = r.diverged_trajectory;
  }
  j["samples_per_pair"] = r.samples_per_pair;
  j["velocity_spread"] = num(r.velocity_spread);
  j["distance_error"] = num(r.distance_error);
  ordered_json pairs = ordered_json::array();
  for (int k = 0; k < r.pairs && !r.mean.empty(); ++k) {
    ordered_json p;
    p["pair_index"] = k + 1;
    p["mean"] = num(r.mean[k]);
    p["variance"] = num(r.variance[k]);
    p["variance_std_error"] = num(r.variance_std_error[k]);
    p["effective_samples"] = num(r.effective_samples[k]);
    p["variance_effective_samples"] = num(r.variance_effective_samples[k]);
    p["skewness"] = num(r.skewness[k]);
    p["excess_kurtosis"] = num(r.excess_kurtosis[k]);
    pairs.push_back(p);
  }
  j["pairs"] = pairs;
  return dump(j);
}

std::string samples_csv(const SimulationResult& r) {
  std::string out = header("pair_index,sample");
  for (std::size_t k = 0; k < r.distance_samples.size(); ++k)
    for (float x : r.distance_samples[k]) out += std::to_string(k + 1) + "," + format_number(x) + "\n";
  return out;
}

std::string validation_json(const ValidationReport& r) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["stable"] = r.stable;
  j["diverged"] = r.diverged;
  if (r.diverged) j["divergence_time"] = num(r.divergence_time);
  j["samples_per_pair"] = r.samples_per_pair;
  j["min_effective_samples"] = num(r.min_effective_samples);
  ordered_json checks = ordered_json::array();
  for (const auto& c : r.checks) {
    ordered_json cj;
    cj["check"] = c.name;
    if (c.pair >= 0) cj["pair_index"] = c.pair + 1;
    cj["observed"] = num(c.observed);
    cj["expected"] = num(c.expected);
    cj["limit"] = num(c.limit);
    cj["pass"] = c.pass;
    checks.push_back(cj);
  }
  j["checks"] = checks;
  j["all_pass"] = r.all_pass();
  return dump(j);
}

std::filesystem::path resolve_output_path(const std::filesystem::path& path) {
  if (path.is_absolute()) return path;
  if (const char* dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir != '\0')
    return std::filesystem::path(dir) / path;
  return path;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw Error("failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

}  // namespace platoon::report
