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

#include "platoon/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>

#include <boost/random/normal_distribution.hpp>

#include "platoon/errors.hpp"
#include "platoon/rng.hpp"
#include "platoon/risk.hpp"

namespace platoon {
namespace {

// Running moments of x' = distance - d for every pair, plus the upper
// triangle of cross products and completed batch means.
struct TrajectoryStats {
  std::size_t count = 0;
  std::vector<double> s1, s2, s3, s4;
  std::vector<double> cross;  // row-major (pairs x pairs), upper triangle used
  std::vector<double> batch_sum1, batch_sum2;
  std::size_t batch_fill = 0;
  std::vector<double> batch_mean1, batch_mean2;  // batch-major, pairs per batch
  std::vector<std::vector<float>> samples;
  double velocity_spread = 0.0;
  double distance_error = 0.0;
  bool diverged = false;
  double divergence_time = 0.0;

  explicit TrajectoryStats(int pairs)
      : s1(pairs), s2(pairs), s3(pairs), s4(pairs), cross(static_cast<std::size_t>(pairs) * pairs),
        batch_sum1(pairs), batch_sum2(pairs) {}
};

TrajectoryStats run_trajectory(const std::vector<double>& lap, int n, const PlatoonParams& params,
                               const SimConfig& cfg, Xoshiro256pp rng) {
  const int pairs = n - 1;
  TrajectoryStats st(pairs);
  const double dt = cfg.resolved_dt(params.tau);
  const int delay = cfg.delay_steps(params.tau);
  const int stride = cfg.resolved_stride(params.tau);
  const auto burn_steps = static_cast<long long>(std::llround(cfg.t_burn / dt));
  const auto sample_steps = static_cast<long long>(std::llround(cfg.t_sample / dt));
  const long long total = burn_steps + sample_steps;
  const double batch_len_d = std::max(1.0, std::round(cfg.batch_time / (stride * dt)));
  const auto batch_len = static_cast<std::size_t>(batch_len_d);
  const double noise_scale = params.g * std::sqrt(dt / cfg.noise_substeps);
  const double beta = params.beta;
  const double thr = cfg.divergence_threshold;

  // e = x - y (deviation from the desired formation), v = velocity.
  std::vector<double> e(n, 0.0), v(n, 0.0), w(n, 0.0), u(n, 0.0);
  for (int i = 0; i < n; ++i) v[i] = cfg.initial_velocity_perturbation * std::cos(1.7 * (i + 1));
  std::vector<double> ebuf(static_cast<std::size_t>(delay) * n), vbuf(ebuf.size());
  for (int k = 0; k < delay; ++k)
    for (int i = 0; i < n; ++i) {
      ebuf[static_cast<std::size_t>(k) * n + i] = e[i];
      vbuf[static_cast<std::size_t>(k) * n + i] = v[i];
    }
  if (cfg.keep_samples) {
    st.samples.resize(pairs);
    const auto expected = static_cast<std::size_t>(sample_steps / stride + 1);
    for (auto& s : st.samples) s.reserve(expected);
  }

  boost::random::normal_distribution<double> normal;
  std::vector<double> x(pairs), xi(n);

  for (long long step = 0; step < total; ++step) {
    const auto slot = static_cast<std::size_t>(step % delay) * n;
    double* ed = ebuf.data() + slot;
    double* vd = vbuf.data() + slot;
    for (int i = 0; i < n; ++i) w[i] = vd[i] + beta * ed[i];
    for (int i = 0; i < n; ++i) {
      const double* row = lap.data() + static_cast<std::size_t>(i) * n;
      double acc = 0.0;
      for (int j = 0; j < n; ++j) acc += row[j] * w[j];
      u[i] = acc;
    }
    // The slot now becomes the state at the current time, read back in
    // `delay` steps.
    for (int i = 0; i < n; ++i) {
      ed[i] = e[i];
      vd[i] = v[i];
    }
    // Substep-major draw order: with k substeps the normals consumed match
    // those of k consecutive steps at dt / k, so the Brownian paths coincide.
    std::fill(xi.begin(), xi.end(), 0.0);
    for (int s = 0; s < cfg.noise_substeps; ++s)
      for (int i = 0; i < n; ++i) xi[i] += normal(rng);
    for (int i = 0; i < n; ++i) {
      e[i] += v[i] * dt;
      v[i] += -u[i] * dt + noise_scale * xi[i];
    }

    if ((step & 63) == 0 || step + 1 == total) {
      for (int i = 0; i < n; ++i)
        if (!(std::abs(e[i]) <= thr) || !(std::abs(v[i]) <= thr)) {
          st.diverged = true;
          st.divergence_time = (step + 1) * dt;
          return st;
        }
    }

    const long long after_burn = step + 1 - burn_steps;
    if (after_burn > 0 && after_burn % stride == 0) {
      for (int j = 0; j < pairs; ++j) x[j] = e[j + 1] - e[j];
      for (int j = 0; j < pairs; ++j) {
        const double xj = x[j];
        const double x2 = xj * xj;
        st.s1[j] += xj;
        st.s2[j] += x2;
        st.s3[j] += x2 * xj;
        st.s4[j] += x2 * x2;
        double* crow = st.cross.data() + static_cast<std::size_t>(j) * pairs;
        for (int k = j; k < pairs; ++k) crow[k] += xj * x[k];
        st.batch_sum1[j] += xj;
        st.batch_sum2[j] += x2;
        if (cfg.keep_samples) st.samples[j].push_back(static_cast<float>(params.d + xj));
      }
      ++st.count;
      if (++st.batch_fill == batch_len) {
        for (int j = 0; j < pairs; ++j) {
          st.batch_mean1.push_back(st.batch_sum1[j] / batch_len_d);
          st.batch_mean2.push_back(st.batch_sum2[j] / batch_len_d);
          st.batch_sum1[j] = st.batch_sum2[j] = 0.0;
        }
        st.batch_fill = 0;
      }
    }
  }

  const auto [vmin, vmax] = std::minmax_element(v.begin(), v.end());
  st.velocity_spread = *vmax - *vmin;
  for (int j = 0; j < pairs; ++j)
    st.distance_error = std::max(st.distance_error, std::abs(e[j + 1] - e[j]));
  return st;
}

double sample_variance(const std::vector<double>& xs, std::size_t offset, std::size_t stride,
                       std::size_t count) {
  double mean = 0.0;
  for (std::size_t k = 0; k < count; ++k) mean += xs[offset + k * stride];
  mean /= static_cast<double>(count);
  double s = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const double dlt = xs[offset + k * stride] - mean;
    s += dlt * dlt;
  }
  return s / static_cast<double>(count - 1);
}

}  // namespace

int SimConfig::delay_steps(double tau) const {
  return static_cast<int>(std::lround(tau / resolved_dt(tau)));
}

int SimConfig::resolved_stride(double tau) const {
  return sample_stride.value_or(10 * delay_steps(tau));
}

void validate_sim_config(const SimConfig& cfg, const PlatoonParams& params, double lambda2) {
  params.validate(/*allow_noiseless=*/true);
  const double dt = cfg.resolved_dt(params.tau);
  auto fail = [](const std::string& what) { throw ConfigError("invalid simulation config: " + what); };
  if (!(dt > 0.0)) fail("dt must be > 0");
  const double ratio = params.tau / dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) fail("tau / dt must be an integer");
  if (std::round(ratio) < 10.0) fail("dt must not exceed tau / 10");
  if (!(cfg.t_burn >= 0.0)) fail("burn-in must be >= 0");
  if (!(cfg.t_sample > 0.0)) fail("sampling horizon must be > 0");
  if (cfg.resolved_stride(params.tau) < 1) fail("sample stride must be >= 1");
  if (cfg.n_traj < 1) fail("trajectory count must be >= 1");
  if (cfg.threads < 1) fail("thread count must be >= 1");
  if (cfg.noise_substeps < 1) fail("noise substeps must be >= 1");
  if (!(cfg.batch_time > 0.0)) fail("batch time must be > 0");
  if (!(cfg.divergence_threshold > 0.0)) fail("divergence threshold must be > 0");
  if (cfg.burn_floor_factor > 0.0 && lambda2 > 0.0) {
    const double floor = cfg.burn_floor_factor / (params.beta * lambda2);
    if (cfg.t_burn < floor) {
      std::ostringstream msg;
      msg << "burn-in " << cfg.t_burn << " is below the floor " << floor << " = "
          << cfg.burn_floor_factor << " / (beta * lambda2)";
      fail(msg.str());
    }
  }
}

double SimulationResult::min_effective_samples() const {
  if (effective_samples.empty()) return 0.0;
  return *std::min_element(effective_samples.begin(), effective_samples.end());
}

double SimulationResult::min_variance_effective_samples() const {
  if (variance_effective_samples.empty()) return 0.0;
  return *std::min_element(variance_effective_samples.begin(), variance_effective_samples.end());
}

double SimulationResult::empirical_tail(int pair, double threshold) const {
  if (distance_samples.empty()) throw ConfigError("empirical_tail: samples were not retained");
  const auto& s = distance_samples.at(static_cast<std::size_t>(pair));
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto hits = std::count_if(s.begin(), s.end(), [&](float x) { return x <= threshold; });
  return static_cast<double>(hits) / static_cast<double>(s.size());
}

SimulationResult simulate(const WeightedGraph& graph, const PlatoonParams& params,
                          const SimConfig& cfg) {
  if (graph.size() != params.n) throw ConfigError("simulate: graph size does not match params.n");
  const Matrix L = laplacian(graph);
  validate_sim_config(cfg, params, spectrum(L).lambda2());

  const int n = params.n;
  const int pairs = n - 1;
  std::vector<double> lap(L.data().begin(), L.data().end());

  std::vector<Xoshiro256pp> streams;
  streams.reserve(static_cast<std::size_t>(cfg.n_traj));
  Xoshiro256pp base(cfg.seed);
  for (int t = 0; t < cfg.n_traj; ++t) {
    streams.push_back(base);
    base.jump();
  }

  std::vector<std::optional<TrajectoryStats>> results(static_cast<std::size_t>(cfg.n_traj));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int t = next++; t < cfg.n_traj; t = next++)
      results[static_cast<std::size_t>(t)] = run_trajectory(lap, n, params, cfg, streams[t]);
  };
  const int nthreads = std::min(cfg.threads, cfg.n_traj);
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
  }

  SimulationResult out;
  out.pairs = pairs;
  std::size_t count = 0;
  std::vector<double> s1(pairs), s2(pairs), s3(pairs), s4(pairs);
  std::vector<double> cross(static_cast<std::size_t>(pairs) * pairs);
  std::vector<double> bm1, bm2;
  if (cfg.keep_samples) out.distance_samples.resize(pairs);
  for (int t = 0; t < cfg.n_traj; ++t) {
    auto& st = *results[static_cast<std::size_t>(t)];
    if (st.diverged) {
      if (!out.diverged) {
        out.diverged = true;
        out.diverged_trajectory = t;
        out.divergence_time = st.divergence_time;
      }
      continue;
    }
    count += st.count;
    for (int j = 0; j < pairs; ++j) {
      s1[j] += st.s1[j];
      s2[j] += st.s2[j];
      s3[j] += st.s3[j];
      s4[j] += st.s4[j];
    }
    for (std::size_t k = 0; k < cross.size(); ++k) cross[k] += st.cross[k];
    bm1.insert(bm1.end(), st.batch_mean1.begin(), st.batch_mean1.end());
    bm2.insert(bm2.end(), st.batch_mean2.begin(), st.batch_mean2.end());
    if (cfg.keep_samples)
      for (int j = 0; j < pairs; ++j)
        out.distance_samples[j].insert(out.distance_samples[j].end(), st.samples[j].begin(),
                                       st.samples[j].end());
    out.velocity_spread = std::max(out.velocity_spread, st.velocity_spread);
    out.distance_error = std::max(out.distance_error, st.distance_error);
    st.samples.clear();
  }

  out.samples_per_pair = count;
  out.mean.assign(pairs, std::numeric_limits<double>::quiet_NaN());
  out.variance = out.skewness = out.excess_kurtosis = out.mean;
  out.effective_samples = out.variance_effective_samples = out.mean;
  out.mean_std_error = out.variance_std_error = out.mean;
  out.covariance = Matrix(pairs, pairs, std::numeric_limits<double>::quiet_NaN());
  if (count < 2) return out;

  const double N = static_cast<double>(count);
  const std::size_t batches = bm1.size() / static_cast<std::size_t>(pairs);
  const double batch_len = std::max(1.0, std::round(cfg.batch_time / (cfg.resolved_stride(params.tau) *
                                                                      cfg.resolved_dt(params.tau))));
  std::vector<double> mu(pairs);
  for (int j = 0; j < pairs; ++j) {
    const double m1 = s1[j] / N;
    const double r2 = s2[j] / N, r3 = s3[j] / N, r4 = s4[j] / N;
    const double c2 = r2 - m1 * m1;
    const double c3 = r3 - 3.0 * m1 * r2 + 2.0 * m1 * m1 * m1;
    const double c4 = r4 - 4.0 * m1 * r3 + 6.0 * m1 * m1 * r2 - 3.0 * m1 * m1 * m1 * m1;
    mu[j] = m1;
    out.mean[j] = params.d + m1;
    out.variance[j] = c2 * N / (N - 1.0);
    out.skewness[j] = c3 / std::pow(c2, 1.5);
    out.excess_kurtosis[j] = c4 / (c2 * c2) - 3.0;
    if (batches >= 2) {
      const double var_b1 = sample_variance(bm1, j, pairs, batches);
      const double var_b2 = sample_variance(bm2, j, pairs, batches);
      const double tau_int = std::max(1.0, batch_len * var_b1 / c2);
      out.effective_samples[j] = N / tau_int;
      out.mean_std_error[j] = std::sqrt(var_b1 / static_cast<double>(batches));
      out.variance_std_error[j] = std::sqrt(var_b2 / static_cast<double>(batches));
      // An iid Gaussian series of length m estimates the variance with
      // error variance 2 c2^2 / m.
      out.variance_effective_samples[j] =
          std::min(N, 2.0 * c2 * c2 / std::max(var_b2 / static_cast<double>(batches), 1e-300));
    }
  }
  for (int i = 0; i < pairs; ++i)
    for (int j = i; j < pairs; ++j) {
      const double cij = (cross[static_cast<std::size_t>(i) * pairs + j] / N - mu[i] * mu[j]) * N / (N - 1.0);
      out.covariance(i, j) = cij;
      out.covariance(j, i) = cij;
    }
  return out;
}

TailCheck empirical_tail_check(const SimulationResult& res, double delta, const PlatoonParams& params,
                               std::span<const double> sigma) {
  if (res.samples_per_pair == 0) throw ConfigError("empirical_tail_check: no samples");
  if (static_cast<int>(sigma.size()) != res.pairs)
    throw ConfigError("empirical_tail_check: one sigma per pair required");
  TailCheck out;
  out.delta = delta;
  out.threshold = alpha(delta, params.d, params.c);
  for (int j = 0; j < res.pairs; ++j) {
    const double p = res.empirical_tail(j, out.threshold);
    const double ess = std::isfinite(res.effective_samples[j]) ? res.effective_samples[j]
                                                               : static_cast<double>(res.samples_per_pair);
    out.p_hat.push_back(p);
    out.std_error.push_back(std::sqrt(std::max(p * (1.0 - p), 0.0) / ess));
    out.bound.push_back(std::exp(chernoff_exponent(delta, params.d, sigma[j], params.c)));
  }
  return out;
}

TailCheck empirical_tail_check(const SimulationResult& res, double delta, const PlatoonParams& params) {
  std::vector<double> sigma(res.variance.size());
  for (std::size_t j = 0; j < sigma.size(); ++j) sigma[j] = std::sqrt(res.variance[j]);
  return empirical_tail_check(res, delta, params, sigma);
}

}  // namespace platoon
