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

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "platoon/graph.hpp"
#include "platoon/matrix.hpp"
#include "platoon/variance.hpp"

namespace platoon {

struct SimConfig {
  /// Time step; defaults to tau / 10. tau / dt must be an integer.
  std::optional<double> dt;
  double t_burn = 30.0;
  /// Sampling horizon per trajectory.
  double t_sample = 2000.0;
  /// Steps between retained samples; defaults to 10 * (tau / dt).
  std::optional<int> sample_stride;
  int n_traj = 200;
  std::uint64_t seed = 1;
  int threads = 1;
  /// Retain every distance sample (as float). Needed for tail frequencies.
  bool keep_samples = false;
  /// Batch length used for the batch-means error and effective sample size.
  double batch_time = 50.0;
  /// Amplitude of the deterministic initial velocity profile
  /// v_i = A cos(1.7 i), i = 1..n, held constant on [-tau, 0].
  double initial_velocity_perturbation = 0.0;
  /// Each Brownian increment is the normalised sum of this many standard
  /// normals. A run at dt with 2 substeps consumes the same normal stream as
  /// a run at dt/2 with 1 substep, so the two share a Brownian path.
  int noise_substeps = 1;
  double divergence_threshold = 1e12;
  /// Burn-in must cover burn_floor_factor / (beta lambda2); 0 disables.
  double burn_floor_factor = 20.0;

  [[nodiscard]] double resolved_dt(double tau) const { return dt.value_or(tau / 10.0); }
  [[nodiscard]] int delay_steps(double tau) const;
  [[nodiscard]] int resolved_stride(double tau) const;
};

/// Throws ConfigError when the configuration violates its invariants for
/// the given platoon (dt <= tau/10, integral tau/dt, burn-in floor, ...).
void validate_sim_config(const SimConfig& cfg, const PlatoonParams& params, double lambda2);

struct SimulationResult {
  int pairs = 0;
  std::size_t samples_per_pair = 0;
  /// Per-pair samples, empty unless SimConfig::keep_samples.
  std::vector<std::vector<float>> distance_samples;

  std::vector<double> mean;
  std::vector<double> variance;
  std::vector<double> skewness;
  std::vector<double> excess_kurtosis;
  Matrix covariance;
  /// Batch-means estimates: effective sample size of each distance series
  /// and standard errors of the mean and variance estimators.
  std::vector<double> effective_samples;
  /// Effective sample size of the variance estimator: the length of an iid
  /// Gaussian series whose sample variance would have the same error.
  std::vector<double> variance_effective_samples;
  std::vector<double> mean_std_error;
  std::vector<double> variance_std_error;

  /// Largest end-of-run max_ij |v_i - v_j| over trajectories.
  double velocity_spread = 0.0;
  /// Largest end-of-run max_j |d_j - d| over trajectories.
  double distance_error = 0.0;

  bool diverged = false;
  int diverged_trajectory = -1;
  double divergence_time = 0.0;

  [[nodiscard]] double min_effective_samples() const;
  [[nodiscard]] double min_variance_effective_samples() const;
  /// Fraction of retained samples of `pair` with distance <= threshold.
  /// Throws ConfigError when samples were not kept.
  [[nodiscard]] double empirical_tail(int pair, double threshold) const;
};

/// Euler-Maruyama integration of the delayed closed loop
///   dx = v dt,  dv = -L v(t - tau) dt - beta L (x(t - tau) - y) dt + g dW
/// with a ring buffer holding the last tau/dt states. Trajectories use
/// non-overlapping xoshiro256++ streams (2^128 jumps) derived from the seed,
/// and results are reduced in trajectory order, so output is identical for
/// any thread count. A trajectory whose state exceeds the divergence
/// threshold stops and is reported; its samples are discarded.
SimulationResult simulate(const WeightedGraph& graph, const PlatoonParams& params,
                          const SimConfig& cfg);

struct TailCheck {
  double delta = 0.0;
  double threshold = 0.0;  // alpha(delta)
  std::vector<double> p_hat;
  std::vector<double> std_error;  // binomial, using the effective sample size
  std::vector<double> bound;      // exp(chernoff_exponent)
};

/// Empirical left-tail frequency P(d_j <= alpha(delta)) per pair against the
/// Chernoff bound computed with `sigma` (one entry per pair).
TailCheck empirical_tail_check(const SimulationResult& res, double delta, const PlatoonParams& params,
                               std::span<const double> sigma);

/// Same, with the empirical standard deviations as sigma.
TailCheck empirical_tail_check(const SimulationResult& res, double delta, const PlatoonParams& params);

}  // namespace platoon
