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

#include <cmath>

#include <gtest/gtest.h>

#include "platoon/errors.hpp"
#include "platoon/graph.hpp"
#include "platoon/risk.hpp"
#include "platoon/rng.hpp"
#include "platoon/simulator.hpp"
#include "platoon/variance.hpp"

namespace platoon {
namespace {

PlatoonParams params_for(int n) {
  PlatoonParams p;
  p.n = n;
  return p;
}

SimConfig short_run(double horizon, int traj = 1) {
  SimConfig c;
  c.t_burn = 30.0;
  c.t_sample = horizon;
  c.n_traj = traj;
  return c;
}

TEST(Xoshiro, JumpGivesDistinctReproducibleStreams) {
  Xoshiro256pp a(42), b(42);
  EXPECT_EQ(a, b);
  b.jump();
  EXPECT_NE(a, b);
  Xoshiro256pp c(42);
  c.jump();
  EXPECT_EQ(b, c);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(b(), c());
  EXPECT_NE(Xoshiro256pp(1)(), Xoshiro256pp(2)());
}

TEST(SimConfig, Validation) {
  const auto p = params_for(5);
  SimConfig c;
  EXPECT_NO_THROW(validate_sim_config(c, p, 5.0));
  c.dt = 0.003;  // tau / dt not an integer
  EXPECT_THROW(validate_sim_config(c, p, 5.0), ConfigError);
  c.dt = 0.002;  // tau / dt = 5 < 10
  EXPECT_THROW(validate_sim_config(c, p, 5.0), ConfigError);
  c.dt = 0.0005;
  EXPECT_NO_THROW(validate_sim_config(c, p, 5.0));
  c = {};
  c.t_burn = 1.0;  // below 20 / (beta lambda2) = 12
  EXPECT_THROW(validate_sim_config(c, p, 5.0), ConfigError);
  c.burn_floor_factor = 0.0;
  EXPECT_NO_THROW(validate_sim_config(c, p, 5.0));
  c = {};
  c.n_traj = 0;
  EXPECT_THROW(validate_sim_config(c, p, 5.0), ConfigError);
  c = {};
  c.sample_stride = 0;
  EXPECT_THROW(validate_sim_config(c, p, 5.0), ConfigError);
}

TEST(Simulate, NoiselessStableConfigurationConverges) {
  auto p = params_for(5);
  p.g = 0.0;
  const auto g = build_topology(TopologyKind::Complete, 5, UniformWeight{1.0});
  SimConfig c = short_run(60.0);
  c.initial_velocity_perturbation = 1.0;
  c.sample_stride = 1000;
  const auto r = simulate(g, p, c);
  EXPECT_FALSE(r.diverged);
  EXPECT_LT(r.velocity_spread, 1e-6);
  EXPECT_LT(r.distance_error, 1e-6);
}

TEST(Simulate, NoiselessUnstableConfigurationDiverges) {
  auto p = params_for(11);
  p.g = 0.0;
  p.tau = 0.2;  // lambda tau = 2.2 > pi / 2
  const auto g = build_topology(TopologyKind::Complete, 11, UniformWeight{1.0});
  SimConfig c = short_run(2000.0);
  c.initial_velocity_perturbation = 1.0;
  const auto r = simulate(g, p, c);
  EXPECT_TRUE(r.diverged);
  EXPECT_GT(r.divergence_time, 0.0);
  EXPECT_EQ(r.diverged_trajectory, 0);
}

TEST(Simulate, EquilibriumHistoryStaysPutWithoutNoise) {
  auto p = params_for(5);
  p.g = 0.0;
  const auto r = simulate(build_topology(TopologyKind::Path, 5, UniformWeight{1.0}), p, [] {
    SimConfig c = short_run(10.0);
    c.burn_floor_factor = 0.0;
    return c;
  }());
  EXPECT_EQ(r.velocity_spread, 0.0);
  EXPECT_EQ(r.distance_error, 0.0);
}

TEST(Simulate, BitReproducibleAcrossRunsAndThreads) {
  const auto p = params_for(5);
  const auto g = build_topology(TopologyKind::PCycle, 5, RandomWeight{0.8, 1.2, 1}, 2);
  SimConfig c = short_run(50.0, 5);
  c.t_burn = 60.0;  // above the 20 / (beta lambda2) floor for the 5-vehicle 2-cycle
  c.keep_samples = true;
  c.seed = 99;
  const auto a = simulate(g, p, c);
  c.threads = 3;
  const auto b = simulate(g, p, c);
  EXPECT_EQ(a.distance_samples, b.distance_samples);
  EXPECT_EQ(a.variance, b.variance);
  EXPECT_EQ(a.covariance, b.covariance);
  c.seed = 100;
  const auto d = simulate(g, p, c);
  EXPECT_NE(a.distance_samples, d.distance_samples);
  EXPECT_EQ(a.samples_per_pair, a.distance_samples[0].size());
  for (const auto& s : a.distance_samples) EXPECT_EQ(s.size(), a.samples_per_pair);
}

TEST(Simulate, TrajectoriesUseDistinctStreams) {
  const auto p = params_for(3);
  const auto g = build_topology(TopologyKind::Complete, 3, UniformWeight{1.0});
  SimConfig c = short_run(5.0, 2);
  c.keep_samples = true;
  const auto r = simulate(g, p, c);
  const std::size_t half = r.samples_per_pair / 2;
  const std::vector<float> first(r.distance_samples[0].begin(), r.distance_samples[0].begin() + half);
  const std::vector<float> second(r.distance_samples[0].begin() + half, r.distance_samples[0].end());
  EXPECT_NE(first, second);
}

TEST(Simulate, VarianceAgreesWithAnalyticModel) {
  const auto p = params_for(5);
  const auto g = build_topology(TopologyKind::Complete, 5, UniformWeight{1.0});
  const auto analytic = pair_variances(spectrum(g), p);
  SimConfig c = short_run(2500.0, 8);
  c.sample_stride = 200;
  const auto r = simulate(g, p, c);
  for (int j = 0; j < 4; ++j) {
    EXPECT_NEAR(r.variance[j], analytic.sigma_sq[j], 4.0 * r.variance_std_error[j]) << "pair " << j;
    EXPECT_NEAR(r.mean[j], p.d, 4.0 * r.mean_std_error[j]);
    EXPECT_GE(r.variance[j], 0.0);
  }
}

TEST(Simulate, DistancesLookGaussian) {
  const auto p = params_for(5);
  const auto g = build_topology(TopologyKind::Complete, 5, UniformWeight{1.0});
  SimConfig c = short_run(6000.0, 8);
  const auto r = simulate(g, p, c);
  ASSERT_GE(r.samples_per_pair, 100000u);
  for (int j = 0; j < 4; ++j) {
    EXPECT_LT(std::abs(r.skewness[j]), 0.1);
    EXPECT_LT(std::abs(r.excess_kurtosis[j]), 0.2);
  }
}

TEST(Simulate, HalvingTheStepKeepsVariancesWithinMonteCarloError) {
  // dt with two noise substeps consumes the same normals as dt / 2 with one,
  // so both runs follow the same Brownian path and the comparison isolates
  // the discretisation error.
  const auto p = params_for(5);
  const auto g = build_topology(TopologyKind::Complete, 5, UniformWeight{1.0});
  SimConfig coarse = short_run(3000.0, 4);
  coarse.dt = 1e-3;
  coarse.noise_substeps = 2;
  coarse.sample_stride = 100;
  SimConfig fine = coarse;
  fine.dt = 5e-4;
  fine.noise_substeps = 1;
  fine.sample_stride = 200;
  const auto a = simulate(g, p, coarse), b = simulate(g, p, fine);
  for (int j = 0; j < 4; ++j)
    EXPECT_LT(std::abs(a.variance[j] - b.variance[j]), b.variance_std_error[j]) << "pair " << j;
}

TEST(EmpiricalTail, ChernoffBoundAtEvarAndMedian) {
  auto p = params_for(5);
  const auto g = build_topology(TopologyKind::Complete, 5, UniformWeight{1.0});
  const auto analytic = pair_variances(spectrum(g), p);
  std::vector<double> sigma;
  for (double s : analytic.sigma_sq) sigma.push_back(std::sqrt(s));
  SimConfig c = short_run(3000.0, 4);
  c.keep_samples = true;
  const auto r = simulate(g, p, c);

  const auto e = evar(p.d, sigma[0], p.epsilon, p.c);
  ASSERT_EQ(e.branch, RiskBranch::Finite);
  const auto at_evar = empirical_tail_check(r, e.value, p, sigma);
  for (int j = 0; j < 4; ++j) {
    EXPECT_LE(at_evar.p_hat[j], p.epsilon + 3.0 * at_evar.std_error[j]);
    EXPECT_NEAR(at_evar.bound[j], p.epsilon, 1e-9);
  }

  p.c = 1.0;
  const auto median = empirical_tail_check(r, 0.0, p, sigma);
  for (int j = 0; j < 4; ++j) {
    EXPECT_NEAR(median.p_hat[j], 0.5, 4.0 * median.std_error[j]);
    EXPECT_DOUBLE_EQ(median.threshold, p.d);
  }

  double prev = 2.0;
  for (double delta = 0.0; delta < 3.0; delta += 0.1) {
    const double bound = empirical_tail_check(r, delta, p, sigma).bound[0];
    EXPECT_LE(bound, prev);
    prev = bound;
  }
}

TEST(EmpiricalTail, RequiresKeptSamples) {
  const auto p = params_for(3);
  const auto r = simulate(build_topology(TopologyKind::Complete, 3, UniformWeight{1.0}), p, short_run(5.0));
  EXPECT_THROW((void)r.empirical_tail(0, 1.0), ConfigError);
}

}  // namespace
}  // namespace platoon
