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

#include <string_view>

namespace platoon {

enum class RiskBranch { Zero, Finite, Infinite };

std::string_view to_string(RiskBranch b);

/// A dimensionless risk level delta in [0, inf] with an explicit branch tag.
/// `kappa` carries kappa_eps of the distribution the value was computed for.
struct RiskValue {
  double value = 0.0;
  RiskBranch branch = RiskBranch::Zero;
  double kappa = 0.0;

  static RiskValue zero(double kappa = 0.0) { return {0.0, RiskBranch::Zero, kappa}; }
  static RiskValue infinite(double kappa = 0.0);
  /// Clamps to the zero branch for non-positive `delta`.
  static RiskValue finite(double delta, double kappa = 0.0);

  [[nodiscard]] bool is_infinite() const noexcept { return branch == RiskBranch::Infinite; }
  /// value, or +infinity on the infinite branch; for ordering comparisons.
  [[nodiscard]] double as_double() const noexcept;
};

/// Upper edge of the extreme-event set W_delta = (-inf, alpha(delta)):
/// alpha(delta) = d / (delta + c). alpha(inf) = 0.
double alpha(double delta, double d, double c);

/// Inverse of alpha on (0, d/c]: delta with alpha(delta) = a.
double alpha_inverse(double a, double d, double c);

/// Log moment generating function of N(mean, sigma^2): s mean + sigma^2 s^2 / 2.
double gaussian_mgf_log(double s, double mean, double sigma);

/// inf over s > 0 of [s alpha(delta) + log M(-s)] for a N(d, sigma^2)
/// distance: -(d - alpha)^2 / (2 sigma^2) when alpha < d, otherwise 0
/// (approached as s -> 0+).
double chernoff_exponent(double delta, double d, double sigma, double c);

/// Minimising tilt s* = (d - alpha(delta)) / sigma^2 (only meaningful when positive).
double chernoff_minimizer(double delta, double d, double sigma, double c);

/// d_eps = d / sqrt(-ln eps).
double d_epsilon(double d, double epsilon);
/// kappa_eps = d_eps / (sqrt(2) sigma).
double kappa_epsilon(double d, double sigma, double epsilon);

/// Three-branch EVaR closed form:
///   0                      if kappa >= c/(c-1)
///   1/(1 - 1/kappa) - c    if 1 < kappa < c/(c-1)
///   inf                    if kappa <= 1
/// For c = 1 the zero branch is unreachable.
RiskValue evar(double d, double sigma, double epsilon, double c);

/// EVaR branch logic applied to an already computed kappa.
RiskValue evar_from_kappa(double kappa, double c);

/// Smallest delta >= 0 with P(X <= alpha(delta)) <= eps for X ~ N(d, sigma^2).
/// With q = d + sigma * Phi^{-1}(eps): inf if q <= 0, else max(0, d/q - c).
RiskValue var(double d, double sigma, double epsilon, double c);

/// Risk level of the left-tail conditional mean m = E[X | X <= q_eps], with
/// q_eps the epsilon-quantile (equal to alpha(VaR) whenever VaR > 0):
/// inf if VaR is infinite or m <= 0, else max(0, d/m - c).
RiskValue cvar(double d, double sigma, double epsilon, double c);

/// Worst-case expected negative distance over the KL ball of radius
/// -ln eps around N(d, sigma^2): -d + sigma sqrt(-2 ln eps).
double psi_epsilon(double d, double sigma, double epsilon);

struct MeanShiftSearch {
  double psi = 0.0;    // best E_Q[-X] found
  double shift = 0.0;  // mean shift mu of the maximiser Q = N(d - mu, sigma^2)
  double grid_step = 0.0;
};

/// Restricted search for the dual value: maximise E_Q[-X] = mu - d over the
/// mean-shifted Gaussians Q = N(d - mu, sigma^2) on a uniform grid of
/// `grid_points` shifts mu in [-M, M], keeping only those with
/// KL(Q||P) = mu^2 / (2 sigma^2) <= -ln eps. M is 2 sigma sqrt(-2 ln eps).
MeanShiftSearch psi_epsilon_mean_shift_search(double d, double sigma, double epsilon,
                                              int grid_points);

}  // namespace platoon
