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

#include "platoon/risk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "platoon/errors.hpp"
#include "platoon/normal.hpp"

namespace platoon {
namespace {

void check_domain(double d, double sigma, double epsilon, double c) {
  if (!(d > 0.0) || !std::isfinite(d)) throw ConfigError("risk: d must be > 0");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("risk: sigma must be > 0");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("risk: epsilon must lie in (0, 1)");
  if (!(c >= 1.0) || !std::isfinite(c)) throw ConfigError("risk: c must be >= 1");
}

}  // namespace

std::string_view to_string(RiskBranch b) {
  switch (b) {
    case RiskBranch::Zero: return "zero";
    case RiskBranch::Finite: return "finite";
    case RiskBranch::Infinite: return "infinite";
  }
  return "unknown";
}

RiskValue RiskValue::infinite(double kappa) {
  return {std::numeric_limits<double>::infinity(), RiskBranch::Infinite, kappa};
}

RiskValue RiskValue::finite(double delta, double kappa) {
  if (!(delta > 0.0)) return zero(kappa);
  if (!std::isfinite(delta)) return infinite(kappa);
  return {delta, RiskBranch::Finite, kappa};
}

double RiskValue::as_double() const noexcept {
  return branch == RiskBranch::Infinite ? std::numeric_limits<double>::infinity() : value;
}

double alpha(double delta, double d, double c) {
  if (std::isinf(delta)) return 0.0;
  return d / (delta + c);
}

double alpha_inverse(double a, double d, double c) { return d / a - c; }

double gaussian_mgf_log(double s, double mean, double sigma) {
  return s * mean + 0.5 * sigma * sigma * s * s;
}

double chernoff_exponent(double delta, double d, double sigma, double c) {
  const double gap = d - alpha(delta, d, c);
  if (gap <= 0.0) return 0.0;
  return -gap * gap / (2.0 * sigma * sigma);
}

double chernoff_minimizer(double delta, double d, double sigma, double c) {
  return (d - alpha(delta, d, c)) / (sigma * sigma);
}

double d_epsilon(double d, double epsilon) { return d / std::sqrt(-std::log(epsilon)); }

double kappa_epsilon(double d, double sigma, double epsilon) {
  return d_epsilon(d, epsilon) / (std::numbers::sqrt2 * sigma);
}

RiskValue evar_from_kappa(double kappa, double c) {
  if (!(kappa > 1.0)) return RiskValue::infinite(kappa);
  if (c > 1.0 && kappa >= c / (c - 1.0)) return RiskValue::zero(kappa);
  return RiskValue::finite(1.0 / (1.0 - 1.0 / kappa) - c, kappa);
}

RiskValue evar(double d, double sigma, double epsilon, double c) {
  check_domain(d, sigma, epsilon, c);
  return evar_from_kappa(kappa_epsilon(d, sigma, epsilon), c);
}

RiskValue var(double d, double sigma, double epsilon, double c) {
  check_domain(d, sigma, epsilon, c);
  const double kappa = kappa_epsilon(d, sigma, epsilon);
  const double q = d + sigma * normal::quantile(epsilon);
  if (!(q > 0.0)) return RiskValue::infinite(kappa);
  return RiskValue::finite(d / q - c, kappa);
}

RiskValue cvar(double d, double sigma, double epsilon, double c) {
  const RiskValue v = var(d, sigma, epsilon, c);
  if (v.is_infinite()) return v;
  // Condition on the epsilon-quantile itself. It equals alpha(VaR) whenever
  // VaR > 0; when VaR is clamped to zero, alpha(0) = d / c lies below the
  // quantile and conditioning there would overstate the tail.
  const double m = d + sigma * normal::lower_tail_mean(normal::quantile(epsilon));
  if (!(m > 0.0)) return RiskValue::infinite(v.kappa);
  return RiskValue::finite(d / m - c, v.kappa);
}

double psi_epsilon(double d, double sigma, double epsilon) {
  return -d + sigma * std::sqrt(-2.0 * std::log(epsilon));
}

MeanShiftSearch psi_epsilon_mean_shift_search(double d, double sigma, double epsilon,
                                              int grid_points) {
  if (grid_points < 2) throw ConfigError("mean-shift search needs at least 2 grid points");
  const double radius = -std::log(epsilon);
  const double span = 2.0 * sigma * std::sqrt(2.0 * radius);
  MeanShiftSearch best;
  best.psi = -std::numeric_limits<double>::infinity();
  best.grid_step = 2.0 * span / (grid_points - 1);
  for (int i = 0; i < grid_points; ++i) {
    const double mu = -span + best.grid_step * i;
    const double kl = mu * mu / (2.0 * sigma * sigma);
    if (kl > radius) continue;
    const double value = mu - d;  // E_Q[-X] for Q = N(d - mu, sigma^2)
    if (value > best.psi) {
      best.psi = value;
      best.shift = mu;
    }
  }
  return best;
}

}  // namespace platoon
