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

#include "platoon/variance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "platoon/errors.hpp"
#include "platoon/quadrature.hpp"
#include "platoon/stability.hpp"

namespace platoon {

void PlatoonParams::validate(bool allow_noiseless) const {
  auto fail = [](const std::string& what) { throw ConfigError("invalid platoon parameter: " + what); };
  if (n < 2) fail("n must be >= 2");
  if (!(d > 0.0) || !std::isfinite(d)) fail("d must be > 0");
  if (!(c >= 1.0) || !std::isfinite(c)) fail("c must be >= 1");
  if (!(tau > 0.0) || !std::isfinite(tau)) fail("tau must be > 0");
  if (!(beta > 0.0) || !std::isfinite(beta)) fail("beta must be > 0");
  if (allow_noiseless) {
    if (!(g >= 0.0) || !std::isfinite(g)) fail("g must be >= 0");
  } else if (!(g > 0.0) || !std::isfinite(g)) {
    fail("g must be > 0");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) fail("epsilon must lie in (0, 1)");
}

double variance_prefactor(const PlatoonParams& p) {
  return p.g * p.g * p.tau * p.tau * p.tau / (2.0 * std::numbers::pi);
}

double f_denominator(double r, double s1, double s2) {
  const double first = s1 * s2 - r * r * std::cos(r);
  const double second = s1 - r * std::sin(r);
  return first * first + r * r * second * second;
}

double f_integrand(double r, double s1, double s2) { return 1.0 / f_denominator(r, s1, s2); }

IntegralEstimate f_integral(double s1, double s2, const QuadratureOptions& options) {
  if (!in_region_S(s1, s2)) {
    std::ostringstream msg;
    msg << "f_integral: (s1, s2) = (" << s1 << ", " << s2 << ") is outside the stability region";
    throw InstabilityError(msg.str());
  }
  const double tol = options.rel_tol;

  double min_den = f_denominator(0.0, s1, s2);
  auto integrand = [&](double r) {
    const double den = f_denominator(r, s1, s2);
    min_den = std::min(min_den, den);
    return 1.0 / den;
  };

  // Seed the partition around the low-frequency resonance near
  // r = sqrt(s1 s2) (width ~ s1/2) and at quarter periods further out.
  double radius = 10.0 * std::max({1.0, s1, std::sqrt(s1 * s2)});
  std::vector<double> bps{0.0, radius};
  const double peak = std::sqrt(s1 * s2);
  const double width = 0.5 * s1;
  for (double k : {0.125, 0.25, 0.5, 1.0, 2.0, 4.0}) {
    bps.push_back(peak - k * width);
    bps.push_back(peak + k * width);
    bps.push_back(peak * k);
  }
  bps.push_back(std::sqrt(s1));
  for (double r = 0.5 * std::numbers::pi; r < radius; r += 0.5 * std::numbers::pi) bps.push_back(r);
  std::erase_if(bps, [&](double r) { return !(r >= 0.0 && r <= radius); });
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end(),
                        [](double x, double y) { return std::abs(x - y) <= 1e-15 * (1.0 + y); }),
            bps.end());

  auto head = quad::integrate_adaptive(integrand, bps, 0.0, 0.5 * tol, options.max_panels);
  double half_value = head.value;
  double half_error = head.error;
  int panels = head.panels;
  bool converged = head.converged;

  auto tail_bound = [](double R) { return 4.0 / (R * R * R); };
  double piece_tol = tol / 8.0;
  while (tail_bound(radius) > 0.1 * tol * 2.0 * std::abs(half_value)) {
    if (2.0 * radius > options.max_radius)
      throw NumericalError("f_integral: truncation radius exceeded max_radius");
    std::vector<double> ext;
    const double step = std::numbers::pi;
    for (double r = radius; r < 2.0 * radius; r += step) ext.push_back(r);
    ext.push_back(2.0 * radius);
    auto piece = quad::integrate_adaptive(integrand, ext, piece_tol * std::abs(half_value), 0.0,
                                          options.max_panels);
    half_value += piece.value;
    half_error += piece.error;
    panels += piece.panels;
    converged = converged && piece.converged;
    piece_tol *= 0.5;
    radius *= 2.0;
  }

  if (min_den < 1e-12 * (1.0 + s1 * s1 * s2 * s2)) {
    std::ostringstream msg;
    msg << "f_integral: near-instability at (s1, s2) = (" << s1 << ", " << s2
        << "), integrand denominator fell to " << min_den;
    throw InstabilityError(msg.str());
  }

  IntegralEstimate out;
  out.value = 2.0 * half_value;
  out.abs_error = 2.0 * half_error + tail_bound(radius);
  out.radius = radius;
  out.panels = panels;
  out.min_denominator = min_den;
  if (!converged || !(out.abs_error <= tol * std::abs(out.value))) {
    std::ostringstream msg;
    msg << "f_integral: tolerance " << tol << " not reached within " << options.max_panels
        << " panels at (s1, s2) = (" << s1 << ", " << s2 << ")";
    throw NumericalError(msg.str());
  }
  return out;
}

double sigma_z_sq(double lambda, const PlatoonParams& params, const QuadratureOptions& options) {
  if (!(lambda > 0.0)) throw ConfigError("sigma_z_sq: eigenvalue must be positive");
  const double f = f_integral(lambda * params.tau, params.beta * params.tau, options).value;
  return variance_prefactor(params) * f;
}

double pair_weight_sum(const LaplacianSpectrum& spec, int pair) {
  const auto& q = spec.eigenvectors;
  const auto j = static_cast<std::size_t>(pair);
  double s = 0.0;
  for (std::size_t k = 1; k < q.cols(); ++k) {
    const double proj = q(j + 1, k) - q(j, k);
    s += proj * proj;
  }
  return s;
}

PairVariances pair_variances(const LaplacianSpectrum& spec, const PlatoonParams& params,
                             const QuadratureOptions& options) {
  params.validate();
  if (spec.size() != params.n)
    throw ConfigError("pair_variances: spectrum has " + std::to_string(spec.size()) +
                      " modes but params.n = " + std::to_string(params.n));
  const auto verdict = platoon_stable(spec, params.tau, params.beta);
  if (!verdict.stable) {
    std::ostringstream msg;
    msg << "pair_variances: platoon is not stable (failing modes:";
    for (const auto& m : verdict.modes)
      if (!m.pass) msg << " lambda=" << m.lambda;
    msg << ")";
    throw InstabilityError(msg.str());
  }

  const auto n = static_cast<std::size_t>(params.n);
  PairVariances out;
  out.mode_variance.resize(n - 1);
  double cached_lambda = -1.0;
  double cached_value = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    const double lambda = spec.eigenvalues[k];
    if (cached_lambda < 0.0 || std::abs(lambda - cached_lambda) > 1e-12 * std::max(1.0, lambda)) {
      cached_lambda = lambda;
      cached_value = sigma_z_sq(lambda, params, options);
    }
    out.mode_variance[k - 1] = cached_value;
  }

  // proj(j, k) = e~_j . q_k
  const auto& q = spec.eigenvectors;
  Matrix proj(n - 1, n - 1);
  for (std::size_t j = 0; j + 1 < n; ++j)
    for (std::size_t k = 1; k < n; ++k) proj(j, k - 1) = q(j + 1, k) - q(j, k);

  out.covariance = Matrix(n - 1, n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = i; j + 1 < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k + 1 < n; ++k) s += proj(i, k) * proj(j, k) * out.mode_variance[k];
      out.covariance(i, j) = s;
      out.covariance(j, i) = s;
    }
  out.sigma_sq.resize(n - 1);
  for (std::size_t j = 0; j + 1 < n; ++j) out.sigma_sq[j] = out.covariance(j, j);
  return out;
}

}  // namespace platoon
