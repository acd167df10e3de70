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

#include <vector>

#include "platoon/graph.hpp"
#include "platoon/matrix.hpp"

namespace platoon {

/// Physical and design parameters of the platoon plus the risk confidence.
struct PlatoonParams {
  int n = 11;             // vehicles
  double d = 1.01;        // desired spacing [length]
  double c = 1.21;        // extreme-event offset, c >= 1
  double tau = 0.01;      // communication delay [time]
  double beta = 1.0 / 3;  // position-feedback weight [1/time]
  double g = 1.0;         // diffusion coefficient
  double epsilon = 0.1;   // confidence level in (0, 1)

  /// Throws ConfigError on any domain violation. The simulator passes
  /// allow_noiseless = true so that g = 0 (deterministic dynamics) is
  /// accepted; every analytic quantity requires g > 0.
  void validate(bool allow_noiseless = false) const;
};

/// g^2 tau^3 / (2 pi), the factor in front of every modal variance.
double variance_prefactor(const PlatoonParams& p);

struct QuadratureOptions {
  double rel_tol = 1e-8;
  int max_panels = 20000;
  /// Upper limit on the truncation radius reached by doubling.
  double max_radius = 1e7;
};

struct IntegralEstimate {
  double value = 0.0;
  /// Quadrature error on [0, R] plus the analytic tail bound, both for the
  /// full-line integral.
  double abs_error = 0.0;
  double radius = 0.0;
  int panels = 0;
  double min_denominator = 0.0;
};

/// The integrand 1 / [(s1 s2 - r^2 cos r)^2 + r^2 (s1 - r sin r)^2].
double f_integrand(double r, double s1, double s2);
double f_denominator(double r, double s1, double s2);

/// Full-line integral of f_integrand, evaluated as twice the half-line
/// integral by adaptive Gauss-Kronrod panels on [0, R] with R doubled until
/// the 1/r^4 tail bound 4/R^3 drops below tol/10 of the value.
///
/// Throws InstabilityError when (s1, s2) is outside the stability region or
/// the denominator comes within 1e-12 (1 + s1^2 s2^2) of zero, and
/// NumericalError when the panel budget is exhausted.
IntegralEstimate f_integral(double s1, double s2, const QuadratureOptions& options = {});

/// Steady-state variance of the transformed mode with Laplacian eigenvalue
/// `lambda`: g^2 tau^3 / (2 pi) * f(lambda tau, beta tau).
double sigma_z_sq(double lambda, const PlatoonParams& params, const QuadratureOptions& options = {});

/// Steady-state statistics of the inter-vehicle distances
/// x(j+1) - x(j), j = 1..n-1.
struct PairVariances {
  std::vector<double> sigma_sq;  // marginal variances, one per pair
  Matrix covariance;             // (n-1) x (n-1)
  /// Modal variances for Laplacian modes 2..n (the zero mode has no
  /// stationary variance and is not represented).
  std::vector<double> mode_variance;
};

/// Assembles the per-pair variances and the full distance covariance
/// D^T Q Sigma_z Q^T D. The integral is evaluated once per distinct
/// eigenvalue (equal within 1e-12). Throws InstabilityError when the
/// platoon is not stable and ConfigError on a size mismatch.
PairVariances pair_variances(const LaplacianSpectrum& spec, const PlatoonParams& params,
                             const QuadratureOptions& options = {});

/// Sum over modes 2..n of (e~_j . q_k)^2 for pair j; equals 2 for any
/// orthonormal eigenbasis with q_1 parallel to ones.
double pair_weight_sum(const LaplacianSpectrum& spec, int pair);

}  // namespace platoon
