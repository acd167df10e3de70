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

#include "platoon/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "platoon/errors.hpp"
#include "platoon/stability.hpp"

namespace platoon {

SpectralBounds evar_bounds(const LaplacianSpectrum& spec, const PlatoonParams& params,
                           const QuadratureOptions& options) {
  params.validate();
  if (spec.size() != params.n) throw ConfigError("evar_bounds: spectrum size does not match params.n");
  const auto verdict = platoon_stable(spec, params.tau, params.beta);
  if (!verdict.stable) throw InstabilityError("evar_bounds: platoon is not stable");

  SpectralBounds b;
  b.lambda2 = spec.lambda2();
  b.lambdan = spec.lambda_max();
  const double c1 = variance_prefactor(params);
  const double s2 = params.beta * params.tau;
  const double f2 = f_integral(b.lambda2 * params.tau, s2, options).value;
  const double fn = b.lambdan - b.lambda2 <= 1e-12 * std::max(1.0, b.lambdan)
                        ? f2
                        : f_integral(b.lambdan * params.tau, s2, options).value;
  b.sigma2 = std::sqrt(2.0 * c1 * f2);
  b.sigman = std::sqrt(2.0 * c1 * fn);

  b.e_max = evar(params.d, b.sigma2, params.epsilon, params.c);
  b.e_min = evar(params.d, b.sigman, params.epsilon, params.c);
  b.kappa2 = b.e_max.kappa;
  b.kappan = b.e_min.kappa;

  const double de = d_epsilon(params.d, params.epsilon);
  const double lower = (1.0 - 1.0 / params.c) * (1.0 - 1.0 / params.c) * de * de;
  const double vn = 2.0 * b.sigman * b.sigman;
  const double v2 = 2.0 * b.sigma2 * b.sigma2;
  b.precondition_ok = lower <= vn && vn <= v2 && v2 <= de * de;
  return b;
}

bool sandwich_holds(const SpectralBounds& bounds, std::span<const RiskValue> per_pair_evar,
                    double rel_tol) {
  if (per_pair_evar.empty()) return true;
  double lo = per_pair_evar.front().as_double();
  double hi = lo;
  for (const auto& e : per_pair_evar) {
    lo = std::min(lo, e.as_double());
    hi = std::max(hi, e.as_double());
  }
  auto leq = [rel_tol](double a, double b) {
    if (a <= b) return true;
    if (std::isinf(a) || std::isinf(b)) return false;
    return a - b <= rel_tol * std::max({1.0, std::abs(a), std::abs(b)});
  };
  return leq(bounds.e_min.as_double(), lo) && leq(hi, bounds.e_max.as_double());
}

}  // namespace platoon
