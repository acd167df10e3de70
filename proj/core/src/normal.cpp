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

#include "platoon/normal.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

namespace platoon::normal {

double pdf(double x) {
  constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double quantile(double p) {
  if (std::isnan(p) || p < 0.0 || p > 1.0) return std::numeric_limits<double>::quiet_NaN();
  if (p == 0.0) return -std::numeric_limits<double>::infinity();
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  // cdf(x) = erfc(-x / sqrt 2) / 2, inverted directly; Boost keeps full
  // relative accuracy in both tails.
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double lower_tail_mean(double z) {
  // Mills-ratio form: pdf(z) / cdf(z) = sqrt(2/pi) / erfcx(-z / sqrt 2);
  // erfcx is not in <cmath>, so switch to the asymptotic series far left.
  if (z > -30.0) return -pdf(z) / cdf(z);
  const double z2 = z * z;
  // -pdf/cdf ~ z (1 - 1/z^2 + 3/z^4 ...)^{-1} rearranged: z + 1/z - 2/z^3 ...
  return z + 1.0 / z - 2.0 / (z2 * z) + 10.0 / (z2 * z2 * z);
}

}  // namespace platoon::normal
