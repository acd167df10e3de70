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

#include "platoon/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "platoon/errors.hpp"

namespace platoon {

double solve_a(double s1) {
  if (!(s1 > 0.0 && s1 < kHalfPi))
    throw ConfigError("solve_a: s1 must lie in (0, pi/2), got " + std::to_string(s1));

  // a sin a is strictly increasing on [0, pi/2] from 0 to pi/2.
  double lo = 0.0;
  double hi = kHalfPi;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid * std::sin(mid) < s1)
      lo = mid;
    else
      hi = mid;
  }
  double a = 0.5 * (lo + hi);
  for (int it = 0; it < 2; ++it) {
    const double deriv = std::sin(a) + a * std::cos(a);
    if (deriv <= 0.0) break;
    const double next = a - (a * std::sin(a) - s1) / deriv;
    if (!(next > 0.0 && next < kHalfPi)) break;
    a = next;
  }
  return a;
}

double s2_cap(double a) { return a / std::tan(a); }

bool in_region_S(double s1, double s2) {
  if (!(s1 > 0.0 && s1 < kHalfPi) || !(s2 > 0.0)) return false;
  return s2 < s2_cap(solve_a(s1));
}

ModeVerdict classify_mode(double lambda, double tau, double beta) {
  ModeVerdict m;
  m.lambda = lambda;
  m.s1 = lambda * tau;
  m.s2 = beta * tau;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (m.s1 > 0.0 && m.s1 < kHalfPi) {
    m.a = solve_a(m.s1);
    m.s2_cap = s2_cap(m.a);
    m.margin = std::min({m.s1, kHalfPi - m.s1, m.s2, m.s2_cap - m.s2});
    m.pass = m.s2 > 0.0 && m.s2 < m.s2_cap;
  } else {
    m.a = nan;
    m.s2_cap = nan;
    m.margin = std::min(m.s1, kHalfPi - m.s1);
    m.pass = false;
  }
  if (std::abs(m.margin) < kBoundaryGuard) {
    m.near_boundary = true;
    m.pass = false;
  }
  return m;
}

double StabilityVerdict::margin() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& mode : modes) m = std::min(m, mode.margin);
  return m;
}

StabilityVerdict platoon_stable(const LaplacianSpectrum& spec, double tau, double beta) {
  if (!(tau > 0.0) || !(beta > 0.0))
    throw ConfigError("platoon_stable: tau and beta must be strictly positive");
  StabilityVerdict v;
  v.stable = true;
  for (int k = 1; k < spec.size(); ++k) {
    v.modes.push_back(classify_mode(spec.eigenvalues[static_cast<std::size_t>(k)], tau, beta));
    v.stable = v.stable && v.modes.back().pass;
  }
  return v;
}

}  // namespace platoon
