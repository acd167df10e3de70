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

namespace platoon {

inline constexpr double kHalfPi = 1.57079632679489661923;

/// Inputs within this distance of a boundary of the stability region are
/// classified unstable and flagged.
inline constexpr double kBoundaryGuard = 1e-12;

/// Unique root a in (0, pi/2) of a * sin(a) = s1. Bracketing bisection
/// followed by two Newton steps. Throws ConfigError unless 0 < s1 < pi/2.
double solve_a(double s1);

/// Upper limit a / tan(a) on s2 for the mode whose root is `a`.
double s2_cap(double a);

/// Membership of (s1, s2) in the open delay-stability region: s1 in (0, pi/2)
/// and s2 in (0, a/tan a) with a * sin a = s1. Never throws.
bool in_region_S(double s1, double s2);

struct ModeVerdict {
  double lambda = 0.0;
  double s1 = 0.0;      // lambda * tau
  double s2 = 0.0;      // beta * tau
  double a = 0.0;       // NaN when s1 is outside (0, pi/2)
  double s2_cap = 0.0;  // NaN when s1 is outside (0, pi/2)
  bool pass = false;
  bool near_boundary = false;
  /// Signed distance to the region boundary in the (s1, s2) plane measured
  /// along the coordinate axes; negative for failing modes.
  double margin = 0.0;
};

struct StabilityVerdict {
  bool stable = false;
  std::vector<ModeVerdict> modes;  // modes 2..n, zero mode excluded

  /// Smallest per-mode margin.
  [[nodiscard]] double margin() const;
};

ModeVerdict classify_mode(double lambda, double tau, double beta);

/// Deterministic convergence test over the nonzero Laplacian modes.
/// Throws ConfigError for non-positive tau or beta.
StabilityVerdict platoon_stable(const LaplacianSpectrum& spec, double tau, double beta);

}  // namespace platoon
