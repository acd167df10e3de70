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

#include <functional>
#include <span>

namespace platoon::quad {

/// Result of a finite-interval Gauss-Kronrod rule.
struct PanelEstimate {
  double value = 0.0;
  double error = 0.0;
  /// Integral of |f - mean| over the panel, used for the QUADPACK error scaling.
  double resasc = 0.0;
  double resabs = 0.0;
};

/// 15-point Kronrod rule with the embedded 7-point Gauss rule on [a, b].
/// The error estimate follows QUADPACK's qk15 scaling.
PanelEstimate gauss_kronrod15(const std::function<double(double)>& f, double a, double b);

struct AdaptiveResult {
  double value = 0.0;
  double error = 0.0;
  int panels = 0;
  bool converged = false;
};

/// Globally adaptive integration: the panel with the largest error estimate
/// is bisected until the summed error is below max(abs_tol, rel_tol*|I|) or
/// the panel budget is exhausted. `breakpoints` seeds the initial partition
/// (sorted, first = a, last = b).
AdaptiveResult integrate_adaptive(const std::function<double(double)>& f,
                                  std::span<const double> breakpoints, double abs_tol,
                                  double rel_tol, int max_panels);

}  // namespace platoon::quad
