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

#include <span>

#include "platoon/graph.hpp"
#include "platoon/risk.hpp"
#include "platoon/variance.hpp"

namespace platoon {

/// Network-induced EVaR envelope. The largest Laplacian eigenvalue gives the
/// smallest admissible pair variance and hence the minimum risk; the
/// algebraic connectivity gives the worst case.
struct SpectralBounds {
  double lambda2 = 0.0;
  double lambdan = 0.0;
  double sigma2 = 0.0;  // sqrt(2 c1 f(lambda2 tau, beta tau))
  double sigman = 0.0;  // sqrt(2 c1 f(lambdan tau, beta tau))
  double kappa2 = 0.0;
  double kappan = 0.0;
  RiskValue e_min;  // from lambdan
  RiskValue e_max;  // from lambda2
  /// Both extreme modes fall on the finite EVaR branch:
  /// (1 - 1/c)^2 d_eps^2 <= 2 sigman^2 <= 2 sigma2^2 <= d_eps^2.
  bool precondition_ok = false;
};

/// Throws InstabilityError when the platoon is not stable.
SpectralBounds evar_bounds(const LaplacianSpectrum& spec, const PlatoonParams& params,
                           const QuadratureOptions& options = {});

/// e_min <= min EVaR and max EVaR <= e_max, with infinity ordered last.
/// `rel_tol` absorbs rounding in the eigenvector weights (they sum to 2 only
/// up to a few ulps), which matters when the sandwich is tight.
bool sandwich_holds(const SpectralBounds& bounds, std::span<const RiskValue> per_pair_evar,
                    double rel_tol = 1e-10);

}  // namespace platoon
