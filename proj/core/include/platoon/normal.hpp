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

namespace platoon::normal {

double pdf(double x);

/// Standard normal CDF via the complementary error function, accurate in
/// both tails.
double cdf(double x);

/// Inverse of cdf on (0, 1), via Boost.Math's inverse complementary error
/// function. Returns -inf / +inf at 0 / 1 and NaN outside [0, 1].
double quantile(double p);

/// E[X | X <= z] for X ~ N(0, 1), i.e. -pdf(z) / cdf(z). Stable far in the
/// left tail, where it behaves like z.
double lower_tail_mean(double z);

}  // namespace platoon::normal
