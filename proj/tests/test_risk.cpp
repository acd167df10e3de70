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

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "platoon/errors.hpp"
#include "platoon/normal.hpp"
#include "platoon/risk.hpp"

namespace platoon {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Draw {
  double d, sigma, epsilon, c;
};

std::vector<Draw> random_draws(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(0.2, 5.0), rel_sigma(0.01, 1.5), eps(0.001, 0.6), c(1.0, 3.0);
  std::vector<Draw> out;
  for (int k = 0; k < count; ++k) {
    const double dd = d(rng);
    out.push_back({dd, dd * rel_sigma(rng), eps(rng), c(rng)});
  }
  return out;
}

TEST(Normal, CdfAndQuantileRoundTrip) {
  EXPECT_NEAR(normal::cdf(0.0), 0.5, 1e-16);
  EXPECT_NEAR(normal::cdf(-1.959963984540054), 0.025, 1e-15);
  EXPECT_NEAR(normal::quantile(0.975), 1.959963984540054, 1e-12);
  EXPECT_NEAR(normal::quantile(0.1), -1.2815515655446004, 1e-12);
  for (double p : {1e-300, 1e-15, 1e-6, 0.01, 0.3, 0.5, 0.77, 0.999, 1 - 1e-12}) {
    const double x = normal::quantile(p);
    EXPECT_NEAR(normal::cdf(x), p, 1e-12 * std::max(p, 1e-3)) << p;
  }
  EXPECT_EQ(normal::quantile(0.0), -kInf);
  EXPECT_EQ(normal::quantile(1.0), kInf);
  EXPECT_TRUE(std::isnan(normal::quantile(1.5)));
}

TEST(Normal, LowerTailMeanAgreesWithQuadrature) {
  // E[Z | Z <= z] = -phi(z) / Phi(z); compare against a midpoint sum.
  for (double z : {-3.0, -1.0, 0.0, 0.7, 2.5}) {
    double num = 0.0, den = 0.0;
    const double h = 1e-4;
    for (double x = -40.0 + h / 2; x < z; x += h) {
      const double w = std::exp(-0.5 * x * x);
      num += x * w;
      den += w;
    }
    EXPECT_NEAR(normal::lower_tail_mean(z), num / den, 1e-6) << z;
  }
  // Deep tail: with x = z - u the conditional density is proportional to
  // exp(z u - u^2 / 2) on u >= 0, so E[Z | Z <= z] = z - E[u].
  for (double z : {-25.0, -40.0, -80.0}) {
    double num = 0.0, den = 0.0;
    const double h = 1e-6;
    for (double u = h / 2; u < 50.0 / -z; u += h) {
      const double w = std::exp(z * u - 0.5 * u * u);
      num += u * w;
      den += w;
    }
    EXPECT_NEAR(normal::lower_tail_mean(z), z - num / den, 1e-9) << z;
  }
}

TEST(Alpha, Examples) {
  EXPECT_DOUBLE_EQ(alpha(0.0, 1.01, 1.21), 1.01 / 1.21);
  EXPECT_LT(alpha(1e12, 1.01, 1.21), 1e-11);
  EXPECT_GT(alpha(1e12, 1.01, 1.21), 0.0);
  EXPECT_EQ(alpha(kInf, 1.01, 1.21), 0.0);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int k = 0; k < 1000; ++k) {
    double a = u(rng), b = u(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    EXPECT_GT(alpha(a, 1.01, 1.21), alpha(b, 1.01, 1.21));
    EXPECT_NEAR(alpha_inverse(alpha(a, 1.01, 1.21), 1.01, 1.21), a, 1e-10 * (1 + a));
  }
}

TEST(GaussianMgf, Properties) {
  EXPECT_EQ(gaussian_mgf_log(0.0, 1.3, 0.4), 0.0);
  const double h = 1e-4, sigma = 0.7;
  const double second = (gaussian_mgf_log(h, 2.0, sigma) - 2 * gaussian_mgf_log(0.0, 2.0, sigma) +
                         gaussian_mgf_log(-h, 2.0, sigma)) / (h * h);
  EXPECT_NEAR(second, sigma * sigma, 1e-6);
  for (double s : {0.1, 1.0, 3.7}) EXPECT_DOUBLE_EQ(gaussian_mgf_log(-s, 0.0, sigma), gaussian_mgf_log(s, 0.0, sigma));
}

TEST(ChernoffExponent, ClosedFormExamples) {
  // alpha(delta) = d: zero gap.
  EXPECT_EQ(chernoff_exponent(0.0, 1.0, 0.5, 1.0), 0.0);
  // d = 1, sigma = 1, alpha -> 0 as delta -> infinity.
  EXPECT_NEAR(chernoff_exponent(1e15, 1.0, 1.0, 1.0), -0.5, 1e-12);
  // alpha >= d is impossible for c >= 1 except delta = 0, c = 1.
  EXPECT_EQ(chernoff_exponent(0.0, 2.0, 0.3, 1.0), 0.0);
}

TEST(ChernoffExponent, MatchesGoldenSectionOracle) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> delta(0.0, 5.0), d(0.3, 3.0), sigma(0.05, 1.0), c(1.0, 2.5);
  for (int k = 0; k < 500; ++k) {
    const double dl = delta(rng), dd = d(rng), s = sigma(rng), cc = c(rng);
    const double a = alpha(dl, dd, cc);
    const double s_star = (dd - a) / (s * s);
    auto objective = [&](double t) { return t * a + gaussian_mgf_log(-t, dd, s); };
    const double numeric = oracle::golden_section_min(objective, 0.0, 10.0 * std::max(s_star, 1e-6));
    EXPECT_NEAR(chernoff_exponent(dl, dd, s, cc), numeric, 1e-9);
    EXPECT_NEAR(chernoff_minimizer(dl, dd, s, cc), s_star, 1e-12 * (1 + s_star));
  }
}

TEST(Evar, ClosedFormBranches) {
  // Junction with the zero branch at kappa = c / (c - 1).
  EXPECT_NEAR(evar_from_kappa(2.0, 2.0).value, 0.0, 1e-15);
  EXPECT_NEAR(evar_from_kappa(2.0 - 1e-9, 2.0).value, 0.0, 1e-8);
  EXPECT_EQ(evar_from_kappa(2.5, 2.0).branch, RiskBranch::Zero);
  // Direct arithmetic.
  const auto mid = evar_from_kappa(1.5, 1.21);
  EXPECT_EQ(mid.branch, RiskBranch::Finite);
  EXPECT_NEAR(mid.value, 1.79, 1e-12);
  // kappa <= 1 is infinite; kappa slightly above 1 is large and finite.
  EXPECT_EQ(evar_from_kappa(1.0, 1.21).branch, RiskBranch::Infinite);
  EXPECT_EQ(evar_from_kappa(0.3, 1.21).branch, RiskBranch::Infinite);
  EXPECT_GT(evar_from_kappa(1.0 + 1e-9, 1.21).value, 1e8);
  // c = 1 never reaches the zero branch.
  EXPECT_EQ(evar_from_kappa(1e9, 1.0).branch, RiskBranch::Finite);
}

TEST(Evar, ReferenceValueMatchesDefinitionalScan) {
  const double d = 1.01, c = 1.21, eps = 0.1;
  const double sigma = 0.157737886087;  // complete graph, reference parameters
  const auto e = evar(d, sigma, eps, c);
  ASSERT_EQ(e.branch, RiskBranch::Finite);
  EXPECT_NEAR(e.value, oracle::evar_grid_scan(d, sigma, eps, c), 1e-6);
  EXPECT_NEAR(e.kappa, d / std::sqrt(-std::log(eps)) / (std::sqrt(2.0) * sigma), 1e-14);
}

TEST(Evar, ChernoffBoundIsTightAtEvar) {
  for (const auto& x : random_draws(300, 21)) {
    const auto e = evar(x.d, x.sigma, x.epsilon, x.c);
    if (e.branch != RiskBranch::Finite) continue;
    const double at = std::exp(chernoff_exponent(e.value, x.d, x.sigma, x.c));
    EXPECT_LE(at, x.epsilon * (1 + 1e-12));
    EXPECT_NEAR(at, x.epsilon, 1e-9);
    const double below = std::exp(chernoff_exponent(e.value * (1 - 1e-6) - 1e-9, x.d, x.sigma, x.c));
    EXPECT_GT(below, x.epsilon);
  }
}

TEST(Evar, Monotonicity) {
  const double d = 1.01, c = 1.21;
  double prev = -1.0;
  for (double sigma = 0.05; sigma < 0.6; sigma += 0.01) {
    const double v = evar(d, sigma, 0.1, c).as_double();
    EXPECT_GE(v, prev);
    prev = v;
  }
  prev = -1.0;
  for (double eps : {0.9, 0.5, 0.3, 0.2, 0.1, 0.05, 0.01, 0.001}) {
    const double v = evar(d, 0.2, eps, c).as_double();
    EXPECT_GE(v, prev);
    prev = v;
  }
  prev = kInf;
  for (double kappa = 1.001; kappa < 1.21 / 0.21; kappa += 0.01) {
    const double v = evar_from_kappa(kappa, c).value;
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(Evar, DomainErrors) {
  EXPECT_THROW(evar(0.0, 1.0, 0.1, 1.2), ConfigError);
  EXPECT_THROW(evar(1.0, 0.0, 0.1, 1.2), ConfigError);
  EXPECT_THROW(evar(1.0, 1.0, 0.0, 1.2), ConfigError);
  EXPECT_THROW(evar(1.0, 1.0, 1.0, 1.2), ConfigError);
  EXPECT_THROW(evar(1.0, 1.0, 0.1, 0.9), ConfigError);
  EXPECT_THROW(var(1.0, 1.0, 0.1, 0.9), ConfigError);
  EXPECT_THROW(cvar(1.0, -1.0, 0.1, 1.2), ConfigError);
}

TEST(Var, Examples) {
  EXPECT_EQ(var(1.01, 0.3, 0.5, 1.21).value, 0.0);
  EXPECT_EQ(var(1.01, 0.3, 0.5, 1.0).value, 0.0);
  EXPECT_EQ(var(1.0, 10.0, 0.1, 1.2).branch, RiskBranch::Infinite);
}

TEST(VarCvar, MatchMonteCarloOracle) {
  const double d = 1.01, sigma = 0.2, eps = 0.1, c = 1.21;
  const auto mc = oracle::monte_carlo_var_cvar(d, sigma, eps, c, 10'000'000, 77);
  const auto v = var(d, sigma, eps, c), cv = cvar(d, sigma, eps, c);
  // Quantile standard error sqrt(eps(1-eps)/N)/phi(z) ~ 1.7e-4 sigma; the
  // induced delta error is far below 1e-3.
  EXPECT_NEAR(v.value, mc.var, 1e-3);
  EXPECT_NEAR(cv.value, mc.cvar, 0.01 * cv.value);
}

TEST(RiskOrdering, ThousandRandomDraws) {
  int finite = 0;
  for (const auto& x : random_draws(1000, 31)) {
    const auto v = var(x.d, x.sigma, x.epsilon, x.c);
    const auto cv = cvar(x.d, x.sigma, x.epsilon, x.c);
    const auto e = evar(x.d, x.sigma, x.epsilon, x.c);
    EXPECT_GE(cv.value, 0.0);
    EXPECT_EQ(v.kappa, e.kappa);
    if (!e.is_infinite()) {
      EXPECT_FALSE(v.is_infinite());
      EXPECT_FALSE(cv.is_infinite());
    }
    if (!v.is_infinite() && !cv.is_infinite() && !e.is_infinite()) {
      ++finite;
      EXPECT_LE(v.value, cv.value + 1e-12);
      EXPECT_LE(cv.value, e.value + 1e-12);
    }
  }
  EXPECT_GT(finite, 300);
}

TEST(Psi, ClosedFormAndLimits) {
  EXPECT_NEAR(psi_epsilon(1.01, 0.3, 1.0 - 1e-14), -1.01, 1e-6);
  EXPECT_NEAR(psi_epsilon(1.0, 0.5, std::exp(-2.0)), -1.0 + 0.5 * 2.0, 1e-14);
}

TEST(Psi, DualityWithEvar) {
  for (const auto& x : random_draws(300, 41)) {
    const auto e = evar(x.d, x.sigma, x.epsilon, x.c);
    const double psi = psi_epsilon(x.d, x.sigma, x.epsilon);
    if (e.branch == RiskBranch::Finite) {
      EXPECT_NEAR(alpha(e.value, x.d, x.c) + psi, 0.0, 1e-9);
      EXPECT_NEAR(alpha(e.value, x.d, x.c), x.d - std::sqrt(2.0) * x.sigma * std::sqrt(-std::log(x.epsilon)), 1e-9);
    } else if (e.branch == RiskBranch::Zero) {
      EXPECT_LE(alpha(0.0, x.d, x.c) + psi, 1e-12);
    }
  }
}

TEST(Psi, MeanShiftSearchMatchesClosedForm) {
  for (const auto& x : random_draws(100, 51)) {
    const auto search = psi_epsilon_mean_shift_search(x.d, x.sigma, x.epsilon, 20001);
    const double closed = psi_epsilon(x.d, x.sigma, x.epsilon);
    EXPECT_LE(search.psi, closed + 1e-12);
    EXPECT_NEAR(search.psi, closed, search.grid_step * (1 + 1e-9));
    const double independent = oracle::psi_grid_search(x.d, x.sigma, x.epsilon, 30001);
    // The grid node on the KL boundary may be excluded by rounding, leaving
    // the next node one step inside.
    EXPECT_NEAR(independent, closed, 6.0 * x.sigma * std::sqrt(-2.0 * std::log(x.epsilon)) / 30000.0 * (1 + 1e-9));
  }
}

}  // namespace
}  // namespace platoon
