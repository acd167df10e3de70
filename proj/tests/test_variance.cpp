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
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "oracles.hpp"
#include "platoon/errors.hpp"
#include "platoon/graph.hpp"
#include "platoon/quadrature.hpp"
#include "platoon/stability.hpp"
#include "platoon/variance.hpp"

namespace platoon {
namespace {

PlatoonParams reference(int n = 11) {
  PlatoonParams p;
  p.n = n;
  return p;
}

TEST(GaussKronrod, IntegratesPolynomialsExactly) {
  // G7-K15 is exact for polynomials up to degree 22 on the Kronrod nodes.
  const auto r = quad::gauss_kronrod15([](double x) { return std::pow(x, 10) - 3 * x * x + 1; }, -1.0, 2.0);
  const double exact = (std::pow(2.0, 11) + 1.0) / 11.0 - (8.0 + 1.0) + 3.0;
  EXPECT_NEAR(r.value, exact, 1e-12 * exact);
}

TEST(AdaptiveQuadrature, HandlesPeakedIntegrand) {
  const double eps = 1e-4;
  auto f = [&](double x) { return eps / (x * x + eps * eps); };  // integral over [-1,1] = 2 atan(1/eps)
  const auto r = quad::integrate_adaptive(f, std::vector<double>{-1.0, 1.0}, 0.0, 1e-10, 5000);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 2.0 * std::atan(1.0 / eps), 1e-9 * r.value);
  EXPECT_LE(std::abs(r.value - 2.0 * std::atan(1.0 / eps)), r.error + 1e-15);
}

TEST(Integrand, IsEven) {
  for (double r : {0.01, 0.3, 1.7, 12.5, 301.0})
    for (auto [s1, s2] : {std::pair{0.11, 0.0033}, std::pair{1.2, 0.1}, std::pair{0.5, 0.6}})
      EXPECT_EQ(f_integrand(r, s1, s2), f_integrand(-r, s1, s2));
}

TEST(FIntegral, MatchesTrapezoidOracleAtReferencePoint) {
  const auto ours = f_integral(0.11, 0.01 / 3.0);
  const auto ref = oracle::trapezoid_f(0.11, 0.01 / 3.0);
  EXPECT_NEAR(ours.value, ref.value, 1e-6 * ref.value);
  EXPECT_LE(std::abs(ours.value - ref.value), ours.abs_error + ref.error);
}

TEST(FIntegral, ResolvesNarrowPeakAtOriginForTinyS2) {
  // For s2 -> 0 the integrand has a Lorentzian spike of width ~ s2 at r = 0.
  // A step of 1e-4 cannot resolve s2 ~ 1e-4, so the oracle is refined.
  const double s1 = 1.5;
  const double s2 = 0.001 * s2_cap(solve_a(s1));
  const auto ours = f_integral(s1, s2);
  const auto ref = oracle::trapezoid_f(s1, s2, 1e-6, 100.0);
  EXPECT_NEAR(ours.value, ref.value, 1e-6 * ref.value);
  EXPECT_LE(std::abs(ours.value - ref.value), ours.abs_error + ref.error);
}

TEST(FIntegral, TailBoundAndRadiusDoubling) {
  // For R >= 10 max(1, s1, sqrt(s1 s2)) the tail 2 int_R^inf is about 4/R^3
  // at most; the library's reported radius satisfies the stopping rule.
  for (auto [s1, s2] : {std::pair{0.11, 0.0033}, std::pair{1.2, 0.1}, std::pair{0.04, 0.9}}) {
    const auto est = f_integral(s1, s2);
    EXPECT_GE(est.radius, 10.0 * std::max({1.0, s1, std::sqrt(s1 * s2)}));
    EXPECT_LE(4.0 / std::pow(est.radius, 3), 0.1 * 1e-8 * est.value);
    // The true tail measured by the GK15 rule is within the 4/R^3 bound.
    const double R = est.radius;
    const auto tail = quad::integrate_adaptive([&](double r) { return f_integrand(r, s1, s2); },
                                               std::vector<double>{R, 2 * R, 4 * R, 8 * R, 16 * R}, 0.0, 1e-6, 20000);
    EXPECT_LE(2.0 * tail.value, 4.0 / (R * R * R) * 1.01);
    // Doubling the starting panel tolerance changes f by less than tol.
    QuadratureOptions loose;
    loose.rel_tol = 2e-8;
    EXPECT_NEAR(f_integral(s1, s2, loose).value, est.value, 2e-8 * est.value);
  }
}

TEST(FIntegral, HalvingToleranceStaysWithinErrorEstimate) {
  for (auto [s1, s2] : {std::pair{0.11, 0.0033}, std::pair{0.9, 0.3}, std::pair{1.5, 0.05}}) {
    QuadratureOptions a, b;
    a.rel_tol = 1e-8;
    b.rel_tol = 5e-9;
    const auto ea = f_integral(s1, s2, a), eb = f_integral(s1, s2, b);
    EXPECT_LE(std::abs(ea.value - eb.value), ea.abs_error);
  }
}

TEST(FIntegral, RejectsUnstableAndNearBoundaryInput) {
  EXPECT_THROW(f_integral(std::numbers::pi / 2.0, 0.01), InstabilityError);
  EXPECT_THROW(f_integral(0.5, 0.0), InstabilityError);
  const double cap = s2_cap(solve_a(0.5));
  EXPECT_THROW(f_integral(0.5, cap), InstabilityError);
  EXPECT_THROW(f_integral(0.5, cap * (1.0 - 1e-14)), InstabilityError);
}

TEST(FIntegral, BudgetExhaustionIsNumericalError) {
  QuadratureOptions tiny;
  tiny.max_panels = 3;
  EXPECT_THROW(f_integral(0.9, 0.3, tiny), NumericalError);
}

TEST(FIntegral, DecreasingInS1OnSampledGrid) {
  int violations = 0, checked = 0;
  for (int j = 0; j <= 10; ++j) {
    const double s2 = 0.001 + (0.1 - 0.001) * j / 10.0;
    double prev = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 30; ++i) {
      const double s1 = 0.01 + (1.2 - 0.01) * i / 30.0;
      if (!in_region_S(s1, s2)) continue;
      const double f = f_integral(s1, s2).value;
      ++checked;
      if (f >= prev) {
        ++violations;
        ADD_FAILURE() << "f not decreasing at s1=" << s1 << " s2=" << s2;
      }
      prev = f;
    }
  }
  EXPECT_GT(checked, 300);
  EXPECT_EQ(violations, 0);
}

TEST(SigmaZ, ScalesWithNoiseSquared) {
  auto p = reference();
  const double base = sigma_z_sq(11.0, p);
  p.g = 2.0;
  EXPECT_NEAR(sigma_z_sq(11.0, p), 4.0 * base, 1e-12 * base);
  p.g = 1.0;
  EXPECT_NEAR(base, p.g * p.g * std::pow(p.tau, 3) / (2.0 * std::numbers::pi) * f_integral(0.11, p.beta * p.tau).value,
              1e-14 * base);
  EXPECT_THROW(sigma_z_sq(std::numbers::pi / 2.0 / p.tau, p), InstabilityError);
}

TEST(PairVariances, CompleteGraphCollapses) {
  for (int n : {5, 11}) {
    const auto p = reference(n);
    const auto spec = spectrum(build_topology(TopologyKind::Complete, n, UniformWeight{1.0}));
    const auto v = pair_variances(spec, p);
    const double expected = 2.0 * variance_prefactor(p) * f_integral(n * p.tau, p.beta * p.tau).value;
    ASSERT_EQ(v.sigma_sq.size(), static_cast<std::size_t>(n - 1));
    for (double s : v.sigma_sq) EXPECT_NEAR(s, expected, 1e-10 * expected);
  }
}

TEST(PairVariances, WeightSumIsTwo) {
  for (int seed = 0; seed < 10; ++seed) {
    const auto spec = spectrum(build_topology(TopologyKind::PCycle, 11, RandomWeight{0.8, 1.2, static_cast<std::uint64_t>(seed)}, 2 + 2 * (seed % 4)));
    for (int j = 0; j < 10; ++j) EXPECT_NEAR(pair_weight_sum(spec, j), 2.0, 1e-12);
  }
}

TEST(PairVariances, InvariantsOnReferenceTopologies) {
  const auto p = reference();
  const std::vector<WeightedGraph> graphs = {
      build_topology(TopologyKind::Complete, 11, UniformWeight{1.0}),
      build_topology(TopologyKind::PCycle, 11, UniformWeight{1.0}, 8),
      build_topology(TopologyKind::PCycle, 11, RandomWeight{0.8, 1.2, 7}, 8),
      build_topology(TopologyKind::PCycle, 11, RandomWeight{0.8, 1.2, 7}, 6),
      build_topology(TopologyKind::PCycle, 11, RandomWeight{0.8, 1.2, 7}, 4),
      build_topology(TopologyKind::PCycle, 11, UniformWeight{1.0}, 2),
      build_topology(TopologyKind::Path, 11, UniformWeight{1.0}),
  };
  const double c1 = variance_prefactor(p);
  for (const auto& g : graphs) {
    const auto spec = spectrum(g);
    const auto v = pair_variances(spec, p);
    const double lo = 2.0 * c1 * f_integral(spec.lambda_max() * p.tau, p.beta * p.tau).value;
    const double hi = 2.0 * c1 * f_integral(spec.lambda2() * p.tau, p.beta * p.tau).value;
    double trace = 0.0;
    for (std::size_t j = 0; j < v.sigma_sq.size(); ++j) {
      EXPECT_NEAR(v.sigma_sq[j], v.covariance(j, j), 1e-10 * v.sigma_sq[j]);
      EXPECT_GE(v.sigma_sq[j], lo * (1.0 - 1e-10));
      EXPECT_LE(v.sigma_sq[j], hi * (1.0 + 1e-10));
      trace += v.sigma_sq[j];
    }
    EXPECT_TRUE(is_symmetric(v.covariance, 0.0));
    Eigen::MatrixXd cov(v.covariance.rows(), v.covariance.cols());
    for (std::size_t i = 0; i < v.covariance.rows(); ++i)
      for (std::size_t j = 0; j < v.covariance.cols(); ++j) cov(i, j) = v.covariance(i, j);
    const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(cov).eigenvalues()(0);
    EXPECT_GE(min_eig, -1e-9 * trace);
  }
}

TEST(PairVariances, MatchesModalSumComputedHere) {
  // sigma_j^2 = c1 sum_k (e_j^T q_k)^2 f(lambda_k tau, beta tau), assembled
  // independently from the spectrum and per-mode integrals.
  const auto p = reference();
  const auto spec = spectrum(build_topology(TopologyKind::PCycle, 11, RandomWeight{0.8, 1.2, 7}, 6));
  const auto v = pair_variances(spec, p);
  const double c1 = variance_prefactor(p);
  for (int j = 0; j < 10; ++j) {
    double s = 0.0;
    for (int k = 1; k < 11; ++k) {
      const auto q = spec.eigenvector(k);
      const double w = q[j + 1] - q[j];
      s += w * w * f_integral(spec.eigenvalues[k] * p.tau, p.beta * p.tau).value;
    }
    EXPECT_NEAR(v.sigma_sq[j], c1 * s, 1e-10 * v.sigma_sq[j]);
  }
}

TEST(PairVariances, ErrorsOnInstabilityAndMismatch) {
  auto p = reference();
  const auto spec = spectrum(build_topology(TopologyKind::Complete, 11, UniformWeight{1.0}));
  p.tau = 0.2;
  EXPECT_THROW(pair_variances(spec, p), InstabilityError);
  p = reference(5);
  EXPECT_THROW(pair_variances(spec, p), ConfigError);
}

TEST(PairVariances, IndependentOfEvaluationOrder) {
  // Evaluating the same spectrum twice gives bitwise identical results.
  const auto p = reference();
  const auto spec = spectrum(build_topology(TopologyKind::PCycle, 11, RandomWeight{0.8, 1.2, 3}, 4));
  const auto a = pair_variances(spec, p), b = pair_variances(spec, p);
  EXPECT_EQ(a.sigma_sq, b.sigma_sq);
  EXPECT_EQ(a.covariance, b.covariance);
}

TEST(PlatoonParams, Validation) {
  PlatoonParams p;
  EXPECT_NO_THROW(p.validate());
  p.c = 0.9;
  EXPECT_THROW(p.validate(), ConfigError);
  p = {};
  p.epsilon = 1.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = {};
  p.d = 0.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = {};
  p.n = 1;
  EXPECT_THROW(p.validate(), ConfigError);
}

}  // namespace
}  // namespace platoon
