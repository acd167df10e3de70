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

#include "platoon/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

namespace platoon::quad {
namespace {

// Abscissae on [-1, 1] (non-negative half), Kronrod weights and the weights
// of the 7-point Gauss rule on the odd-indexed abscissae.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kUflow = std::numeric_limits<double>::min();

struct Panel {
  double a, b;
  PanelEstimate est;
  bool operator<(const Panel& o) const { return est.error < o.est.error; }
};

}  // namespace

PanelEstimate gauss_kronrod15(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double abs_half = std::abs(half);

  std::array<double, 7> f1{};
  std::array<double, 7> f2{};
  const double fc = f(center);
  double res_g = fc * kWg[3];
  double res_k = fc * kWgk[7];
  double res_abs = std::abs(res_k);
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = f(center - dx);
    f2[j] = f(center + dx);
    const double sum = f1[j] + f2[j];
    res_k += kWgk[j] * sum;
    res_abs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) res_g += kWg[j / 2] * sum;
  }
  const double mean = 0.5 * res_k;
  double res_asc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) res_asc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

  PanelEstimate out;
  out.value = res_k * half;
  out.resabs = res_abs * abs_half;
  out.resasc = res_asc * abs_half;
  double err = std::abs((res_k - res_g) * half);
  if (out.resasc != 0.0 && err != 0.0)
    err = out.resasc * std::min(1.0, std::pow(200.0 * err / out.resasc, 1.5));
  if (out.resabs > kUflow / (50.0 * kEps)) err = std::max(50.0 * kEps * out.resabs, err);
  out.error = err;
  return out;
}

AdaptiveResult integrate_adaptive(const std::function<double(double)>& f,
                                  std::span<const double> breakpoints, double abs_tol,
                                  double rel_tol, int max_panels) {
  if (breakpoints.size() < 2) throw std::invalid_argument("integrate_adaptive: need >= 2 breakpoints");

  std::priority_queue<Panel> heap;
  double total = 0.0;
  double total_err = 0.0;
  int panels = 0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double a = breakpoints[i];
    const double b = breakpoints[i + 1];
    if (!(b > a)) continue;
    Panel p{a, b, gauss_kronrod15(f, a, b)};
    total += p.est.value;
    total_err += p.est.error;
    heap.push(p);
    ++panels;
  }

  auto done = [&] { return total_err <= std::max(abs_tol, rel_tol * std::abs(total)); };
  while (!done() && panels < max_panels) {
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Panel cannot be split further in floating point.
      heap.push(worst);
      break;
    }
    Panel left{worst.a, mid, gauss_kronrod15(f, worst.a, mid)};
    Panel right{mid, worst.b, gauss_kronrod15(f, mid, worst.b)};
    total += left.est.value + right.est.value - worst.est.value;
    total_err += left.est.error + right.est.error - worst.est.error;
    heap.push(left);
    heap.push(right);
    ++panels;
  }

  // Re-sum from the panels so the result does not carry the running-sum drift.
  AdaptiveResult r;
  std::vector<Panel> all;
  all.reserve(heap.size());
  while (!heap.empty()) {
    all.push_back(heap.top());
    heap.pop();
  }
  std::sort(all.begin(), all.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  for (const auto& p : all) {
    r.value += p.est.value;
    r.error += p.est.error;
  }
  r.panels = panels;
  r.converged = r.error <= std::max(abs_tol, rel_tol * std::abs(r.value));
  return r;
}

}  // namespace platoon::quad
