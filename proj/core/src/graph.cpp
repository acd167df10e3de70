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

#include "platoon/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <utility>

#include "platoon/errors.hpp"

namespace platoon {
namespace {

bool is_connected(int n, const std::vector<Edge>& edges) {
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int components = n;
  for (const auto& e : edges) {
    const int a = find(e.i);
    const int b = find(e.j);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

double draw_closed_unit(std::mt19937_64& rng) {
  constexpr double kScale = 1.0 / static_cast<double>((std::uint64_t{1} << 53) - 1);
  return static_cast<double>(rng() >> 11) * kScale;
}

}  // namespace

WeightedGraph::WeightedGraph(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
  if (n_ < 2) throw ConfigError("graph needs at least 2 vertices, got " + std::to_string(n_));
  std::set<std::pair<int, int>> seen;
  for (auto& e : edges_) {
    if (e.i > e.j) std::swap(e.i, e.j);
    if (e.i < 0 || e.j >= n_)
      throw ConfigError("edge (" + std::to_string(e.i + 1) + "," + std::to_string(e.j + 1) +
                        ") references a vertex outside 1.." + std::to_string(n_));
    if (e.i == e.j) throw ConfigError("self-loop at vertex " + std::to_string(e.i + 1));
    if (!(e.weight > 0.0) || !std::isfinite(e.weight))
      throw ConfigError("edge weights must be finite and strictly positive");
    if (!seen.emplace(e.i, e.j).second)
      throw ConfigError("duplicate edge (" + std::to_string(e.i + 1) + "," +
                        std::to_string(e.j + 1) + ")");
  }
  std::sort(edges_.begin(), edges_.end(),
            [](const Edge& a, const Edge& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
  if (!is_connected(n_, edges_)) throw ConfigError("communication graph is not connected");
}

std::vector<int> WeightedGraph::degrees() const {
  std::vector<int> deg(static_cast<std::size_t>(n_), 0);
  for (const auto& e : edges_) {
    ++deg[e.i];
    ++deg[e.j];
  }
  return deg;
}

std::string_view to_string(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::Complete: return "complete";
    case TopologyKind::PCycle: return "pcycle";
    case TopologyKind::Path: return "path";
  }
  return "unknown";
}

WeightedGraph build_topology(TopologyKind kind, int n, const WeightSpec& weights, int p) {
  if (n < 2) throw ConfigError("topology needs n >= 2, got " + std::to_string(n));

  std::vector<Edge> edges;
  switch (kind) {
    case TopologyKind::Complete:
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) edges.push_back({i, j, 1.0});
      break;
    case TopologyKind::Path:
      for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, 1.0});
      break;
    case TopologyKind::PCycle: {
      if (p < 2 || p > n - 1 || p % 2 != 0)
        throw ConfigError("p-cycle requires an even p with 2 <= p <= n-1 (n=" +
                          std::to_string(n) + ", p=" + std::to_string(p) + ")");
      // p <= n-1 keeps p/2 < n/2, so no pair is generated twice.
      for (int i = 0; i < n; ++i)
        for (int k = 1; k <= p / 2; ++k) {
          const int j = (i + k) % n;
          edges.push_back({std::min(i, j), std::max(i, j), 1.0});
        }
      break;
    }
  }
  std::sort(edges.begin(), edges.end(),
            [](const Edge& a, const Edge& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });

  if (const auto* u = std::get_if<UniformWeight>(&weights)) {
    for (auto& e : edges) e.weight = u->value;
  } else {
    const auto& r = std::get<RandomWeight>(weights);
    if (!(r.lo > 0.0) || !(r.hi >= r.lo))
      throw ConfigError("random weight range must satisfy 0 < lo <= hi");
    std::mt19937_64 rng(r.seed);
    for (auto& e : edges) e.weight = r.lo + (r.hi - r.lo) * draw_closed_unit(rng);
  }
  return WeightedGraph(n, std::move(edges));
}

Matrix laplacian(const WeightedGraph& g) {
  const auto n = static_cast<std::size_t>(g.size());
  Matrix L(n, n);
  for (const auto& e : g.edges()) {
    L(e.i, e.j) -= e.weight;
    L(e.j, e.i) -= e.weight;
    L(e.i, e.i) += e.weight;
    L(e.j, e.j) += e.weight;
  }
  return L;
}

LaplacianSpectrum spectrum(const Matrix& laplacian, const JacobiOptions& options) {
  const std::size_t n = laplacian.rows();
  if (n == 0 || !is_symmetric(laplacian, 1e-12))
    throw ConfigError("spectrum: input must be a non-empty symmetric matrix");

  Matrix a = laplacian;
  Matrix v = Matrix::identity(n);

  double frob = 0.0;
  for (double x : a.data()) frob += x * x;
  frob = std::sqrt(frob);
  const double target = options.off_diagonal_tol * std::max(frob, 1e-300);

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  bool converged = false;
  for (int sweep = 0; sweep <= options.max_sweeps; ++sweep) {
    if (off_norm() <= target) {
      converged = true;
      break;
    }
    if (sweep == options.max_sweeps) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (!converged)
    throw NumericalError("Jacobi eigensolver did not converge within " +
                         std::to_string(options.max_sweeps) + " sweeps");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });

  std::vector<double> values(n);
  std::vector<std::vector<double>> vectors(n);
  for (std::size_t k = 0; k < n; ++k) {
    values[k] = a(order[k], order[k]);
    vectors[k] = v.column(order[k]);
  }

  // Null space: pin the first vector to the normalised ones vector and
  // re-orthonormalise the remaining null vectors against it.
  const double null_tol = 1e-9 * std::max(1.0, std::abs(values.back()));
  std::size_t null_dim = 0;
  while (null_dim < n && std::abs(values[null_dim]) <= null_tol) ++null_dim;
  if (null_dim > 0) {
    std::vector<std::vector<double>> candidates(vectors.begin(), vectors.begin() + null_dim);
    std::vector<std::vector<double>> basis;
    basis.emplace_back(n, 1.0 / std::sqrt(static_cast<double>(n)));
    while (basis.size() < null_dim) {
      std::size_t best = 0;
      double best_norm = -1.0;
      std::vector<double> best_vec;
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        auto r = candidates[c];
        for (const auto& b : basis) {
          double dot = 0.0;
          for (std::size_t i = 0; i < n; ++i) dot += r[i] * b[i];
          for (std::size_t i = 0; i < n; ++i) r[i] -= dot * b[i];
        }
        double nrm = 0.0;
        for (double x : r) nrm += x * x;
        nrm = std::sqrt(nrm);
        if (nrm > best_norm) {
          best_norm = nrm;
          best = c;
          best_vec = std::move(r);
        }
      }
      for (double& x : best_vec) x /= best_norm;
      basis.push_back(std::move(best_vec));
      candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(best));
    }
    for (std::size_t k = 0; k < null_dim; ++k) {
      vectors[k] = basis[k];
      const auto lq = laplacian * std::span<const double>(vectors[k]);
      double rq = 0.0;
      for (std::size_t i = 0; i < n; ++i) rq += vectors[k][i] * lq[i];
      values[k] = rq;
    }
  }

  for (std::size_t k = null_dim; k < n; ++k) {
    std::size_t arg = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (std::abs(vectors[k][i]) > std::abs(vectors[k][arg])) arg = i;
    if (vectors[k][arg] < 0.0)
      for (double& x : vectors[k]) x = -x;
  }

  LaplacianSpectrum out;
  out.eigenvalues = std::move(values);
  out.eigenvectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = vectors[k][i];
  return out;
}

}  // namespace platoon
