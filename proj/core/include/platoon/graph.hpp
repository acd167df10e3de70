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

#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "platoon/matrix.hpp"

namespace platoon {

/// Undirected weighted link. Vertex indices are zero-based with i < j.
struct Edge {
  int i = 0;
  int j = 0;
  double weight = 1.0;

  bool operator==(const Edge&) const = default;
};

/// Connected undirected weighted communication graph of a platoon.
///
/// The constructor validates and canonicalises the edge list (i < j,
/// sorted lexicographically). Self-loops, duplicate pairs, non-positive
/// weights and disconnected graphs are rejected with ConfigError.
class WeightedGraph {
 public:
  WeightedGraph(int n, std::vector<Edge> edges);

  [[nodiscard]] int size() const noexcept { return n_; }
  [[nodiscard]] std::span<const Edge> edges() const noexcept { return edges_; }
  [[nodiscard]] std::vector<int> degrees() const;

  bool operator==(const WeightedGraph&) const = default;

 private:
  int n_;
  std::vector<Edge> edges_;
};

enum class TopologyKind { Complete, PCycle, Path };

std::string_view to_string(TopologyKind kind);

struct UniformWeight {
  double value = 1.0;
};

/// Weights drawn independently and uniformly from the closed interval
/// [lo, hi]. The stream is std::mt19937_64 seeded with `seed`; each draw
/// maps the top 53 bits u of one output to lo + (hi - lo) * u / (2^53 - 1).
/// Weights are assigned in the canonical (sorted) edge order.
struct RandomWeight {
  double lo = 0.8;
  double hi = 1.2;
  std::uint64_t seed = 0;
};

using WeightSpec = std::variant<UniformWeight, RandomWeight>;

/// Builds a complete graph, a path, or a p-cycle (circulant graph in which
/// every vertex is linked to its p/2 nearest ring neighbours on each side;
/// p = 2 is the plain ring). `p` is ignored except for PCycle.
WeightedGraph build_topology(TopologyKind kind, int n, const WeightSpec& weights, int p = 0);

/// Laplacian L = diag(degree) - adjacency.
Matrix laplacian(const WeightedGraph& g);

struct JacobiOptions {
  /// Stop once the off-diagonal Frobenius norm falls below this fraction of
  /// the full Frobenius norm.
  double off_diagonal_tol = 1e-12;
  int max_sweeps = 100;
};

/// Eigen-decomposition of a graph Laplacian: ascending eigenvalues and the
/// matching orthonormal eigenvectors stored as columns.
///
/// The null-space vector is fixed to +1/sqrt(n) * ones; every other column
/// has its largest-magnitude entry positive.
struct LaplacianSpectrum {
  std::vector<double> eigenvalues;
  Matrix eigenvectors;

  [[nodiscard]] int size() const noexcept { return static_cast<int>(eigenvalues.size()); }
  [[nodiscard]] double lambda2() const { return eigenvalues.at(1); }
  [[nodiscard]] double lambda_max() const { return eigenvalues.back(); }
  [[nodiscard]] std::vector<double> eigenvector(int k) const {
    return eigenvectors.column(static_cast<std::size_t>(k));
  }
};

/// Symmetric eigensolver by cyclic Jacobi rotations. Throws ConfigError when
/// `laplacian` is not symmetric to 1e-12 and NumericalError when the sweep
/// cap is reached.
LaplacianSpectrum spectrum(const Matrix& laplacian, const JacobiOptions& options = {});

inline LaplacianSpectrum spectrum(const WeightedGraph& g, const JacobiOptions& options = {}) {
  return spectrum(laplacian(g), options);
}

}  // namespace platoon
