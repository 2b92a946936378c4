#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "gom/matrix.hpp"

namespace gom {

/// Tuning of the pruning step: `r` nearest neighbours, `q` the upper
/// quantile of row norms that forms the candidate set, `e` the upper
/// quantile of neighbour distances, within the candidates, that is removed.
struct PruneConfig {
  std::size_t r = 10;
  double q = 0.4;
  double e = 0.2;

  /// Throws ConfigError unless 0 < q < 1, 0 < e < 1 and 1 <= r <= n-1.
  void validate(std::size_t n) const;
};

/// Row indices here are 0-based.
struct PruneReport {
  std::vector<std::size_t> pruned;      // sorted, subset of candidates
  std::vector<std::size_t> candidates;  // sorted
  std::vector<double> row_norms;        // one per row
  std::map<std::size_t, double> avg_neighbor_dist;  // keyed by candidate
};

/// Row indices of the simplex vertices, in the order they were found.
struct VertexSet {
  std::vector<std::size_t> indices;
};

/// Indices of the values that lie in the upper `fraction` of `values`.
///
/// The threshold is the ceil(fraction·n)-th largest value and membership is
/// `value >= threshold`. When ties at the threshold would push the set past
/// ceil(fraction·n) members, the tied values are left out and only values
/// strictly above the threshold are kept. Result is sorted ascending.
std::vector<std::size_t> upper_quantile_members(const std::vector<double>& values,
                                                double fraction);

/// Flags high-norm rows of `u_hat` that sit far from their neighbours.
PruneReport prune(const DenseMatrix& u_hat, const PruneConfig& cfg);

inline constexpr double kDegenerateRowNorm = 1e-12;

/// Sequential projection: repeatedly takes the largest-norm row among the
/// rows not excluded and not yet chosen (lowest index on ties), then projects
/// every row onto the orthogonal complement of that row.
///
/// Throws DegenerateGeometryError when the chosen row has norm below
/// kDegenerateRowNorm, and DimensionError when fewer than k rows remain.
VertexSet spa(const DenseMatrix& u_hat, const std::vector<std::size_t>& excluded, std::size_t k);

/// Same as spa() but also returns the projected matrix after each step
/// (index s holds the rows after s+1 projections).
VertexSet spa_traced(const DenseMatrix& u_hat, const std::vector<std::size_t>& excluded,
                     std::size_t k, std::vector<DenseMatrix>* trace);

}  // namespace gom
