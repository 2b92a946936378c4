#include "gom/vertex_hunting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "gom/errors.hpp"
#include "gom/kernels.hpp"

namespace gom {

void PruneConfig::validate(std::size_t n) const {
  if (!(q > 0.0 && q < 1.0)) throw ConfigError("prune: q must lie in (0, 1)");
  if (!(e > 0.0 && e < 1.0)) throw ConfigError("prune: e must lie in (0, 1)");
  if (r < 1 || r + 1 > n) {
    throw ConfigError("prune: need 1 <= r <= N-1 (r=" + std::to_string(r) +
                      ", N=" + std::to_string(n) + ")");
  }
}

std::vector<std::size_t> upper_quantile_members(const std::vector<double>& values,
                                                double fraction) {
  const std::size_t n = values.size();
  if (n == 0) return {};
  const auto quota = static_cast<std::size_t>(
      std::clamp(std::ceil(fraction * static_cast<double>(n)), 1.0, static_cast<double>(n)));
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const double threshold = sorted[quota - 1];

  std::vector<std::size_t> at_or_above;
  std::vector<std::size_t> above;
  for (std::size_t i = 0; i < n; ++i) {
    if (values[i] >= threshold) at_or_above.push_back(i);
    if (values[i] > threshold) above.push_back(i);
  }
  return at_or_above.size() <= quota ? at_or_above : above;
}

PruneReport prune(const DenseMatrix& u_hat, const PruneConfig& cfg) {
  if (u_hat.cols() == 0) throw DimensionError("prune: U has zero columns");
  if (u_hat.rows() <= cfg.r) {
    throw ConfigError("prune: need N > r (N=" + std::to_string(u_hat.rows()) +
                      ", r=" + std::to_string(cfg.r) + ")");
  }
  cfg.validate(u_hat.rows());

  PruneReport report;
  report.row_norms = kernels::row_norms(u_hat);
  report.candidates = upper_quantile_members(report.row_norms, cfg.q);

  const std::vector<double> dist = kernels::knn_mean_distance(u_hat, report.candidates, cfg.r);
  for (std::size_t k = 0; k < report.candidates.size(); ++k)
    report.avg_neighbor_dist.emplace(report.candidates[k], dist[k]);

  for (std::size_t k : upper_quantile_members(dist, cfg.e))
    report.pruned.push_back(report.candidates[k]);
  return report;
}

VertexSet spa_traced(const DenseMatrix& u_hat, const std::vector<std::size_t>& excluded,
                     std::size_t k, std::vector<DenseMatrix>* trace) {
  const std::size_t n = u_hat.rows();
  const std::size_t dim = u_hat.cols();
  std::vector<bool> eligible(n, true);
  for (std::size_t i : excluded) {
    if (i >= n) throw DimensionError("spa: excluded index out of range");
    eligible[i] = false;
  }
  const auto available = static_cast<std::size_t>(std::count(eligible.begin(), eligible.end(), true));
  if (available < k) {
    throw DimensionError("spa: only " + std::to_string(available) + " rows remain for K=" +
                         std::to_string(k));
  }

  DenseMatrix y = u_hat;
  VertexSet out;
  std::vector<double> u(dim);
  for (std::size_t step = 0; step < k; ++step) {
    const std::vector<double> norms = kernels::row_norms(y);
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!eligible[i]) continue;
      if (best == n || norms[i] > norms[best]) best = i;
    }
    if (norms[best] < kDegenerateRowNorm) {
      std::ostringstream msg;
      msg << "spa: vertex " << step + 1 << " of " << k << " has projected norm " << norms[best]
          << "; the rows span fewer than K directions";
      throw DegenerateGeometryError(msg.str());
    }
    out.indices.push_back(best);
    eligible[best] = false;

    for (std::size_t c = 0; c < dim; ++c) u[c] = y(best, c) / norms[best];
    for (std::size_t i = 0; i < n; ++i) {
      auto row = y.row(i);
      double dot = 0.0;
      for (std::size_t c = 0; c < dim; ++c) dot += row[c] * u[c];
      for (std::size_t c = 0; c < dim; ++c) row[c] -= dot * u[c];
    }
    if (trace != nullptr) trace->push_back(y);
  }
  return out;
}

VertexSet spa(const DenseMatrix& u_hat, const std::vector<std::size_t>& excluded, std::size_t k) {
  return spa_traced(u_hat, excluded, k, nullptr);
}

}  // namespace gom
