#include "gom/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "gom/errors.hpp"

namespace gom::kernels {

namespace {

constexpr std::size_t kRowBlock = 32;

void check_tn(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) {
    throw DimensionError("gemm_tn: row counts differ (" + std::to_string(a.rows()) + " vs " +
                         std::to_string(b.rows()) + ")");
  }
}

void check_nn(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("gemm_nn: inner dimensions differ (" + std::to_string(a.cols()) +
                         " vs " + std::to_string(b.rows()) + ")");
  }
}

void check_knn(const DenseMatrix& points, std::span<const std::size_t> queries, std::size_t r) {
  if (r == 0 || r >= points.rows()) {
    throw ConfigError("knn: need 1 <= r < number of rows (r=" + std::to_string(r) +
                      ", rows=" + std::to_string(points.rows()) + ")");
  }
  for (std::size_t q : queries) {
    if (q >= points.rows()) throw DimensionError("knn: query index out of range");
  }
}

double squared_distance(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double d = x[k] - y[k];
    s += d * d;
  }
  return s;
}

// Mean of the r smallest distances, summed in ascending order.
double mean_of_smallest(std::vector<double>& dist, std::size_t r) {
  std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(r - 1), dist.end());
  std::sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(r));
  double s = 0.0;
  for (std::size_t k = 0; k < r; ++k) s += std::sqrt(dist[k]);
  return s / static_cast<double>(r);
}

double one_query(const DenseMatrix& points, std::size_t q, std::size_t r,
                 std::vector<double>& scratch) {
  scratch.clear();
  const auto x = points.row(q);
  for (std::size_t i = 0; i < points.rows(); ++i) {
    if (i == q) continue;
    scratch.push_back(squared_distance(x, points.row(i)));
  }
  return mean_of_smallest(scratch, r);
}

}  // namespace

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

DenseMatrix gemm_tn(const DenseMatrix& a, const DenseMatrix& b) {
  check_tn(a, b);
  const std::size_t n = a.rows(), p = a.cols(), q = b.cols();
  DenseMatrix out(p, q);
  const std::ptrdiff_t blocks = static_cast<std::ptrdiff_t>((p + kRowBlock - 1) / kRowBlock);
  // Each thread owns a block of output rows and sweeps all input rows, so
  // every entry is accumulated over i = 0..n-1 in order.
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t blk = 0; blk < blocks; ++blk) {
    const std::size_t lo = static_cast<std::size_t>(blk) * kRowBlock;
    const std::size_t hi = std::min(p, lo + kRowBlock);
    for (std::size_t i = 0; i < n; ++i) {
      const double* arow = a.row(i).data();
      const double* brow = b.row(i).data();
      for (std::size_t j = lo; j < hi; ++j) {
        const double s = arow[j];
        if (s == 0.0) continue;
        double* orow = out.row(j).data();
        for (std::size_t c = 0; c < q; ++c) orow[c] += s * brow[c];
      }
    }
  }
  return out;
}

DenseMatrix gemm_nn(const DenseMatrix& a, const DenseMatrix& b) {
  check_nn(a, b);
  const std::size_t n = a.rows(), p = a.cols(), q = b.cols();
  DenseMatrix out(n, q);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
    const std::size_t i = static_cast<std::size_t>(ii);
    double* orow = out.row(i).data();
    const double* arow = a.row(i).data();
    for (std::size_t k = 0; k < p; ++k) {
      const double s = arow[k];
      if (s == 0.0) continue;
      const double* brow = b.row(k).data();
      for (std::size_t c = 0; c < q; ++c) orow[c] += s * brow[c];
    }
  }
  return out;
}

std::vector<double> row_norms(const DenseMatrix& a) {
  std::vector<double> norms(a.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(a.rows()); ++ii) {
    const auto r = a.row(static_cast<std::size_t>(ii));
    double s = 0.0;
    for (double v : r) s += v * v;
    norms[static_cast<std::size_t>(ii)] = std::sqrt(s);
  }
  return norms;
}

std::vector<double> knn_mean_distance(const DenseMatrix& points,
                                      std::span<const std::size_t> queries, std::size_t r) {
  check_knn(points, queries, r);
  std::vector<double> out(queries.size());
#pragma omp parallel
  {
    std::vector<double> scratch;
    scratch.reserve(points.rows());
#pragma omp for schedule(dynamic, 16)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(queries.size()); ++k) {
      out[static_cast<std::size_t>(k)] =
          one_query(points, queries[static_cast<std::size_t>(k)], r, scratch);
    }
  }
  return out;
}

namespace serial {

DenseMatrix gemm_tn(const DenseMatrix& a, const DenseMatrix& b) {
  check_tn(a, b);
  DenseMatrix out(a.cols(), b.cols());
  for (std::size_t j = 0; j < a.cols(); ++j) {
    for (std::size_t c = 0; c < b.cols(); ++c) {
      double s = 0.0;
      for (std::size_t i = 0; i < a.rows(); ++i) {
        if (a(i, j) == 0.0) continue;
        s += a(i, j) * b(i, c);
      }
      out(j, c) = s;
    }
  }
  return out;
}

DenseMatrix gemm_nn(const DenseMatrix& a, const DenseMatrix& b) {
  check_nn(a, b);
  DenseMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t c = 0; c < b.cols(); ++c) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) {
        if (a(i, k) == 0.0) continue;
        s += a(i, k) * b(k, c);
      }
      out(i, c) = s;
    }
  }
  return out;
}

std::vector<double> row_norms(const DenseMatrix& a) {
  std::vector<double> norms(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (double v : a.row(i)) s += v * v;
    norms[i] = std::sqrt(s);
  }
  return norms;
}

std::vector<double> knn_mean_distance(const DenseMatrix& points,
                                      std::span<const std::size_t> queries, std::size_t r) {
  check_knn(points, queries, r);
  std::vector<double> out(queries.size());
  for (std::size_t k = 0; k < queries.size(); ++k) {
    std::vector<double> dist;
    for (std::size_t i = 0; i < points.rows(); ++i) {
      if (i == queries[k]) continue;
      dist.push_back(squared_distance(points.row(queries[k]), points.row(i)));
    }
    std::sort(dist.begin(), dist.end());
    double s = 0.0;
    for (std::size_t m = 0; m < r; ++m) s += std::sqrt(dist[m]);
    out[k] = s / static_cast<double>(r);
  }
  return out;
}

}  // namespace serial
}  // namespace gom::kernels
