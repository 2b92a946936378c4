#pragma once

// Data-parallel inner loops of the estimator.
//
// Every kernel exists twice: an OpenMP version in gom::kernels and a plain
// loop in gom::kernels::serial that is kept as the reference for tests and
// benchmarks. Both accumulate every output entry in the same order, so the
// two agree bit-for-bit and the OpenMP result does not depend on the thread
// count.

#include <cstddef>
#include <span>
#include <vector>

#include "gom/matrix.hpp"

namespace gom::kernels {

/// Aᵀ·B for A (n×p) and B (n×q).
DenseMatrix gemm_tn(const DenseMatrix& a, const DenseMatrix& b);

/// A·B for A (n×p) and B (p×q).
DenseMatrix gemm_nn(const DenseMatrix& a, const DenseMatrix& b);

/// Euclidean norm of every row.
std::vector<double> row_norms(const DenseMatrix& a);

/// For each row index in `queries`, the mean Euclidean distance to its `r`
/// nearest rows of `points` (the row itself excluded).
std::vector<double> knn_mean_distance(const DenseMatrix& points,
                                      std::span<const std::size_t> queries, std::size_t r);

namespace serial {

DenseMatrix gemm_tn(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix gemm_nn(const DenseMatrix& a, const DenseMatrix& b);
std::vector<double> row_norms(const DenseMatrix& a);
std::vector<double> knn_mean_distance(const DenseMatrix& points,
                                      std::span<const std::size_t> queries, std::size_t r);

}  // namespace serial

/// Number of OpenMP threads kernels will use (1 when built without OpenMP).
int max_threads();

}  // namespace gom::kernels
