#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gom/matrix.hpp"

namespace gom {

/// Rank-K factorization M ≈ U·diag(sigma)·Vᵀ.
///
/// U and V have orthonormal columns, sigma is non-increasing, and in every
/// column of U the entry of largest magnitude (lowest row on ties) is
/// nonnegative.
struct SvdFactors {
  DenseMatrix u;               // n×K
  std::vector<double> sigma;   // K, descending
  DenseMatrix v;               // m×K

  std::size_t rank() const noexcept { return sigma.size(); }
  /// U·diag(sigma)·Vᵀ
  DenseMatrix reassemble() const;
};

struct SvdOptions {
  /// Matrices whose smaller side exceeds this use randomized subspace
  /// iteration instead of the Gram eigendecomposition.
  std::size_t gram_threshold = 2000;
  std::size_t oversampling = 10;
  std::size_t min_power_iterations = 4;
  std::size_t max_power_iterations = 200;
  /// Relative change in the top singular values that ends subspace iteration.
  double tolerance = 1e-10;
  std::uint64_t seed = 20240607;
};

enum class SvdBackend { kGram, kRandomized };

SvdBackend select_backend(std::size_t rows, std::size_t cols, const SvdOptions& opts = {});

/// Top-K singular triplets of m.
///
/// Throws DimensionError unless 1 <= k <= min(rows, cols) and
/// ConvergenceError if the backend fails to converge.
SvdFactors truncated_svd(const DenseMatrix& m, std::size_t k, const SvdOptions& opts = {});

/// Flips column signs of U (and V alongside) so that the largest-magnitude
/// entry of each U column is nonnegative.
void apply_sign_convention(SvdFactors& f);

inline constexpr double kMaxConditionNumber = 1e12;

/// Inverse of a square matrix; SingularityError when the condition number
/// exceeds kMaxConditionNumber.
DenseMatrix invert_square(const DenseMatrix& m);

/// All singular values of m, descending.
std::vector<double> singular_values(const DenseMatrix& m);

/// sigma_max / sigma_min over the min(rows, cols) singular values;
/// +infinity when the smallest one is zero.
double condition_number(const DenseMatrix& m);

/// Number of singular values strictly greater than tol·sigma_max.
std::size_t numerical_rank(const DenseMatrix& m, double tol);

}  // namespace gom
