#pragma once

#include <cstddef>

#include "gom/matrix.hpp"

namespace gom {

/// N×K membership scores: entries in [0, 1], rows summing to one.
class MembershipMatrix {
 public:
  static constexpr double kRowSumTolerance = 1e-12;

  MembershipMatrix() = default;
  /// Throws DomainError if an entry leaves [0, 1] or a row sum differs from
  /// one by more than `row_sum_tol`.
  explicit MembershipMatrix(DenseMatrix m, double row_sum_tol = kRowSumTolerance);

  const DenseMatrix& matrix() const noexcept { return m_; }
  std::size_t subjects() const noexcept { return m_.rows(); }
  std::size_t profiles() const noexcept { return m_.cols(); }
  double operator()(std::size_t i, std::size_t k) const noexcept { return m_(i, k); }

 private:
  DenseMatrix m_;
};

/// J×K Bernoulli item parameters in [0, 1].
class ItemParamMatrix {
 public:
  ItemParamMatrix() = default;
  explicit ItemParamMatrix(DenseMatrix m);

  const DenseMatrix& matrix() const noexcept { return m_; }
  std::size_t items() const noexcept { return m_.rows(); }
  std::size_t profiles() const noexcept { return m_.cols(); }
  double operator()(std::size_t j, std::size_t k) const noexcept { return m_(j, k); }

 private:
  DenseMatrix m_;
};

/// N×J binary response data.
class ResponseMatrix {
 public:
  ResponseMatrix() = default;
  explicit ResponseMatrix(DenseMatrix m);

  const DenseMatrix& matrix() const noexcept { return m_; }
  std::size_t subjects() const noexcept { return m_.rows(); }
  std::size_t items() const noexcept { return m_.cols(); }

 private:
  DenseMatrix m_;
};

/// Π·Θᵀ, the expected response matrix.
DenseMatrix reconstruct(const MembershipMatrix& pi, const ItemParamMatrix& theta);

}  // namespace gom
