#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gom {

/// Row-major dense matrix of doubles. Entries are checked to be finite when
/// the matrix is constructed from existing data.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix constant(std::size_t rows, std::size_t cols, double value);
  /// Builds a matrix from nested rows; all rows must have equal length.
  static DenseMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  double& operator()(std::size_t i, std::size_t j) noexcept { return entries_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return entries_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) noexcept { return {entries_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {entries_.data() + i * cols_, cols_};
  }

  std::span<double> data() noexcept { return entries_; }
  std::span<const double> data() const noexcept { return entries_; }
  const std::vector<double>& entries() const noexcept { return entries_; }

  DenseMatrix transpose() const;
  DenseMatrix select_rows(std::span<const std::size_t> indices) const;
  DenseMatrix select_cols(std::span<const std::size_t> indices) const;

  double frobenius_norm() const;
  double max_abs() const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b);

/// Largest absolute entrywise difference; dimensions must agree.
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace gom
