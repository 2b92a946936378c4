#include "gom/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "gom/errors.hpp"
#include "gom/kernels.hpp"

namespace gom {

namespace {

void require_unit_interval(const DenseMatrix& m, const char* what) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      if (v < 0.0 || v > 1.0) {
        std::ostringstream msg;
        msg << what << " entry (" << i << ", " << j << ") = " << v << " lies outside [0, 1]";
        throw DomainError(msg.str());
      }
    }
  }
}

}  // namespace

MembershipMatrix::MembershipMatrix(DenseMatrix m, double row_sum_tol) : m_(std::move(m)) {
  require_unit_interval(m_, "membership");
  for (std::size_t i = 0; i < m_.rows(); ++i) {
    double s = 0.0;
    for (double v : m_.row(i)) s += v;
    if (std::abs(s - 1.0) > row_sum_tol) {
      std::ostringstream msg;
      msg << "membership row " << i << " sums to " << s << ", not 1";
      throw DomainError(msg.str());
    }
  }
}

ItemParamMatrix::ItemParamMatrix(DenseMatrix m) : m_(std::move(m)) {
  require_unit_interval(m_, "item parameter");
}

ResponseMatrix::ResponseMatrix(DenseMatrix m) : m_(std::move(m)) {
  for (std::size_t i = 0; i < m_.rows(); ++i) {
    for (std::size_t j = 0; j < m_.cols(); ++j) {
      const double v = m_(i, j);
      if (v != 0.0 && v != 1.0) {
        std::ostringstream msg;
        msg << "response entry (" << i << ", " << j << ") = " << v << " is not binary";
        throw DomainError(msg.str());
      }
    }
  }
}

DenseMatrix reconstruct(const MembershipMatrix& pi, const ItemParamMatrix& theta) {
  if (pi.profiles() != theta.profiles()) {
    throw DimensionError("reconstruct: Pi has " + std::to_string(pi.profiles()) +
                         " profiles, Theta has " + std::to_string(theta.profiles()));
  }
  DenseMatrix out = kernels::gemm_nn(pi.matrix(), theta.matrix().transpose());
  // Convex combinations of [0, 1] values; clamp away rounding at the ends.
  for (double& v : out.data()) v = std::clamp(v, 0.0, 1.0);
  return out;
}

}  // namespace gom
