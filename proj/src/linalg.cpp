#include "gom/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include "eigen_bridge.hpp"
#include "gom/errors.hpp"
#include "gom/kernels.hpp"

namespace gom {

namespace {

using detail::to_dense;
using detail::view;

DenseMatrix orthonormal_basis(const DenseMatrix& y) {
  Eigen::MatrixXd ye = view(y);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(ye);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(ye.rows(), ye.cols());
  return to_dense(q);
}

// Rayleigh-Ritz: given an orthonormal basis Q approximating the leading
// column space of a (n×m), returns the top-k triplets of QQᵀa.
SvdFactors ritz_factors(const DenseMatrix& a, const DenseMatrix& q, std::size_t k) {
  const DenseMatrix b = kernels::gemm_tn(q, a);  // l×m
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(view(b)),
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto kk = static_cast<Eigen::Index>(k);
  SvdFactors f;
  f.u = kernels::gemm_nn(q, to_dense(svd.matrixU().leftCols(kk)));
  f.v = to_dense(svd.matrixV().leftCols(kk));
  f.sigma.assign(svd.singularValues().data(), svd.singularValues().data() + k);
  return f;
}

// Requires a.rows() >= a.cols().
SvdFactors gram_svd(const DenseMatrix& a, std::size_t k) {
  const DenseMatrix gram = kernels::gemm_tn(a, a);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Eigen::MatrixXd(view(gram)));
  if (eig.info() != Eigen::Success) {
    throw ConvergenceError("Gram eigendecomposition did not converge", std::nan(""));
  }
  const auto kk = static_cast<Eigen::Index>(k);
  // Eigenvalues ascend; take the last k columns, largest first.
  Eigen::MatrixXd top = eig.eigenvectors().rightCols(kk).rowwise().reverse();
  const DenseMatrix y = kernels::gemm_nn(a, to_dense(top));
  return ritz_factors(a, orthonormal_basis(y), k);
}

double max_relative_change(const std::vector<double>& prev, const std::vector<double>& cur) {
  const double scale = std::max(cur.empty() ? 0.0 : cur.front(), 1e-300);
  double worst = 0.0;
  for (std::size_t i = 0; i < cur.size(); ++i)
    worst = std::max(worst, std::abs(cur[i] - prev[i]) / scale);
  return worst;
}

// Requires a.rows() >= a.cols().
SvdFactors randomized_svd(const DenseMatrix& a, std::size_t k, const SvdOptions& opts) {
  const std::size_t m = a.cols();
  const std::size_t width = std::min(m, k + opts.oversampling);
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  DenseMatrix omega(m, width);
  for (double& x : omega.data()) x = normal(rng);

  DenseMatrix q = orthonormal_basis(kernels::gemm_nn(a, omega));
  std::vector<double> prev;
  double change = std::numeric_limits<double>::infinity();
  for (std::size_t it = 1; it <= opts.max_power_iterations; ++it) {
    const DenseMatrix z = orthonormal_basis(kernels::gemm_tn(a, q));
    q = orthonormal_basis(kernels::gemm_nn(a, z));
    if (it < opts.min_power_iterations) continue;
    SvdFactors f = ritz_factors(a, q, k);
    if (!prev.empty()) {
      change = max_relative_change(prev, f.sigma);
      if (change <= opts.tolerance) return f;
    }
    prev = f.sigma;
  }
  std::ostringstream msg;
  msg << "randomized subspace iteration did not converge after " << opts.max_power_iterations
      << " iterations (relative singular value change " << change << ")";
  throw ConvergenceError(msg.str(), change);
}

void swap_sides(SvdFactors& f) { std::swap(f.u, f.v); }

}  // namespace

DenseMatrix SvdFactors::reassemble() const {
  DenseMatrix us = u;
  for (std::size_t i = 0; i < us.rows(); ++i)
    for (std::size_t j = 0; j < us.cols(); ++j) us(i, j) *= sigma[j];
  return kernels::gemm_nn(us, v.transpose());
}

SvdBackend select_backend(std::size_t rows, std::size_t cols, const SvdOptions& opts) {
  return std::min(rows, cols) <= opts.gram_threshold ? SvdBackend::kGram : SvdBackend::kRandomized;
}

void apply_sign_convention(SvdFactors& f) {
  for (std::size_t j = 0; j < f.u.cols(); ++j) {
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < f.u.rows(); ++i) {
      if (std::abs(f.u(i, j)) > best) {
        best = std::abs(f.u(i, j));
        arg = i;
      }
    }
    if (f.u.rows() > 0 && f.u(arg, j) < 0.0) {
      for (std::size_t i = 0; i < f.u.rows(); ++i) f.u(i, j) = -f.u(i, j);
      for (std::size_t i = 0; i < f.v.rows(); ++i) f.v(i, j) = -f.v(i, j);
    }
  }
}

SvdFactors truncated_svd(const DenseMatrix& m, std::size_t k, const SvdOptions& opts) {
  const std::size_t limit = std::min(m.rows(), m.cols());
  if (k < 1 || k > limit) {
    throw DimensionError("truncated_svd: K=" + std::to_string(k) + " outside [1, " +
                         std::to_string(limit) + "]");
  }
  const bool wide = m.rows() < m.cols();
  const DenseMatrix tall = wide ? m.transpose() : DenseMatrix();
  const DenseMatrix& a = wide ? tall : m;

  SvdFactors f = select_backend(m.rows(), m.cols(), opts) == SvdBackend::kGram
                     ? gram_svd(a, k)
                     : randomized_svd(a, k, opts);
  if (wide) swap_sides(f);
  for (double& s : f.sigma) s = std::max(s, 0.0);
  apply_sign_convention(f);
  return f;
}

std::vector<double> singular_values(const DenseMatrix& m) {
  if (m.empty()) return {};
  Eigen::BDCSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(view(m)));
  const auto& s = svd.singularValues();
  return {s.data(), s.data() + s.size()};
}

double condition_number(const DenseMatrix& m) {
  const auto s = singular_values(m);
  if (s.empty()) return std::numeric_limits<double>::infinity();
  if (s.back() <= 0.0) return std::numeric_limits<double>::infinity();
  return s.front() / s.back();
}

DenseMatrix invert_square(const DenseMatrix& m) {
  if (m.rows() != m.cols()) {
    throw DimensionError("invert_square: matrix is " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
  }
  if (m.empty()) return m;
  const double cond = condition_number(m);
  if (!(cond <= kMaxConditionNumber)) {
    std::ostringstream msg;
    msg << "matrix is numerically singular (condition number " << cond << ")";
    throw SingularityError(msg.str(), cond);
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(Eigen::MatrixXd(view(m)));
  return to_dense(lu.inverse());
}

std::size_t numerical_rank(const DenseMatrix& m, double tol) {
  if (!(tol > 0.0)) throw ConfigError("numerical_rank: tol must be positive");
  const auto s = singular_values(m);
  if (s.empty() || s.front() == 0.0) return 0;
  const double cut = tol * s.front();
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [&](double x) { return x > cut; }));
}

}  // namespace gom
