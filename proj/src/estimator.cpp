#include "gom/estimator.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <string>
#include <utility>

#include "gom/errors.hpp"
#include "gom/kernels.hpp"

namespace gom {

namespace {

constexpr double kDegenerateRowSum = 1e-12;
constexpr double kMinRelativeSigma = 1e-12;

template <typename F>
auto in_stage(const char* stage, F&& body) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e);
  }
}

void check_data(const DenseMatrix& data) {
  for (std::size_t i = 0; i < data.rows(); ++i) {
    for (std::size_t j = 0; j < data.cols(); ++j) {
      if (data(i, j) < 0.0 || data(i, j) > 1.0) {
        std::ostringstream msg;
        msg << "data entry (" << i << ", " << j << ") = " << data(i, j) << " outside [0, 1]";
        throw DomainError(msg.str());
      }
    }
  }
}

}  // namespace

void FitConfig::validate() const {
  if (k < 1) throw ConfigError("K must be at least 1");
  if (!(epsilon >= 0.0 && epsilon < 0.5)) throw ConfigError("epsilon must lie in [0, 0.5)");
}

PiEstimate clamp_and_normalize(DenseMatrix raw) {
  PiEstimate out;
  const std::size_t n = raw.rows(), k = raw.cols();
  DenseMatrix pi(n, k);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      double v = raw(i, c);
      if (v < 0.0) {
        v = 0.0;
        ++out.entries_clamped;
      }
      pi(i, c) = v;
      sum += v;
    }
    if (sum <= kDegenerateRowSum) {
      out.degenerate_rows.push_back(i);
      for (std::size_t c = 0; c < k; ++c) pi(i, c) = 1.0 / static_cast<double>(k);
      continue;
    }
    for (std::size_t c = 0; c < k; ++c) pi(i, c) = std::min(pi(i, c) / sum, 1.0);
  }
  out.pi = MembershipMatrix(std::move(pi));
  out.raw = std::move(raw);
  return out;
}

PiEstimate estimate_pi(const DenseMatrix& u_hat, const VertexSet& s_hat) {
  if (s_hat.indices.size() != u_hat.cols()) {
    throw DimensionError("estimate_pi: need exactly K vertex rows");
  }
  const DenseMatrix block = u_hat.select_rows(s_hat.indices);
  const double cond = condition_number(block);
  DenseMatrix inv;
  try {
    inv = invert_square(block);
  } catch (const SingularityError& e) {
    throw SingularityError(std::string("degenerate vertex set: ") + e.what(), e.condition());
  }
  PiEstimate out = clamp_and_normalize(kernels::gemm_nn(u_hat, inv));
  out.vertex_block_condition = cond;
  return out;
}

ThetaEstimate truncate_theta(DenseMatrix raw, double epsilon) {
  ThetaEstimate out;
  DenseMatrix theta = raw;
  for (double& v : theta.data()) {
    if (v < epsilon) {
      v = epsilon;
      ++out.clamped_low;
    } else if (v > 1.0 - epsilon) {
      v = 1.0 - epsilon;
      ++out.clamped_high;
    }
  }
  out.theta = ItemParamMatrix(std::move(theta));
  out.raw = std::move(raw);
  return out;
}

ThetaEstimate estimate_theta(const SvdFactors& svd, const MembershipMatrix& pi_hat, double epsilon) {
  const DenseMatrix& pi = pi_hat.matrix();
  if (pi.rows() != svd.u.rows() || pi.cols() != svd.rank()) {
    throw DimensionError("estimate_theta: Pi shape does not match the SVD factors");
  }
  const DenseMatrix gram = kernels::gemm_tn(pi, pi);
  const double cond = condition_number(gram);
  DenseMatrix gram_inv;
  try {
    gram_inv = invert_square(gram);
  } catch (const SingularityError& e) {
    throw SingularityError(std::string("collinear membership columns: ") + e.what(), e.condition());
  }
  // V̂ · diag(σ) · (ÛᵀΠ̂) · (Π̂ᵀΠ̂)⁻¹, all inner factors K×K.
  DenseMatrix coupling = kernels::gemm_nn(kernels::gemm_tn(svd.u, pi), gram_inv);
  for (std::size_t a = 0; a < coupling.rows(); ++a)
    for (std::size_t b = 0; b < coupling.cols(); ++b) coupling(a, b) *= svd.sigma[a];
  ThetaEstimate out = truncate_theta(kernels::gemm_nn(svd.v, coupling), epsilon);
  out.membership_gram_condition = cond;
  return out;
}

DenseMatrix theta_from_vertex_rows(const SvdFactors& svd, const VertexSet& s_hat) {
  DenseMatrix block_t = svd.u.select_rows(s_hat.indices).transpose();  // K×K, Û_Ŝᵀ
  for (std::size_t a = 0; a < block_t.rows(); ++a)
    for (std::size_t b = 0; b < block_t.cols(); ++b) block_t(a, b) *= svd.sigma[a];
  return kernels::gemm_nn(svd.v, block_t);
}

FitResult fit_from_svd(SvdFactors svd, const FitConfig& cfg) {
  cfg.validate();
  if (svd.rank() != cfg.k) throw ConfigError("fit: SVD rank does not match K");
  FitResult result;

  // Directions past the data's numerical rank are rounding noise that an
  // orthonormal basis scales up to unit length, so SPA would hunt in noise.
  in_stage("svd", [&] {
    const double top = svd.sigma.front(), last = svd.sigma.back();
    if (!(last > kMinRelativeSigma * top)) {
      std::ostringstream msg;
      msg << "data has numerical rank below K=" << cfg.k << " (sigma_K " << last << ", sigma_1 " << top << ")";
      throw SingularityError(msg.str(), last > 0.0 ? top / last : std::numeric_limits<double>::infinity());
    }
    return 0;
  });

  if (cfg.prune_enabled) {
    result.prune_report = in_stage("prune", [&] { return prune(svd.u, cfg.prune); });
  } else {
    result.prune_report.row_norms = kernels::row_norms(svd.u);
  }
  result.s_hat = in_stage("spa", [&] { return spa(svd.u, result.prune_report.pruned, cfg.k); });

  PiEstimate pi = in_stage("estimate_pi", [&] { return estimate_pi(svd.u, result.s_hat); });
  ThetaEstimate theta =
      in_stage("estimate_theta", [&] { return estimate_theta(svd, pi.pi, cfg.epsilon); });

  auto& d = result.diagnostics;
  d.singular_gap = svd.sigma.back();
  d.vertex_block_condition = pi.vertex_block_condition;
  d.pi_entries_clamped = pi.entries_clamped;
  d.pi_degenerate_rows = std::move(pi.degenerate_rows);
  d.membership_gram_condition = theta.membership_gram_condition;
  d.theta_clamped_low = theta.clamped_low;
  d.theta_clamped_high = theta.clamped_high;

  result.pi_hat = std::move(pi.pi);
  result.theta_hat = std::move(theta.theta);
  result.svd = std::move(svd);
  return result;
}

FitResult fit(const DenseMatrix& data, const FitConfig& cfg) {
  cfg.validate();
  check_data(data);
  const std::size_t limit = std::min(data.rows(), data.cols());
  if (cfg.k > limit) {
    throw ConfigError("K=" + std::to_string(cfg.k) + " exceeds min(N, J)=" + std::to_string(limit));
  }
  // One extra triplet, when available, measures the spectral gap.
  const std::size_t want = std::min(cfg.k + 1, limit);
  SvdFactors wide = in_stage("svd", [&] { return truncated_svd(data, want, cfg.svd); });

  std::optional<double> sigma_next;
  if (want > cfg.k) {
    sigma_next = wide.sigma.back();
    std::vector<std::size_t> keep(cfg.k);
    for (std::size_t c = 0; c < cfg.k; ++c) keep[c] = c;
    wide.u = wide.u.select_cols(keep);
    wide.v = wide.v.select_cols(keep);
    wide.sigma.resize(cfg.k);
  }

  FitResult result = fit_from_svd(std::move(wide), cfg);
  result.diagnostics.svd_backend = select_backend(data.rows(), data.cols(), cfg.svd);
  result.diagnostics.sigma_next = sigma_next;
  if (sigma_next) result.diagnostics.singular_gap = result.svd.sigma.back() - *sigma_next;
  return result;
}

FitResult fit(const ResponseMatrix& r, const FitConfig& cfg) { return fit(r.matrix(), cfg); }

}  // namespace gom
