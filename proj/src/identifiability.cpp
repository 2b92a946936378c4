#include "gom/identifiability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "eigen_bridge.hpp"
#include "gom/errors.hpp"
#include "gom/kernels.hpp"
#include "gom/linalg.hpp"

namespace gom {

namespace {

constexpr double kRoundingSlack = 1e-12;

bool borderline_rank(const std::vector<double>& s, double tol) {
  if (s.empty() || s.front() == 0.0) return false;
  for (double x : s) {
    const double ratio = x / s.front();
    if (ratio > tol / 10.0 && ratio < tol * 10.0) return true;
  }
  return false;
}

// Snap values within rounding of [0, 1] onto it; report anything further out.
void snap_to_unit_interval(DenseMatrix& m, const char* what) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      double& v = m(i, j);
      if (v < -kRoundingSlack || v > 1.0 + kRoundingSlack) {
        std::ostringstream msg;
        msg << what << " entry (" << i + 1 << ", " << j + 1 << ") = " << v
            << " leaves [0, 1]; eps is too large for this parameter set";
        throw ValidityError(msg.str());
      }
      v = std::clamp(v, 0.0, 1.0);
    }
  }
}

}  // namespace

std::string to_string(IdentifiabilityCase c) {
  switch (c) {
    case IdentifiabilityCase::kFullRank:
      return "FullRank_A";
    case IdentifiabilityCase::kRankDeficientIdentifiable:
      return "RankDeficientIdentifiable_B";
    case IdentifiabilityCase::kNotIdentifiable:
      return "NotIdentifiable_C";
    case IdentifiabilityCase::kInconclusive:
      return "Inconclusive";
  }
  return "Inconclusive";
}

std::vector<std::optional<std::size_t>> find_pure_subjects(const MembershipMatrix& pi, double tol) {
  if (!(tol >= 0.0 && tol < 0.5)) throw ConfigError("pure-subject tolerance must lie in [0, 0.5)");
  std::vector<std::optional<std::size_t>> out(pi.profiles());
  for (std::size_t k = 0; k < pi.profiles(); ++k) {
    for (std::size_t i = 0; i < pi.subjects(); ++i) {
      if (pi(i, k) >= 1.0 - tol) {
        out[k] = i;
        break;
      }
    }
  }
  return out;
}

bool is_affine_combination_of_others(const DenseMatrix& theta, std::size_t k, double tol) {
  const std::size_t j = theta.rows(), kk = theta.cols();
  Eigen::MatrixXd a(static_cast<Eigen::Index>(j + 1), static_cast<Eigen::Index>(kk - 1));
  Eigen::VectorXd b(static_cast<Eigen::Index>(j + 1));
  for (std::size_t row = 0; row < j; ++row) {
    Eigen::Index col = 0;
    for (std::size_t c = 0; c < kk; ++c) {
      if (c == k) continue;
      a(static_cast<Eigen::Index>(row), col++) = theta(row, c);
    }
    b(static_cast<Eigen::Index>(row)) = theta(row, k);
  }
  a.row(static_cast<Eigen::Index>(j)).setOnes();
  b(static_cast<Eigen::Index>(j)) = 1.0;

  const double target = b.head(static_cast<Eigen::Index>(j)).norm();
  if (kk == 1) return false;
  const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(b);
  const double residual = (a * coef - b).norm();
  return residual < tol * target;
}

IdentifiabilityVerdict classify_theta(const DenseMatrix& theta, std::size_t k, double tol) {
  if (theta.cols() != k) {
    throw DimensionError("classify_theta: Theta has " + std::to_string(theta.cols()) +
                         " columns, expected K=" + std::to_string(k));
  }
  IdentifiabilityVerdict v;
  v.affine_flags.assign(k, false);
  v.rank_theta = numerical_rank(theta, tol);

  if (borderline_rank(singular_values(theta), tol)) {
    v.verdict = IdentifiabilityCase::kInconclusive;
    return v;
  }
  if (v.rank_theta == k) {
    v.verdict = IdentifiabilityCase::kFullRank;
  } else if (v.rank_theta + 1 == k) {
    bool any = false;
    for (std::size_t c = 0; c < k; ++c) {
      v.affine_flags[c] = is_affine_combination_of_others(theta, c, tol);
      any = any || v.affine_flags[c];
    }
    v.verdict = any ? IdentifiabilityCase::kNotIdentifiable
                    : IdentifiabilityCase::kRankDeficientIdentifiable;
  } else {
    v.verdict = IdentifiabilityCase::kNotIdentifiable;
  }
  return v;
}

IdentifiabilityVerdict assess(const DenseMatrix& theta, const MembershipMatrix& pi, double tol,
                              double pure_tol) {
  IdentifiabilityVerdict v = classify_theta(theta, pi.profiles(), tol);
  v.pure_subject_indices = find_pure_subjects(pi, pure_tol);
  bool mixed = false;
  for (std::size_t i = 0; i < pi.subjects() && !mixed; ++i) {
    const auto row = pi.matrix().row(i);
    mixed = std::all_of(row.begin(), row.end(), [](double x) { return x > 0.0; });
  }
  v.has_completely_mixed_subject = mixed;
  return v;
}

ConditionDiagnostics condition_diagnostics(const DenseMatrix& pi, const DenseMatrix& theta) {
  if (pi.cols() != theta.cols()) throw DimensionError("condition_diagnostics: K mismatch");
  ConditionDiagnostics d;
  const std::size_t k = pi.cols();
  const auto summarize = [&](const DenseMatrix& m, double& kappa, double& ratio, bool& deficient,
                             const char* name) {
    const auto s = singular_values(m);
    const double smax = s.empty() ? 0.0 : s.front();
    const double smin = s.size() < k ? 0.0 : s[k - 1];
    deficient = s.size() < k || smax == 0.0 || numerical_rank(m, kDefaultRankTolerance) < k;
    kappa = deficient ? std::numeric_limits<double>::infinity() : smax / smin;
    ratio = deficient ? 0.0 : smin / std::sqrt(static_cast<double>(m.rows()));
    if (deficient) {
      d.warnings.push_back(std::string(name) + " is rank deficient");
    } else {
      if (kappa > ConditionDiagnostics::kWarnKappa)
        d.warnings.push_back(std::string(name) + " condition number above 10");
      if (ratio < ConditionDiagnostics::kWarnRatio)
        d.warnings.push_back(std::string(name) + " sigma_K ratio below 0.1");
    }
  };
  summarize(pi, d.kappa_pi, d.sigma_k_pi_over_sqrt_n, d.pi_rank_deficient, "Pi");
  summarize(theta, d.kappa_theta, d.sigma_k_theta_over_sqrt_j, d.theta_rank_deficient, "Theta");
  return d;
}

DenseMatrix perturbation_transform(std::size_t k, double eps) {
  DenseMatrix m(k, k);
  const double km1 = static_cast<double>(k) - 1.0;
  m(0, 0) = 1.0 + km1 * eps * eps;
  for (std::size_t c = 1; c < k; ++c) m(0, c) = -eps * eps;
  for (std::size_t r = 1; r < k; ++r)
    for (std::size_t c = 1; c < k; ++c) m(r, c) = eps + (r == c ? 1.0 - km1 * eps : 0.0);
  return m;
}

AlternativeParameters construct_alternative(const MembershipMatrix& pi,
                                            const ItemParamMatrix& theta, double eps) {
  const std::size_t k = pi.profiles();
  if (theta.profiles() != k) throw DimensionError("construct_alternative: K mismatch");
  if (!(eps >= 0.0)) throw PreconditionError("eps must be nonnegative");
  if (k >= 2 && eps > 1.0 / static_cast<double>(k - 1)) {
    throw PreconditionError("eps must not exceed 1/(K-1)");
  }
  double max_first = 0.0;
  std::size_t argmax = 0;
  for (std::size_t i = 0; i < pi.subjects(); ++i) {
    if (pi(i, 0) > max_first) {
      max_first = pi(i, 0);
      argmax = i;
    }
  }
  const double delta = 1.0 - max_first;
  if (!(delta > eps)) {
    std::ostringstream msg;
    msg << "profile 1 needs max membership below 1 - eps; subject " << argmax + 1 << " has "
        << max_first << (delta <= 0.0 ? " (a pure subject)" : "");
    throw PreconditionError(msg.str());
  }
  for (std::size_t j = 0; j < theta.items(); ++j) {
    for (std::size_t c = 0; c < k; ++c) {
      if (!(theta(j, c) > 0.0 && theta(j, c) < 1.0)) {
        std::ostringstream msg;
        msg << "item parameter (" << j + 1 << ", " << c + 1 << ") = " << theta(j, c)
            << " is not strictly inside (0, 1)";
        throw PreconditionError(msg.str());
      }
    }
  }

  DenseMatrix m = perturbation_transform(k, eps);
  DenseMatrix pi_alt = kernels::gemm_nn(pi.matrix(), m);
  // Θ̃ᵀ = M⁻¹Θᵀ keeps Π̃Θ̃ᵀ = ΠM·M⁻¹Θᵀ = ΠΘᵀ.
  DenseMatrix theta_alt = kernels::gemm_nn(theta.matrix(), invert_square(m).transpose());
  snap_to_unit_interval(pi_alt, "membership");
  snap_to_unit_interval(theta_alt, "item parameter");
  return {MembershipMatrix(std::move(pi_alt)), ItemParamMatrix(std::move(theta_alt)), std::move(m)};
}

std::pair<MembershipMatrix, ItemParamMatrix> move_profile_first(const MembershipMatrix& pi,
                                                                const ItemParamMatrix& theta,
                                                                std::size_t profile) {
  const std::size_t k = pi.profiles();
  if (profile >= k || theta.profiles() != k) throw DimensionError("move_profile_first: bad profile");
  std::vector<std::size_t> order(k);
  for (std::size_t c = 0; c < k; ++c) order[c] = c;
  std::swap(order[0], order[profile]);
  return {MembershipMatrix(pi.matrix().select_cols(order)),
          ItemParamMatrix(theta.matrix().select_cols(order))};
}

}  // namespace gom
