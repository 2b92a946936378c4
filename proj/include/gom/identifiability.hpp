#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gom/matrix.hpp"
#include "gom/model.hpp"

namespace gom {

enum class IdentifiabilityCase {
  kFullRank,                    // rank(Θ) = K
  kRankDeficientIdentifiable,   // rank(Θ) = K-1, no column affine in the others
  kNotIdentifiable,             // everything else
  kInconclusive,                // numerical rank too close to the tolerance to call
};

std::string to_string(IdentifiabilityCase c);

struct IdentifiabilityVerdict {
  IdentifiabilityCase verdict = IdentifiabilityCase::kInconclusive;
  std::size_t rank_theta = 0;
  /// Column k is an affine combination of the other columns. Only evaluated
  /// when rank(Θ) = K-1; all false otherwise.
  std::vector<bool> affine_flags;
  /// Per profile, the lowest-index pure subject (filled only when Π is known).
  std::vector<std::optional<std::size_t>> pure_subject_indices;
  /// Some subject has positive membership in every profile (Π known only).
  std::optional<bool> has_completely_mixed_subject;
};

struct ConditionDiagnostics {
  double kappa_pi = 0.0;
  double kappa_theta = 0.0;
  double sigma_k_pi_over_sqrt_n = 0.0;
  double sigma_k_theta_over_sqrt_j = 0.0;
  bool pi_rank_deficient = false;
  bool theta_rank_deficient = false;
  /// Conditioning flags: κ above kWarnKappa or a σ_K ratio below kWarnRatio.
  std::vector<std::string> warnings;

  static constexpr double kWarnKappa = 10.0;
  static constexpr double kWarnRatio = 0.1;
};

/// For each profile k, the lowest i with π_ik >= 1 - tol.
std::vector<std::optional<std::size_t>> find_pure_subjects(const MembershipMatrix& pi, double tol);

inline constexpr double kDefaultRankTolerance = 1e-8;

/// Classifies Θ by the rank / affine-combination criteria. `tol` is both the
/// relative singular value cutoff and the relative least-squares residual
/// below which a column counts as an affine combination of the others.
IdentifiabilityVerdict classify_theta(const DenseMatrix& theta, std::size_t k,
                                      double tol = kDefaultRankTolerance);

/// classify_theta plus the pure-subject and completely-mixed checks on Π.
IdentifiabilityVerdict assess(const DenseMatrix& theta, const MembershipMatrix& pi,
                              double tol = kDefaultRankTolerance, double pure_tol = 0.0);

/// Whether column k of Θ equals Σ_{m≠k} a_m θ_m with Σ a_m = 1, tested by
/// least squares on the system augmented with a row of ones.
bool is_affine_combination_of_others(const DenseMatrix& theta, std::size_t k, double tol);

ConditionDiagnostics condition_diagnostics(const DenseMatrix& pi, const DenseMatrix& theta);

struct AlternativeParameters {
  MembershipMatrix pi;
  ItemParamMatrix theta;
  DenseMatrix transform;  // M_eps
};

/// The K×K transform M_eps: first row (1 + (K-1)eps², -eps², ..., -eps²),
/// zeros below it in the first column, and eps·11ᵀ + (1 - (K-1)eps)·I in the
/// trailing block. Every row sums to one.
DenseMatrix perturbation_transform(std::size_t k, double eps);

/// Builds a second valid parameter set (Π·M_eps, Θ·(M_eps⁻¹)ᵀ) with the same
/// Π·Θᵀ when profile 1 (column 0) has no pure subject.
///
/// Throws PreconditionError if profile 1 has max π_i1 >= 1 - eps, if some
/// θ_jk lies outside (0, 1), or if eps > 1/(K-1); ValidityError if an output
/// entry leaves its domain.
AlternativeParameters construct_alternative(const MembershipMatrix& pi,
                                            const ItemParamMatrix& theta, double eps);

/// Swaps profile `profile` into position 0 of both matrices so that
/// construct_alternative can target it.
std::pair<MembershipMatrix, ItemParamMatrix> move_profile_first(const MembershipMatrix& pi,
                                                                const ItemParamMatrix& theta,
                                                                std::size_t profile);

}  // namespace gom
