#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "gom/linalg.hpp"
#include "gom/matrix.hpp"
#include "gom/model.hpp"
#include "gom/vertex_hunting.hpp"

namespace gom {

struct FitConfig {
  std::size_t k = 3;
  /// Θ̂ is truncated to [epsilon, 1 - epsilon].
  double epsilon = 0.001;
  PruneConfig prune;
  bool prune_enabled = true;
  SvdOptions svd;

  /// Throws ConfigError unless k >= 1 and 0 <= epsilon < 0.5.
  void validate() const;
};

struct FitDiagnostics {
  SvdBackend svd_backend = SvdBackend::kGram;
  /// Singular value K+1 of the data, when K < min(N, J).
  std::optional<double> sigma_next;
  /// sigma_K - sigma_{K+1} (or sigma_K when there is no K+1-th value).
  double singular_gap = 0.0;
  double vertex_block_condition = 0.0;  // κ(Û_Ŝ)
  double membership_gram_condition = 0.0;  // κ(Π̂ᵀΠ̂)
  std::size_t pi_entries_clamped = 0;
  std::vector<std::size_t> pi_degenerate_rows;
  std::size_t theta_clamped_low = 0;
  std::size_t theta_clamped_high = 0;
};

struct FitResult {
  MembershipMatrix pi_hat;
  ItemParamMatrix theta_hat;
  VertexSet s_hat;
  SvdFactors svd;
  PruneReport prune_report;
  FitDiagnostics diagnostics;
};

struct PiEstimate {
  MembershipMatrix pi;
  DenseMatrix raw;  // Û·(Û_Ŝ)⁻¹ before clamping
  std::size_t entries_clamped = 0;
  std::vector<std::size_t> degenerate_rows;
  double vertex_block_condition = 0.0;
};

struct ThetaEstimate {
  ItemParamMatrix theta;
  DenseMatrix raw;  // before truncation
  std::size_t clamped_low = 0;
  std::size_t clamped_high = 0;
  double membership_gram_condition = 0.0;
};

/// Π̃ = Û·(Û_Ŝ)⁻¹, negatives set to zero, rows renormalized. A row that is
/// entirely clamped away becomes uniform 1/K and is listed in
/// degenerate_rows. Throws SingularityError if Û_Ŝ is singular.
PiEstimate estimate_pi(const DenseMatrix& u_hat, const VertexSet& s_hat);

/// Clamps negatives and renormalizes rows of a raw membership estimate.
PiEstimate clamp_and_normalize(DenseMatrix raw);

/// Θ̃ = V̂Σ̂Ûᵀ·Π̂(Π̂ᵀΠ̂)⁻¹ truncated entrywise to [epsilon, 1 - epsilon].
/// Throws SingularityError if Π̂ᵀΠ̂ is singular (collinear memberships).
ThetaEstimate estimate_theta(const SvdFactors& svd, const MembershipMatrix& pi_hat, double epsilon);

/// Entrywise truncation to [epsilon, 1 - epsilon].
ThetaEstimate truncate_theta(DenseMatrix raw, double epsilon);

/// V̂Σ̂(Û_Ŝ)ᵀ: the item parameters read off the vertex rows alone (no
/// truncation). Agrees with estimate_theta's raw output on noiseless data.
DenseMatrix theta_from_vertex_rows(const SvdFactors& svd, const VertexSet& s_hat);

/// Full pipeline on a data matrix with entries in [0, 1]: truncated SVD,
/// optional pruning, SPA, then the closed-form Π̂ and Θ̂. Errors are rethrown
/// as StageError naming the stage.
FitResult fit(const DenseMatrix& data, const FitConfig& cfg);
FitResult fit(const ResponseMatrix& r, const FitConfig& cfg);

/// Everything after the SVD, for callers that already hold the factors.
FitResult fit_from_svd(SvdFactors svd, const FitConfig& cfg);

}  // namespace gom
