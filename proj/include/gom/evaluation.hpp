#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gom/estimator.hpp"
#include "gom/matrix.hpp"
#include "gom/model.hpp"
#include "gom/simulation.hpp"

namespace gom {

struct AlignedComparison {
  /// permutation[k] is the estimated column matched to true column k (0-based).
  std::vector<std::size_t> permutation;
  double mae_pi = 0.0;
  double mae_theta = 0.0;
  /// Set when K is too large for exhaustive search and greedy matching was used.
  std::optional<std::string> warning;
};

inline constexpr std::size_t kMaxExhaustiveK = 10;

/// Column matching between estimated and true factors minimizing
/// mae_pi + mae_theta over all K! permutations (identity wins ties). Above
/// kMaxExhaustiveK, columns are matched greedily by Θ-column correlation.
AlignedComparison align(const DenseMatrix& pi_hat, const DenseMatrix& theta_hat,
                        const DenseMatrix& pi_true, const DenseMatrix& theta_true);

/// Mean absolute difference between two equally shaped matrices.
double mean_abs_error(const DenseMatrix& a, const DenseMatrix& b);

/// (1/NJ)·Σ|(Π̂Θ̂ᵀ)_ij − R_ij|.
double reconstruction_error(const MembershipMatrix& pi_hat, const ItemParamMatrix& theta_hat,
                            const DenseMatrix& r);

struct SummaryStats {
  double mean = 0.0;
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
};

/// Sample mean and linearly interpolated quartiles; NaN for an empty sample.
SummaryStats summarize(std::vector<double> values);

struct ReplicationRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double mae_pi = 0.0;
  double mae_theta = 0.0;
  double seconds = 0.0;  // wall time of the fit alone
  std::vector<std::size_t> permutation;
};

struct ReplicationSummary {
  SimConfig cell;
  std::vector<ReplicationRecord> records;  // ordered by index
  std::size_t failures = 0;
  SummaryStats mae_pi;
  SummaryStats mae_theta;
  SummaryStats seconds;
};

struct ReplicationOptions {
  std::size_t reps = 100;
  /// Run replications concurrently. Wall times are then measured under
  /// contention, so timing studies should turn this off.
  bool parallel = true;
};

/// For every grid cell and replication r: simulate with seed
/// stream_seed(cell.seed, r), fit with K = cell.k, align, record. A failed
/// fit is recorded with its message and counted, not rethrown.
std::vector<ReplicationSummary> run_replications(const std::vector<SimConfig>& grid,
                                                 const FitConfig& fit_cfg,
                                                 const ReplicationOptions& opts);

struct KSweepEntry {
  std::size_t k = 0;
  bool ok = false;
  double error = 0.0;  // reconstruction error when ok
  std::string message;
};

/// Fits every K in `ks` to R and reports the reconstruction error of each.
std::vector<KSweepEntry> k_sweep(const DenseMatrix& r, const std::vector<std::size_t>& ks,
                                 const FitConfig& fit_cfg);

/// The K with the smallest error among successful sweep entries (the
/// smaller K on ties); nullopt when none succeeded.
std::optional<std::size_t> best_k(const std::vector<KSweepEntry>& sweep);

}  // namespace gom
