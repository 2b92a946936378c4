#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "gom/matrix.hpp"
#include "gom/model.hpp"

namespace gom {

using Rng = std::mt19937_64;

/// Seed for stream `index` derived from `base` (SplitMix64 finalizer), so
/// replication i draws the same numbers whatever order replications run in.
std::uint64_t stream_seed(std::uint64_t base, std::uint64_t index);

/// The 4×3 item-parameter blocks used by the identifiability examples.
enum class ThetaBlock {
  kFullRank,           // rank 3
  kRankTwoNonAffine,   // rank 2, no column affine in the others
  kRankTwoAffine,      // rank 2, third column the average of the first two
};
DenseMatrix theta_block(ThetaBlock b);

struct ThetaSource {
  enum class Kind {
    kUniformIID,     // iid Uniform[0, 1]
    kExplicit,       // `matrix`, J×K
    kFullRankTile,   // ThetaBlock::kFullRank stacked J/4 times
    kNonAffineTile,  // ThetaBlock::kRankTwoNonAffine stacked J/4 times
    kRankOneRows,    // every row (0.8, 0.5, 0.2)
  };
  Kind kind = Kind::kUniformIID;
  DenseMatrix matrix;
};

struct PiSource {
  enum class Kind {
    kDirichletWithPureBlock,  // Dirichlet rows, rows 1..K replaced by I_K
    kTruncatedDirichletMin,   // Dirichlet rows floored at `floor`, renormalized
  };
  Kind kind = Kind::kDirichletWithPureBlock;
  double floor = 1.0 / 3.0;
};

struct SimConfig {
  std::size_t n = 200;
  std::size_t j = 40;
  std::size_t k = 3;
  /// Dirichlet parameters; empty means all ones.
  std::vector<double> alpha;
  ThetaSource theta;
  PiSource pi;
  std::uint64_t seed = 1;

  /// Throws ConfigError on a nonpositive alpha, N < K, a tile height that
  /// does not divide J, or a source that needs K = 3 with a different K.
  void validate() const;
  std::vector<double> resolved_alpha() const;
};

struct SimOutput {
  MembershipMatrix pi_true;
  ItemParamMatrix theta_true;
  DenseMatrix r0;  // reconstruct(pi_true, theta_true)
  ResponseMatrix r;
};

/// n independent Dirichlet(alpha) rows via normalized Gamma(alpha_k, 1) draws.
DenseMatrix sample_dirichlet(const std::vector<double>& alpha, std::size_t n, Rng& rng);

/// Independent Bernoulli(r0_ij) draws. DomainError for entries outside [0, 1].
ResponseMatrix bernoulli_sample(const DenseMatrix& r0, Rng& rng);

/// Draws Π, then Θ, then R from a generator seeded with cfg.seed.
SimOutput generate(const SimConfig& cfg);

/// The three identifiability-study settings (K = 3):
/// 1 full-rank tiled Θ with pure subjects, 2 the same Θ without pure
/// subjects (floor 1/3), 3 rank-one Θ with pure subjects.
SimConfig case_preset(int case_id, std::size_t n, std::size_t j, std::uint64_t seed);

}  // namespace gom
