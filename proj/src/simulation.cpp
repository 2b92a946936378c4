#include "gom/simulation.hpp"

#include <algorithm>
#include <sstream>
#include <string>

#include "gom/errors.hpp"

namespace gom {

namespace {

constexpr std::size_t kTileHeight = 4;

bool needs_three_profiles(const SimConfig& cfg) {
  return cfg.theta.kind == ThetaSource::Kind::kFullRankTile ||
         cfg.theta.kind == ThetaSource::Kind::kNonAffineTile ||
         cfg.theta.kind == ThetaSource::Kind::kRankOneRows;
}

DenseMatrix tile(const DenseMatrix& block, std::size_t rows) {
  DenseMatrix out(rows, block.cols());
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t c = 0; c < block.cols(); ++c) out(i, c) = block(i % block.rows(), c);
  return out;
}

DenseMatrix make_theta(const SimConfig& cfg, Rng& rng) {
  switch (cfg.theta.kind) {
    case ThetaSource::Kind::kUniformIID: {
      DenseMatrix t(cfg.j, cfg.k);
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      for (double& v : t.data()) v = unif(rng);
      return t;
    }
    case ThetaSource::Kind::kExplicit:
      return cfg.theta.matrix;
    case ThetaSource::Kind::kFullRankTile:
      return tile(theta_block(ThetaBlock::kFullRank), cfg.j);
    case ThetaSource::Kind::kNonAffineTile:
      return tile(theta_block(ThetaBlock::kRankTwoNonAffine), cfg.j);
    case ThetaSource::Kind::kRankOneRows:
      return tile(DenseMatrix::from_rows({{0.8, 0.5, 0.2}}), cfg.j);
  }
  throw ConfigError("unknown theta source");
}

DenseMatrix make_pi(const SimConfig& cfg, Rng& rng) {
  DenseMatrix pi = sample_dirichlet(cfg.resolved_alpha(), cfg.n, rng);
  if (cfg.pi.kind == PiSource::Kind::kDirichletWithPureBlock) {
    for (std::size_t i = 0; i < cfg.k; ++i)
      for (std::size_t c = 0; c < cfg.k; ++c) pi(i, c) = i == c ? 1.0 : 0.0;
    return pi;
  }
  for (std::size_t i = 0; i < pi.rows(); ++i) {
    double sum = 0.0;
    for (std::size_t c = 0; c < pi.cols(); ++c) {
      pi(i, c) = std::max(pi(i, c), cfg.pi.floor);
      sum += pi(i, c);
    }
    for (std::size_t c = 0; c < pi.cols(); ++c) pi(i, c) /= sum;
  }
  return pi;
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

DenseMatrix theta_block(ThetaBlock b) {
  switch (b) {
    case ThetaBlock::kFullRank:
      return DenseMatrix::from_rows({{0.2, 0.8, 0.8}, {0.2, 0.8, 0.2}, {0.8, 0.2, 0.8}, {0.8, 0.2, 0.2}});
    case ThetaBlock::kRankTwoNonAffine:
      return DenseMatrix::from_rows({{0.2, 0.8, 0.8}, {0.2, 0.8, 0.8}, {0.8, 0.2, 0.8}, {0.8, 0.2, 0.8}});
    case ThetaBlock::kRankTwoAffine:
      return DenseMatrix::from_rows({{0.2, 0.8, 0.5}, {0.2, 0.8, 0.5}, {0.8, 0.2, 0.5}, {0.8, 0.2, 0.5}});
  }
  throw ConfigError("unknown theta block");
}

std::vector<double> SimConfig::resolved_alpha() const {
  return alpha.empty() ? std::vector<double>(k, 1.0) : alpha;
}

void SimConfig::validate() const {
  if (k < 1) throw ConfigError("K must be at least 1");
  if (j < 1) throw ConfigError("J must be at least 1");
  if (n < k) throw ConfigError("N=" + std::to_string(n) + " must be at least K=" + std::to_string(k));
  if (!alpha.empty() && alpha.size() != k) throw ConfigError("alpha must have K entries");
  for (double a : alpha)
    if (!(a > 0.0)) throw ConfigError("Dirichlet parameters must be positive");
  if (needs_three_profiles(*this) && k != 3) throw ConfigError("tiled and rank-one Theta need K=3");
  if ((theta.kind == ThetaSource::Kind::kFullRankTile ||
       theta.kind == ThetaSource::Kind::kNonAffineTile) &&
      j % kTileHeight != 0) {
    throw ConfigError("J=" + std::to_string(j) + " is not a multiple of the tile height 4");
  }
  if (theta.kind == ThetaSource::Kind::kExplicit &&
      (theta.matrix.rows() != j || theta.matrix.cols() != k)) {
    throw ConfigError("explicit Theta must be J×K");
  }
  if (pi.kind == PiSource::Kind::kTruncatedDirichletMin &&
      !(pi.floor >= 0.0 && pi.floor * static_cast<double>(k) <= 1.0)) {
    throw ConfigError("membership floor must lie in [0, 1/K]");
  }
}

DenseMatrix sample_dirichlet(const std::vector<double>& alpha, std::size_t n, Rng& rng) {
  for (double a : alpha)
    if (!(a > 0.0)) throw ConfigError("Dirichlet parameters must be positive");
  const std::size_t k = alpha.size();
  std::vector<std::gamma_distribution<double>> gammas;
  gammas.reserve(k);
  for (double a : alpha) gammas.emplace_back(a, 1.0);

  DenseMatrix out(n, k);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    // Tiny alphas can underflow every draw; redraw the row when that happens.
    while (sum == 0.0) {
      for (std::size_t c = 0; c < k; ++c) {
        out(i, c) = gammas[c](rng);
        sum += out(i, c);
      }
    }
    for (std::size_t c = 0; c < k; ++c) out(i, c) /= sum;
  }
  return out;
}

ResponseMatrix bernoulli_sample(const DenseMatrix& r0, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  DenseMatrix r(r0.rows(), r0.cols());
  for (std::size_t i = 0; i < r0.rows(); ++i) {
    for (std::size_t j = 0; j < r0.cols(); ++j) {
      const double p = r0(i, j);
      if (!(p >= 0.0 && p <= 1.0)) {
        std::ostringstream msg;
        msg << "probability (" << i << ", " << j << ") = " << p << " outside [0, 1]";
        throw DomainError(msg.str());
      }
      r(i, j) = unif(rng) < p ? 1.0 : 0.0;
    }
  }
  return ResponseMatrix(std::move(r));
}

SimOutput generate(const SimConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  MembershipMatrix pi(make_pi(cfg, rng));
  ItemParamMatrix theta(make_theta(cfg, rng));
  DenseMatrix r0 = reconstruct(pi, theta);
  ResponseMatrix r = bernoulli_sample(r0, rng);
  return {std::move(pi), std::move(theta), std::move(r0), std::move(r)};
}

SimConfig case_preset(int case_id, std::size_t n, std::size_t j, std::uint64_t seed) {
  SimConfig cfg;
  cfg.n = n;
  cfg.j = j;
  cfg.k = 3;
  cfg.seed = seed;
  switch (case_id) {
    case 1:
      cfg.theta.kind = ThetaSource::Kind::kFullRankTile;
      break;
    case 2:
      cfg.theta.kind = ThetaSource::Kind::kFullRankTile;
      cfg.pi.kind = PiSource::Kind::kTruncatedDirichletMin;
      cfg.pi.floor = 1.0 / 3.0;
      break;
    case 3:
      cfg.theta.kind = ThetaSource::Kind::kRankOneRows;
      break;
    default:
      throw ConfigError("case must be 1, 2 or 3");
  }
  return cfg;
}

}  // namespace gom
