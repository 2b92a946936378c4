#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gom/errors.hpp"
#include "gom/identifiability.hpp"
#include "gom/simulation.hpp"
#include "oracles.hpp"

using gom::DenseMatrix;
using gom::IdentifiabilityCase;

namespace {

DenseMatrix stacked_identity(std::size_t copies, std::size_t k) {
  DenseMatrix m(copies * k, k);
  for (std::size_t i = 0; i < copies * k; ++i) m(i, i % k) = 1.0;
  return m;
}

}  // namespace

TEST(PureSubjects, Examples) {
  const gom::MembershipMatrix with_block(stacked_identity(1, 3));
  const auto p = gom::find_pure_subjects(with_block, 0.0);
  ASSERT_EQ(p.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(p[k], k);

  const gom::MembershipMatrix single(DenseMatrix::from_rows({{1.0, 0.0}}));
  const auto q = gom::find_pure_subjects(single, 0.0);
  EXPECT_EQ(q[0], 0u);
  EXPECT_FALSE(q[1].has_value());

  auto cfg = gom::case_preset(2, 500, 100, 3);
  const auto sim = gom::generate(cfg);
  for (const auto& idx : gom::find_pure_subjects(sim.pi_true, 0.05)) EXPECT_FALSE(idx.has_value());

  EXPECT_THROW(gom::find_pure_subjects(single, 0.5), gom::ConfigError);
}

TEST(ClassifyTheta, WorkedExamples) {
  const auto a = gom::classify_theta(gom::theta_block(gom::ThetaBlock::kFullRank), 3);
  EXPECT_EQ(a.verdict, IdentifiabilityCase::kFullRank);
  EXPECT_EQ(a.rank_theta, 3u);

  const auto b = gom::classify_theta(gom::theta_block(gom::ThetaBlock::kRankTwoNonAffine), 3);
  EXPECT_EQ(b.verdict, IdentifiabilityCase::kRankDeficientIdentifiable);
  EXPECT_EQ(b.rank_theta, 2u);
  EXPECT_EQ(b.affine_flags, (std::vector<bool>{false, false, false}));

  const auto c = gom::classify_theta(gom::theta_block(gom::ThetaBlock::kRankTwoAffine), 3);
  EXPECT_EQ(c.verdict, IdentifiabilityCase::kNotIdentifiable);
  EXPECT_EQ(c.rank_theta, 2u);
  EXPECT_TRUE(c.affine_flags[2]);
}

TEST(ClassifyTheta, RankOneIsNotIdentifiable) {
  const auto v = gom::classify_theta(DenseMatrix::from_rows({{0.8, 0.5, 0.2}, {0.8, 0.5, 0.2}}), 3);
  EXPECT_EQ(v.verdict, IdentifiabilityCase::kNotIdentifiable);
  EXPECT_EQ(v.rank_theta, 1u);
}

TEST(ClassifyTheta, BorderlineRankIsInconclusive) {
  DenseMatrix t = gom::theta_block(gom::ThetaBlock::kRankTwoNonAffine);
  t(0, 2) += 2e-8;  // smallest singular value now sits near tol·σ_max
  EXPECT_EQ(gom::classify_theta(t, 3).verdict, IdentifiabilityCase::kInconclusive);
  EXPECT_THROW(gom::classify_theta(t, 2), gom::DimensionError);
}

TEST(ClassifyTheta, VerdictInvariants) {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    const DenseMatrix t = oracle::random_matrix(6, 3, rng);
    const auto v = gom::classify_theta(t, 3);
    if (v.verdict == IdentifiabilityCase::kFullRank) EXPECT_EQ(v.rank_theta, 3u);
  }
}

TEST(Assess, ReportsPureAndMixedSubjects) {
  DenseMatrix pi = stacked_identity(1, 3);
  std::vector<std::vector<double>> rows{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0.2, 0.3, 0.5}};
  const gom::MembershipMatrix m(DenseMatrix::from_rows(rows));
  const auto v = gom::assess(gom::theta_block(gom::ThetaBlock::kFullRank), m);
  EXPECT_EQ(v.verdict, IdentifiabilityCase::kFullRank);
  ASSERT_TRUE(v.has_completely_mixed_subject.has_value());
  EXPECT_TRUE(*v.has_completely_mixed_subject);
  EXPECT_EQ(v.pure_subject_indices[2], 2u);

  const auto w = gom::assess(gom::theta_block(gom::ThetaBlock::kFullRank), gom::MembershipMatrix(pi));
  EXPECT_FALSE(*w.has_completely_mixed_subject);
}

TEST(ConditionDiagnostics, Examples) {
  const auto d = gom::condition_diagnostics(stacked_identity(4, 3), gom::theta_block(gom::ThetaBlock::kFullRank));
  EXPECT_NEAR(d.kappa_pi, 1.0, 1e-12);
  EXPECT_NEAR(d.sigma_k_pi_over_sqrt_n, 1.0 / std::sqrt(3.0), 1e-12);
  EXPECT_FALSE(d.pi_rank_deficient);

  const auto e = gom::condition_diagnostics(DenseMatrix::identity(2), DenseMatrix::identity(2));
  EXPECT_NEAR(e.kappa_pi, 1.0, 1e-12);

  const auto f = gom::condition_diagnostics(DenseMatrix::identity(3), gom::theta_block(gom::ThetaBlock::kRankTwoAffine));
  EXPECT_TRUE(f.theta_rank_deficient);
  EXPECT_TRUE(std::isinf(f.kappa_theta));
  EXPECT_FALSE(f.warnings.empty());
}

TEST(PerturbationTransform, MatchesBlockFormula) {
  const DenseMatrix m = gom::perturbation_transform(3, 0.1);
  const DenseMatrix want = DenseMatrix::from_rows({{1.02, -0.01, -0.01}, {0, 0.9, 0.1}, {0, 0.1, 0.9}});
  EXPECT_LT(gom::max_abs_diff(m, want), 1e-15);
  EXPECT_EQ(gom::perturbation_transform(4, 0.0), DenseMatrix::identity(4));
  for (std::size_t i = 0; i < 3; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < 3; ++j) s += m(i, j);
    EXPECT_NEAR(s, 1.0, 1e-15);
  }
}

TEST(ConstructAlternative, ProducesSecondValidFactorization) {
  const auto sim = gom::generate(gom::case_preset(2, 60, 20, 4));
  const auto alt = gom::construct_alternative(sim.pi_true, sim.theta_true, 0.1);
  EXPECT_LT(gom::max_abs_diff(gom::reconstruct(alt.pi, alt.theta), gom::reconstruct(sim.pi_true, sim.theta_true)),
            1e-12);
  EXPECT_GT(gom::max_abs_diff(alt.pi.matrix(), sim.pi_true.matrix()), 1e-3);
}

TEST(ConstructAlternative, ZeroEpsIsIdentity) {
  const auto sim = gom::generate(gom::case_preset(2, 30, 8, 5));
  const auto alt = gom::construct_alternative(sim.pi_true, sim.theta_true, 0.0);
  EXPECT_EQ(alt.pi.matrix(), sim.pi_true.matrix());
  EXPECT_LT(gom::max_abs_diff(alt.theta.matrix(), sim.theta_true.matrix()), 1e-15);
}

TEST(ConstructAlternative, Preconditions) {
  const auto sim = gom::generate(gom::case_preset(1, 30, 8, 6));
  EXPECT_THROW(gom::construct_alternative(sim.pi_true, sim.theta_true, 0.05), gom::PreconditionError);

  const auto mixed = gom::generate(gom::case_preset(2, 30, 8, 6));
  EXPECT_THROW(gom::construct_alternative(mixed.pi_true, mixed.theta_true, 0.6), gom::PreconditionError);
  const gom::ItemParamMatrix edge(DenseMatrix::constant(8, 3, 1.0));
  EXPECT_THROW(gom::construct_alternative(mixed.pi_true, edge, 0.05), gom::PreconditionError);
}

TEST(ConstructAlternative, TooLargeEpsReportsOffendingEntry) {
  const gom::MembershipMatrix pi(DenseMatrix::from_rows({{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}}));
  const gom::ItemParamMatrix theta(DenseMatrix::from_rows({{0.01, 0.99, 0.01}}));
  try {
    gom::construct_alternative(pi, theta, 0.4);
    FAIL() << "expected a validity error";
  } catch (const gom::ValidityError& e) {
    EXPECT_NE(std::string(e.what()).find("entry ("), std::string::npos);
  }
}

TEST(ConstructAlternative, MoveProfileFirst) {
  const gom::MembershipMatrix pi(DenseMatrix::from_rows({{0.6, 0.4, 0.0}, {0.0, 0.0, 1.0}}));
  const gom::ItemParamMatrix theta(DenseMatrix::from_rows({{0.1, 0.2, 0.3}}));
  const auto [p, t] = gom::move_profile_first(pi, theta, 2);
  EXPECT_DOUBLE_EQ(p(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(t(0, 0), 0.3);
  EXPECT_DOUBLE_EQ(t(0, 2), 0.1);
}

// Not identifiable with an affine column and a completely mixed subject:
// moving that subject along d, with Θd = 0 and 1ᵀd = 0, keeps ΠΘᵀ.
TEST(PartC, AffineColumnAdmitsDifferentMembership) {
  const DenseMatrix theta = gom::theta_block(gom::ThetaBlock::kRankTwoAffine);
  const double d[3] = {0.5, 0.5, -1.0};  // θ₃ = ½θ₁ + ½θ₂
  for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(theta(j, 0) * d[0] + theta(j, 1) * d[1] + theta(j, 2) * d[2], 0.0, 1e-15);

  DenseMatrix pi = DenseMatrix::from_rows({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0.3, 0.3, 0.4}});
  DenseMatrix moved = pi;
  for (int c = 0; c < 3; ++c) moved(3, c) += 0.1 * d[c];
  const gom::ItemParamMatrix th(theta);
  const gom::MembershipMatrix a(pi), b(moved);
  EXPECT_LT(gom::max_abs_diff(gom::reconstruct(a, th), gom::reconstruct(b, th)), 1e-15);
  EXPECT_GT(gom::max_abs_diff(pi, moved), 0.05);
  EXPECT_EQ(gom::assess(theta, a).verdict, IdentifiabilityCase::kNotIdentifiable);
}
