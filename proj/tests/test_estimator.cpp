#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gom/errors.hpp"
#include "gom/estimator.hpp"
#include "gom/evaluation.hpp"
#include "gom/kernels.hpp"
#include "gom/simulation.hpp"
#include "oracles.hpp"

using gom::DenseMatrix;

namespace {

DenseMatrix product(const DenseMatrix& a, const DenseMatrix& b) { return gom::kernels::serial::gemm_nn(a, b); }

struct Noiseless {
  DenseMatrix pi, theta, r0;
};

Noiseless noiseless(std::size_t n, std::size_t j, std::size_t k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Noiseless out;
  out.pi = oracle::random_membership_with_pure(n, k, rng);
  out.theta = oracle::random_matrix(j, k, rng, 0.05, 0.95);
  out.r0 = product(out.pi, out.theta.transpose());
  return out;
}

}  // namespace

TEST(Model, TypeInvariants) {
  EXPECT_THROW(gom::MembershipMatrix(DenseMatrix::from_rows({{0.5, 0.4}})), gom::DomainError);
  EXPECT_THROW(gom::MembershipMatrix(DenseMatrix::from_rows({{1.2, -0.2}})), gom::DomainError);
  EXPECT_THROW(gom::ItemParamMatrix(DenseMatrix::from_rows({{1.1}})), gom::DomainError);
  EXPECT_THROW(gom::ResponseMatrix(DenseMatrix::from_rows({{0.5}})), gom::DomainError);
  EXPECT_NO_THROW(gom::ResponseMatrix(DenseMatrix::from_rows({{0, 1}})));
}

TEST(Reconstruct, Examples) {
  const gom::MembershipMatrix eye(DenseMatrix::identity(2));
  EXPECT_EQ(gom::reconstruct(eye, gom::ItemParamMatrix(DenseMatrix::identity(2))), DenseMatrix::identity(2));
  const gom::MembershipMatrix half(DenseMatrix::from_rows({{0.5, 0.5}}));
  const gom::ItemParamMatrix th(DenseMatrix::from_rows({{0.2, 0.8}}));
  EXPECT_DOUBLE_EQ(gom::reconstruct(half, th)(0, 0), 0.5);
  EXPECT_THROW(gom::reconstruct(half, gom::ItemParamMatrix(DenseMatrix::from_rows({{0.2}}))),
               gom::DimensionError);

  std::mt19937_64 rng(1);
  const gom::MembershipMatrix pi(oracle::random_membership_with_pure(30, 4, rng));
  const gom::ItemParamMatrix theta(oracle::random_matrix(12, 4, rng));
  for (double v : gom::reconstruct(pi, theta).data()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(EstimatePi, IdentityVertexBlockLeavesRowsUnchanged) {
  const DenseMatrix u = DenseMatrix::from_rows({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0.2, 0.3, 0.5}, {0.6, 0.4, 0.0}});
  const auto est = gom::estimate_pi(u, {{0, 1, 2}});
  EXPECT_LT(gom::max_abs_diff(est.pi.matrix(), u), 1e-15);
  EXPECT_EQ(est.entries_clamped, 0u);
}

TEST(EstimatePi, ClampThenNormalize) {
  const auto est = gom::clamp_and_normalize(DenseMatrix::from_rows({{-0.1, 0.55, 0.55}}));
  EXPECT_DOUBLE_EQ(est.pi(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(est.pi(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(est.pi(0, 2), 0.5);
  EXPECT_EQ(est.entries_clamped, 1u);
}

TEST(EstimatePi, AllClampedRowBecomesUniform) {
  const auto est = gom::clamp_and_normalize(DenseMatrix::from_rows({{-0.1, -0.2}, {0.3, 0.7}}));
  EXPECT_EQ(est.degenerate_rows, (std::vector<std::size_t>{0}));
  EXPECT_DOUBLE_EQ(est.pi(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(est.pi(0, 1), 0.5);
}

TEST(EstimatePi, NoiselessRecoversPiExactly) {
  std::mt19937_64 rng(2);
  const DenseMatrix pi = oracle::random_membership_with_pure(40, 3, rng);
  DenseMatrix us = oracle::random_matrix(3, 3, rng, -1, 1);
  for (int i = 0; i < 3; ++i) us(i, i) += 2.0;
  const DenseMatrix u = product(pi, us);
  std::vector<std::size_t> s;
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < 40; ++i)
      if (pi(i, c) == 1.0) {
        s.push_back(i);
        break;
      }
  const auto est = gom::estimate_pi(u, {s});
  EXPECT_LT(gom::max_abs_diff(est.pi.matrix(), pi), 1e-12);
}

TEST(EstimatePi, SingularVertexBlock) {
  const DenseMatrix u = DenseMatrix::from_rows({{1, 1}, {2, 2}, {0, 1}});
  EXPECT_THROW(gom::estimate_pi(u, {{0, 1}}), gom::SingularityError);
}

TEST(TruncateTheta, Bounds) {
  const auto t = gom::truncate_theta(DenseMatrix::from_rows({{-0.004, 1.2, 0.5}}), 0.001);
  EXPECT_DOUBLE_EQ(t.theta(0, 0), 0.001);
  EXPECT_DOUBLE_EQ(t.theta(0, 1), 0.999);
  EXPECT_DOUBLE_EQ(t.theta(0, 2), 0.5);
  EXPECT_EQ(t.clamped_low, 1u);
  EXPECT_EQ(t.clamped_high, 1u);
}

TEST(Fit, NoiselessExactRecoveryAndTwoThetaFormulasAgree) {
  const auto d = noiseless(120, 30, 3, 3);
  gom::FitConfig cfg;
  cfg.k = 3;
  cfg.prune_enabled = false;
  const auto res = gom::fit(d.r0, cfg);
  const auto cmp = gom::align(res.pi_hat.matrix(), res.theta_hat.matrix(), d.pi, d.theta);
  EXPECT_LT(gom::max_abs_diff(oracle::permute_cols(res.pi_hat.matrix(), cmp.permutation), d.pi), 1e-8);
  EXPECT_LT(gom::max_abs_diff(oracle::permute_cols(res.theta_hat.matrix(), cmp.permutation), d.theta), 1e-8);

  // Vertex rows of Π̂ are unit vectors.
  for (std::size_t i : res.s_hat.indices) {
    const auto row = res.pi_hat.matrix().row(i);
    EXPECT_NEAR(*std::max_element(row.begin(), row.end()), 1.0, 1e-10);
  }
  const DenseMatrix from_vertices = gom::theta_from_vertex_rows(res.svd, res.s_hat);
  const auto all_subjects = gom::estimate_theta(res.svd, res.pi_hat, 0.0);
  EXPECT_LT(gom::max_abs_diff(from_vertices, all_subjects.raw), 1e-10);
}

TEST(Fit, ConstantColumnAllowed) {
  gom::SimConfig sc;
  sc.n = 200;
  sc.j = 40;
  sc.seed = 5;
  auto sim = gom::generate(sc);
  DenseMatrix r = sim.r.matrix();
  for (std::size_t i = 0; i < r.rows(); ++i) r(i, 0) = 1.0;
  EXPECT_NO_THROW(gom::fit(gom::ResponseMatrix(r), gom::FitConfig{}));
}

TEST(Fit, ErrorsCarryStageNames) {
  gom::FitConfig cfg;
  cfg.k = 2;
  cfg.prune_enabled = false;
  // Rank one data has no second direction to hunt a vertex in.
  const DenseMatrix r = DenseMatrix::from_rows({{1, 1, 1}, {1, 1, 1}, {0, 0, 0}, {1, 1, 1}});
  try {
    gom::fit(r, cfg);
    FAIL() << "expected a stage error";
  } catch (const gom::StageError& e) {
    EXPECT_EQ(e.category(), gom::Error::Category::kNumeric);
    EXPECT_EQ(e.stage(), "svd");
  }
  cfg.k = 5;
  EXPECT_THROW(gom::fit(r, cfg), gom::ConfigError);
  cfg.k = 2;
  cfg.epsilon = 0.5;
  EXPECT_THROW(gom::fit(r, cfg), gom::ConfigError);
  EXPECT_THROW(gom::fit(DenseMatrix::from_rows({{0.5, 2.0}}), cfg), gom::Error);
}

TEST(Fit, Deterministic) {
  gom::SimConfig sc;
  sc.seed = 9;
  const auto sim = gom::generate(sc);
  const auto a = gom::fit(sim.r, {});
  const auto b = gom::fit(sim.r, {});
  EXPECT_EQ(a.pi_hat.matrix(), b.pi_hat.matrix());
  EXPECT_EQ(a.theta_hat.matrix(), b.theta_hat.matrix());
  EXPECT_EQ(a.s_hat.indices, b.s_hat.indices);
}

TEST(Fit, DiagnosticsPopulated) {
  gom::SimConfig sc;
  sc.seed = 10;
  const auto sim = gom::generate(sc);
  const auto res = gom::fit(sim.r, {});
  ASSERT_TRUE(res.diagnostics.sigma_next.has_value());
  EXPECT_NEAR(res.diagnostics.singular_gap, res.svd.sigma[2] - *res.diagnostics.sigma_next, 1e-12);
  EXPECT_GE(res.diagnostics.vertex_block_condition, 1.0);
  EXPECT_GE(res.diagnostics.membership_gram_condition, 1.0);
  EXPECT_EQ(res.diagnostics.svd_backend, gom::SvdBackend::kGram);
  for (std::size_t i : res.s_hat.indices)
    EXPECT_FALSE(std::binary_search(res.prune_report.pruned.begin(), res.prune_report.pruned.end(), i));
}
