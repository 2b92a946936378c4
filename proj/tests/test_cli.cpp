#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gom/cli.hpp"
#include "gom/errors.hpp"
#include "gom/io.hpp"
#include "gom/simulation.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using gom::DenseMatrix;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("gom_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "gom");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    out_.str("");
    err_.str("");
    return gom::run_cli(static_cast<int>(argv.size()), argv.data(), out_, err_);
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write_text(const std::string& name, const std::string& body) const {
    std::ofstream(dir_ / name) << body;
  }

  nlohmann::json read_json(const std::string& name) const {
    std::ifstream in(dir_ / name);
    return nlohmann::json::parse(in);
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

}  // namespace

TEST_F(CliTest, FitSmallBinaryFixture) {
  write_text("r.csv", "1,1,0,0\n1,0,0,0\n0,0,1,1\n0,0,1,0\n1,1,1,0\n0,1,1,1\n");
  ASSERT_EQ(run({"fit", "--input", path("r.csv"), "--K", "2", "--out", path("fit")}), 0) << err_.str();
  const DenseMatrix pi = gom::io::read_matrix_csv(path("fit/pi_hat.csv"));
  const DenseMatrix theta = gom::io::read_matrix_csv(path("fit/theta_hat.csv"));
  EXPECT_EQ(pi.rows(), 6u);
  EXPECT_EQ(pi.cols(), 2u);
  EXPECT_EQ(theta.rows(), 4u);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(pi(i, 0) + pi(i, 1), 1.0, 1e-12);
  for (double v : theta.data()) {
    EXPECT_GE(v, 0.001);
    EXPECT_LE(v, 0.999);
  }
  const auto j = read_json("fit/fit.json");
  EXPECT_EQ(j["K"], 2);
  EXPECT_EQ(j["s_hat"].size(), 2u);
  for (std::size_t s : j["s_hat"].get<std::vector<std::size_t>>()) {
    EXPECT_GE(s, 1u);
    EXPECT_LE(s, 6u);
  }
  EXPECT_EQ(j["prune"]["enabled"], true);
  EXPECT_EQ(j["manifest"]["input_sha256"].size(), 1u);
}

TEST_F(CliTest, SimulateIsByteReproducible) {
  ASSERT_EQ(run({"simulate", "--N", "60", "--seed", "5", "--out", path("a")}), 0);
  ASSERT_EQ(run({"simulate", "--N", "60", "--seed", "5", "--out", path("b")}), 0);
  for (const char* f : {"pi_true.csv", "theta_true.csv", "R0.csv", "R.csv"})
    EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
  const DenseMatrix r = gom::io::read_matrix_csv(path("a/R.csv"), {',', false, gom::io::ValueDomain::kBinary});
  EXPECT_EQ(r.rows(), 60u);
  EXPECT_EQ(r.cols(), 12u);
  EXPECT_EQ(read_json("a/manifest.json")["seed"], 5);
}

TEST_F(CliTest, SimulateCases) {
  ASSERT_EQ(run({"simulate", "--N", "40", "--J", "8", "--case", "3", "--out", path("c3")}), 0);
  const DenseMatrix t3 = gom::io::read_matrix_csv(path("c3/theta_true.csv"));
  for (std::size_t j = 0; j < 8; ++j) {
    EXPECT_EQ(t3(j, 0), 0.8);
    EXPECT_EQ(t3(j, 2), 0.2);
  }
  ASSERT_EQ(run({"simulate", "--N", "40", "--J", "8", "--case", "1", "--out", path("c1")}), 0);
  const DenseMatrix t1 = gom::io::read_matrix_csv(path("c1/theta_true.csv"));
  EXPECT_EQ(t1(4, 1), gom::theta_block(gom::ThetaBlock::kFullRank)(0, 1));
  EXPECT_EQ(run({"simulate", "--N", "40", "--J", "9", "--case", "1", "--out", path("bad")}), gom::kExitInput);
}

TEST_F(CliTest, EvaluateIdenticalAndPermuted) {
  std::mt19937_64 rng(3);
  const DenseMatrix pi = oracle::random_membership_with_pure(15, 3, rng);
  const DenseMatrix theta = oracle::random_matrix(6, 3, rng);
  gom::io::write_matrix_csv(path("pi.csv"), pi);
  gom::io::write_matrix_csv(path("theta.csv"), theta);
  gom::io::write_matrix_csv(path("pi_p.csv"), oracle::permute_cols(pi, {2, 0, 1}));
  gom::io::write_matrix_csv(path("theta_p.csv"), oracle::permute_cols(theta, {2, 0, 1}));

  ASSERT_EQ(run({"evaluate", "--pi-hat", path("pi.csv"), "--theta-hat", path("theta.csv"), "--pi-true",
                 path("pi.csv"), "--theta-true", path("theta.csv"), "--out", path("e1")}),
            0);
  auto j = read_json("e1/eval.json");
  EXPECT_EQ(j["mae_pi"], 0.0);
  EXPECT_EQ(j["permutation"], (std::vector<int>{1, 2, 3}));

  ASSERT_EQ(run({"evaluate", "--pi-hat", path("pi_p.csv"), "--theta-hat", path("theta_p.csv"), "--pi-true",
                 path("pi.csv"), "--theta-true", path("theta.csv"), "--out", path("e2")}),
            0);
  j = read_json("e2/eval.json");
  EXPECT_EQ(j["mae_theta"], 0.0);
  EXPECT_EQ(j["permutation"], (std::vector<int>{2, 3, 1}));
}

TEST_F(CliTest, DiagnoseExamples) {
  gom::io::write_matrix_csv(path("a.csv"), gom::theta_block(gom::ThetaBlock::kFullRank));
  gom::io::write_matrix_csv(path("c.csv"), gom::theta_block(gom::ThetaBlock::kRankTwoAffine));
  ASSERT_EQ(run({"diagnose", "--theta", path("a.csv"), "--K", "3", "--out", path("da")}), 0);
  EXPECT_EQ(read_json("da/verdict.json")["verdict"], "FullRank_A");
  ASSERT_EQ(run({"diagnose", "--theta", path("c.csv"), "--K", "3", "--out", path("dc")}), 0);
  EXPECT_EQ(read_json("dc/verdict.json")["verdict"], "NotIdentifiable_C");
}

TEST_F(CliTest, DiagnoseConstructsAlternative) {
  const auto mixed = gom::generate(gom::case_preset(2, 50, 12, 2));
  gom::io::write_matrix_csv(path("pi.csv"), mixed.pi_true.matrix());
  gom::io::write_matrix_csv(path("theta.csv"), mixed.theta_true.matrix());
  ASSERT_EQ(run({"diagnose", "--theta", path("theta.csv"), "--pi", path("pi.csv"), "--K", "3",
                 "--construct-alternative", "0.05", "--out", path("alt")}),
            0)
      << err_.str();
  const DenseMatrix pa = gom::io::read_matrix_csv(path("alt/pi_alt.csv"));
  const DenseMatrix ta = gom::io::read_matrix_csv(path("alt/theta_alt.csv"));
  const auto lhs = gom::reconstruct(gom::MembershipMatrix(pa, 1e-9), gom::ItemParamMatrix(ta));
  EXPECT_LT(gom::max_abs_diff(lhs, mixed.r0), 1e-10);

  const auto pure = gom::generate(gom::case_preset(1, 50, 12, 2));
  gom::io::write_matrix_csv(path("pi1.csv"), pure.pi_true.matrix());
  gom::io::write_matrix_csv(path("theta1.csv"), pure.theta_true.matrix());
  EXPECT_EQ(run({"diagnose", "--theta", path("theta1.csv"), "--pi", path("pi1.csv"), "--K", "3",
                 "--construct-alternative", "0.05", "--out", path("alt1")}),
            gom::kExitPrecondition);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run({"fit", "--K", "2"}), gom::kExitInput);  // missing --input
  EXPECT_EQ(run({"fit", "--input", path("nope.csv"), "--K", "2", "--out", path("o")}), gom::kExitInput);
  write_text("half.csv", "0.5,1\n0,1\n");
  EXPECT_EQ(run({"fit", "--input", path("half.csv"), "--K", "1", "--out", path("o")}), gom::kExitInput);
  EXPECT_NE(err_.str().find("line 1"), std::string::npos) << err_.str();

  // Rank one data cannot give two distinct vertices.
  write_text("flat.csv", "1,1,1\n1,1,1\n0,0,0\n1,1,1\n");
  EXPECT_EQ(run({"fit", "--input", path("flat.csv"), "--K", "2", "--no-prune", "--out", path("o")}),
            gom::kExitNumeric);
}

TEST_F(CliTest, KSweepReportsBest) {
  ASSERT_EQ(run({"simulate", "--N", "200", "--seed", "3", "--out", path("s")}), 0);
  ASSERT_EQ(run({"ksweep", "--input", path("s/R.csv"), "--K", "2,3", "--out", path("k")}), 0);
  const auto j = read_json("k/ksweep.json");
  EXPECT_TRUE(j.contains("best_K"));
}

TEST(CsvIo, RoundTripIsExact) {
  const fs::path p = fs::temp_directory_path() / "gom_roundtrip.csv";
  std::mt19937_64 rng(9);
  DenseMatrix m = oracle::random_matrix(7, 5, rng, -1e5, 1e5);
  m(0, 0) = 1e-300;
  m(1, 1) = 0.1;
  gom::io::write_matrix_csv(p, m);
  EXPECT_EQ(gom::io::read_matrix_csv(p), m);
  gom::io::write_matrix_csv(p, m, ';');
  EXPECT_EQ(gom::io::read_matrix_csv(p, {';', false, gom::io::ValueDomain::kFloat}), m);
  fs::remove(p);
}

TEST(CsvIo, MalformedInputsNameTheLocation) {
  const fs::path p = fs::temp_directory_path() / "gom_bad.csv";
  auto expect_error = [&](const std::string& body, gom::io::CsvOptions opts, const std::string& where) {
    std::ofstream(p) << body;
    try {
      gom::io::read_matrix_csv(p, opts);
      ADD_FAILURE() << "no error for " << body;
    } catch (const gom::ParseError& e) {
      EXPECT_NE(std::string(e.what()).find(where), std::string::npos) << e.what();
    }
  };
  expect_error("1,2\n3\n", {}, "line 2");
  expect_error("1,x\n", {}, "field 2");
  expect_error("1,nan\n", {}, "field 2");
  expect_error("0,1\n1,2\n", {',', false, gom::io::ValueDomain::kBinary}, "line 2");
  expect_error("0.5,1.5\n", {',', false, gom::io::ValueDomain::kUnitInterval}, "field 2");
  expect_error("", {}, "");

  std::ofstream(p) << "a,b\n1,0\n";
  const DenseMatrix m = gom::io::read_matrix_csv(p, {',', true, gom::io::ValueDomain::kBinary});
  EXPECT_EQ(m, DenseMatrix::from_rows({{1, 0}}));
  fs::remove(p);
}
