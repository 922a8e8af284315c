// Copyright 2026 The bmsdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "bmsdp/apps.h"
#include "bmsdp/factorization.h"
#include "bmsdp/oracle.h"
#include "bmsdp/problem_io.h"
#include "cli/commands.h"
#include "json.hpp"
#include "test_fixtures.h"

namespace bmsdp::cli {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
  nlohmann::json json() const { return nlohmann::json::parse(out); }
};

CliRun Invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "bmsdp");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  CliRun r;
  r.code = Main(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("bmsdp_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Write(const std::string& name, const std::string& text) {
    const fs::path path = dir_ / name;
    std::ofstream(path) << text;
    return path.string();
  }
  std::string WriteProblemFile(const std::string& name, const ConicSdpProblem& p) {
    return Write(name, WriteProblem(p));
  }

  fs::path dir_;
};

TEST_F(CliTest, SolveTrivialProblem) {
  const CliRun r = Invoke({"solve", WriteProblemFile("trivial.txt", testing::TrivialSdp()), "--oracle"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = r.json();
  EXPECT_EQ(j["final"]["verdict"], "GlobalOptimal");
  EXPECT_NEAR(j["final"]["objective"].get<double>(), 1.0, 1e-7);
  EXPECT_NEAR(j["final"]["oracle_objective"].get<double>(), 1.0, 1e-7);
  EXPECT_TRUE(j["final"]["time_ms"].is_null());
  EXPECT_EQ(j["trace"].size(), 1u);
}

TEST_F(CliTest, SolveMalformedFileNamesLine) {
  const CliRun r = Invoke({"solve", Write("bad.txt", "1\n1 0 1\n2\nE\n1\n1 1 x 1 1\n")});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("line 6"), std::string::npos) << r.err;
  EXPECT_TRUE(r.out.empty());
}

TEST_F(CliTest, SolveMissingFile) {
  EXPECT_EQ(Invoke({"solve", (dir_ / "missing.txt").string()}).code, kExitUsage);
}

TEST_F(CliTest, SolveRankOverrideShowsIncrement) {
  const CliRun r = Invoke({"solve", WriteProblemFile("tri.txt", testing::TriangleMaxCut()), "--rank", "1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = r.json();
  EXPECT_EQ(j["trace"][0]["rank"], nlohmann::json::array({1}));
  EXPECT_EQ(j["trace"][0]["action"], "rank-increment");
  EXPECT_GE(j["final"]["rank_increments"].get<int>(), 1);
}

TEST_F(CliTest, SolveInfeasible) {
  ProblemBuilder b({{2}, 1, 0});
  for (double rhs : {1.0, 2.0}) {
    const int k = b.AddConstraint(ConstraintKind::kEquality, rhs);
    b.AddEntry(k, 0, 0, 0, 1.0);
  }
  const CliRun r = Invoke({"solve", WriteProblemFile("inf.txt", b.Build())});
  EXPECT_EQ(r.code, kExitInfeasible);
  EXPECT_EQ(r.json()["final"]["verdict"], "Infeasible");
}

TEST_F(CliTest, SolveWritesOutFile) {
  const std::string out = (dir_ / "report.json").string();
  const CliRun r = Invoke({"solve", WriteProblemFile("trivial.txt", testing::TrivialSdp()), "--out", out});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(nlohmann::json::parse(ReadTextFile(out))["final"]["verdict"], "GlobalOptimal");
}

TEST_F(CliTest, CertifyPlantedAdversarialPoint) {
  const AdversarialFixture f = RandomAdversarialFixture(6, 2, 12, 3);
  const CliRun r = Invoke({"certify", WriteProblemFile("adv.txt", f.problem),
                        Write("adv.pt", WritePoint(f.planted))});
  EXPECT_EQ(r.code, kExitIndeterminate);
  const std::string verdict = r.json()["final"]["verdict"];
  EXPECT_TRUE(verdict == "Escapable" || verdict == "Indeterminate") << verdict;
}

TEST_F(CliTest, CertifyRefactoredOracleOptimum) {
  const ConicSdpProblem p = testing::TriangleMaxCut();
  const OracleSolution o = OracleSolve(p);
  const std::vector<int> ranks = {3};
  const FactorizedPoint point = Factor(o.x, p.structure, ranks);
  const CliRun r = Invoke({"certify", WriteProblemFile("p.txt", p), Write("p.pt", WritePoint(point))});
  EXPECT_EQ(r.code, kExitOk) << r.out;
  EXPECT_EQ(r.json()["certificate"]["verdict"], "GlobalOptimal");
  EXPECT_NEAR(r.json()["certificate"]["objective"].get<double>(), 0.0, 1e-7);
}

TEST_F(CliTest, CertifyZeroPoint) {
  ProblemBuilder b({{2}, 1, 0});
  b.SetCostBlock(0, Eigen::MatrixXd::Identity(2, 2));
  const int k = b.AddConstraint(ConstraintKind::kInequality, 0.0);
  b.AddEntry(k, 0, 0, 1, 1.0);
  FactorizedPoint zero;
  zero.factors = {Eigen::MatrixXd::Zero(2, 1)};
  zero.free = Eigen::VectorXd(0);
  const CliRun r = Invoke({"certify", WriteProblemFile("z.txt", b.Build()), Write("z.pt", WritePoint(zero))});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_TRUE(r.json()["certificate"]["kkt"].contains("stationarity"));
}

TEST_F(CliTest, CertifyShapeMismatch) {
  FactorizedPoint wrong;
  wrong.factors = {Eigen::MatrixXd::Zero(3, 1)};
  wrong.free = Eigen::VectorXd(0);
  const CliRun r = Invoke({"certify", WriteProblemFile("t.txt", testing::TrivialSdp()),
                        Write("w.pt", WritePoint(wrong))});
  EXPECT_EQ(r.code, kExitUsage);
}

TEST_F(CliTest, BoundEqualityOnly) {
  const CliRun r = Invoke({"bound", WriteProblemFile("eq.txt", GenerateRandom({{6}, 1, 0}, 4, "", 0))});
  ASSERT_EQ(r.code, kExitOk);
  const auto j = r.json();
  EXPECT_EQ(j["m_prime"], 4);
  EXPECT_EQ(j["p_per_block"], nlohmann::json::array({3}));
  EXPECT_EQ(j["method"], "ExactEnumeration");
}

TEST_F(CliTest, BoundIntegerQuadratic) {
  const IntegerQuadraticFixture f = BuildIntegerQuadratic(
      IntegerQuadraticCost(Eigen::MatrixXd::Identity(5, 5), Eigen::VectorXd::Zero(5), 0.0));
  const CliRun r = Invoke({"bound", WriteProblemFile("iqm.txt", f.problem)});
  ASSERT_EQ(r.code, kExitOk);
  const auto j = r.json();
  EXPECT_EQ(j["m_prime"], 6);
  EXPECT_EQ(j["p_per_block"], nlohmann::json::array({4}));
}

TEST_F(CliTest, BoundScalarBlockInequalities) {
  // Three inequalities on a 3x3 block written as equalities with 1x1 slack
  // blocks; the first two are active (rank 0), the third inactive (rank 1).
  ProblemBuilder b({{3, 1, 1, 1}, 1, 0});
  for (int i = 0; i < 3; ++i) {
    const int k = b.AddConstraint(ConstraintKind::kEquality, 1.0);
    b.AddEntry(k, 0, i, i, 1.0);
    b.AddEntry(k, i + 1, 0, 0, -1.0);
  }
  const CliRun r = Invoke({"bound", WriteProblemFile("s.txt", b.Build()), "--ranks", "0;0;1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.json()["m_prime"], 2);
  EXPECT_EQ(r.json()["method"], "ConicFormula");
  EXPECT_EQ(Invoke({"bound", (dir_ / "s.txt").string(), "--ranks", "0;;1"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"bound", (dir_ / "s.txt").string(), "--ranks", "0;x;1"}).code, kExitUsage);
}

TEST_F(CliTest, ExperimentSummaries) {
  const CliRun g = Invoke({"experiment", "genericity", "--n", "8", "--m", "6", "--trials", "4"});
  ASSERT_EQ(g.code, kExitOk) << g.err;
  EXPECT_EQ(g.json()["summary"]["certified_fraction"], 1.0);
  EXPECT_EQ(g.json()["summary"]["oracle_match_fraction"], 1.0);

  const CliRun a = Invoke({"experiment", "adversarial", "--n", "6", "--p", "2", "--m", "12",
                        "--trials", "4", "--no-oracle"});
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(a.json()["summary"]["rejection_fraction"], 1.0);

  const CliRun l = Invoke({"experiment", "licq", "--n", "6", "--m", "10", "--trials", "10"});
  ASSERT_EQ(l.code, kExitOk) << l.err;
  EXPECT_EQ(l.json()["summary"]["pass_fraction"], 1.0);

  EXPECT_EQ(Invoke({"experiment", "nonsense"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"experiment", "licq", "--trials", "-1"}).code, kExitUsage);
}

TEST_F(CliTest, RerunsAreByteIdentical) {
  const std::string path = WriteProblemFile("r.txt", GenerateRandom({{6}, 1, 0}, 5, "EEIII", 1));
  EXPECT_EQ(Invoke({"solve", path, "--seed", "3"}).out, Invoke({"solve", path, "--seed", "3"}).out);
  const std::vector<std::string> args = {"experiment", "genericity", "--n", "6", "--m", "4", "--trials", "6"};
  std::vector<std::string> threaded = args;
  threaded.insert(threaded.end(), {"--jobs", "3"});
  EXPECT_EQ(Invoke(args).out, Invoke(args).out);
  EXPECT_EQ(Invoke(args).out, Invoke(threaded).out);
}

TEST_F(CliTest, GenerateWritesReadableProblems) {
  for (const std::string kind :
       {"random", "sensing-psd", "sensing-symmetric", "adversarial", "iqm", "soc"}) {
    const CliRun r = Invoke({"generate", kind, "--n", "4", "--m", "3", "--seed", "2"});
    ASSERT_EQ(r.code, kExitOk) << kind << ": " << r.err;
    EXPECT_TRUE(Validate(ReadProblem(r.out)).empty()) << kind;
  }
  const std::string fixture = (dir_ / "adv.json").string();
  const CliRun adv = Invoke({"generate", "adversarial", "--n", "5", "--rank", "2", "--m", "6",
                          "--fixture", fixture});
  ASSERT_EQ(adv.code, kExitOk);
  const auto j = nlohmann::json::parse(ReadTextFile(fixture));
  const FactorizedPoint planted =
      ReadPoint(j["planted_point"].get<std::string>(), ReadProblem(adv.out).structure);
  EXPECT_EQ(planted.factors[0].cols(), 2);
  EXPECT_EQ(Invoke({"generate", "bogus"}).code, kExitUsage);
}

TEST_F(CliTest, UsageAndHelp) {
  EXPECT_EQ(Invoke({"--help"}).code, kExitOk);
  EXPECT_EQ(Invoke({}).code, kExitUsage);
  EXPECT_EQ(Invoke({"solve"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"solve", "x", "--seed", "abc"}).code, kExitUsage);
}

}  // namespace
}  // namespace bmsdp::cli
