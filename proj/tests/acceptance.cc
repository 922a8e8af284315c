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

// Acceptance gate: one PASS/FAIL line per criterion. Tolerances and time
// limits are fixed here; the exit status is non-zero if any line fails.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Eigenvalues>

#include "bmsdp/apps.h"
#include "bmsdp/certification.h"
#include "bmsdp/error.h"
#include "bmsdp/factorization.h"
#include "bmsdp/linalg.h"
#include "bmsdp/local_solver.h"
#include "bmsdp/oracle.h"
#include "bmsdp/problem_io.h"
#include "bmsdp/staircase.h"
#include "cli/commands.h"
#include "test_fixtures.h"

namespace bmsdp {
namespace {

using Clock = std::chrono::steady_clock;

// Runs fn(0..count-1) on all hardware threads; results keep index order.
template <typename T>
std::vector<T> ParallelMap(int count, const std::function<T(int)>& fn) {
  std::vector<T> out(count);
  std::atomic<int> next{0};
  const int workers =
      std::max(1, std::min<int>(count, static_cast<int>(std::thread::hardware_concurrency())));
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) out[i] = fn(i);
    });
  }
  for (std::thread& t : pool) t.join();
  return out;
}

struct Outcome {
  bool passed = false;
  std::string detail;
};

class Gate {
 public:
  void Run(int id, const std::string& name, double limit_seconds,
           const std::function<Outcome()>& body) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    const bool in_time = seconds <= limit_seconds;
    const bool ok = o.passed && in_time;
    failures_ += ok ? 0 : 1;
    std::printf("[%s] %2d %-22s %s; %.1f s (limit %.0f s)\n", ok ? "PASS" : "FAIL", id,
                name.c_str(), o.detail.c_str(), seconds, limit_seconds);
    std::fflush(stdout);
  }
  int failures() const { return failures_; }

 private:
  int failures_ = 0;
};

std::string Fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c);
  return buf;
}

double Rel(double a, double b) { return std::abs(a - b) / (1.0 + std::abs(b)); }

// 1. Derivative correctness.
Outcome Derivatives() {
  constexpr double kGradTol = 1e-6;
  constexpr double kHessTol = 1e-5;
  const std::vector<BlockStructure> shapes = {
      {{15}, 1, 0}, {{6, 4}, 2, 0}, {{5, 3}, 1, 2}, {{4, 2, 1}, 2, 1}, {{8}, 1, 3}};
  const std::vector<std::string> kinds = {"EEEEEEEEEEEE", "EEEEEIIIIIII", "EEIEIEIEIEIE",
                                          "IIIIIIIIIIII", "EEEEEEIIIIII"};
  double worst_g = 0.0;
  double worst_h = 0.0;
  for (int t = 0; t < 50; ++t) {
    const BlockStructure& s = shapes[t % shapes.size()];
    const int m = 4 + t % 9;
    const std::string k = kinds[(t / 5) % kinds.size()].substr(0, m);
    const ConicSdpProblem p = GenerateRandom(s, m, k, 100 + t);
    std::vector<int> ranks;
    for (int j = 0; j < s.factorized_count; ++j) ranks.push_back(1 + (t + j) % s.psd_sizes[j]);
    SolverConfig config;
    config.seed = 7 * t;
    const FactorVariables v = RandomStart(p, ranks, config);
    config.seed = 7 * t + 1;
    const FactorVariables u = RandomStart(p, ranks, config);
    std::mt19937_64 rng(t);
    const Eigen::VectorXd lambda = testing::RandomMatrix(rng, m, 1).col(0);
    const double penalty = 1.0 + t % 7;
    worst_g = std::max(worst_g, testing::GradientFdError(p, v, lambda, penalty));
    worst_h = std::max(worst_h, testing::HessianFdError(p, v, lambda, penalty, u));
  }
  return {worst_g <= kGradTol && worst_h <= kHessTol,
          Fmt("50 instances, max grad err %.1e (tol 1e-6), max HVP err %.1e (tol 1e-5)", worst_g,
              worst_h)};
}

// 2. Staircase against the interior-point oracle, 2x2 also against brute force.
Outcome OracleEquivalence() {
  constexpr double kTol = 1e-5;
  struct Row {
    double ipm_err = 0.0;
    double brute_err = 0.0;
    bool certified = false;
  };
  const std::vector<Row> rows = ParallelMap<Row>(30, [](int t) {
    ConicSdpProblem p;
    const std::uint64_t seed = 200 + t;
    if (t < 10) {
      const std::vector<std::string> k = {"E", "I", "EI", "II", "EII"};
      const std::string kinds = k[t % k.size()];
      p = GenerateRandom({{2}, 1, 0}, static_cast<int>(kinds.size()), kinds, seed);
    } else if (t < 20) {
      p = GenerateRandom({{4 + t % 4}, 1, 0}, 5, "EEIII", seed);
    } else {
      p = GenerateRandom({{5, 3}, 1, 1}, 6, "EEIEIE", seed);
    }
    StaircaseConfig config;
    config.solver.seed = seed;
    const SolveReport r = StaircaseSolve(p, config);
    const double ipm = OracleSolve(p).objective;
    Row row;
    row.ipm_err = Rel(r.objective, ipm);
    row.certified = r.verdict == Verdict::kGlobalOptimal;
    if (t < 10) row.brute_err = Rel(r.objective, BruteForce2x2(p));
    return row;
  });
  double worst_ipm = 0.0;
  double worst_brute = 0.0;
  int certified = 0;
  for (const Row& r : rows) {
    worst_ipm = std::max(worst_ipm, r.ipm_err);
    worst_brute = std::max(worst_brute, r.brute_err);
    certified += r.certified;
  }
  return {worst_ipm <= kTol && worst_brute <= kTol,
          Fmt("30 instances, max rel err vs IPM %.1e, vs brute force (10 2x2) %.1e; %g certified",
              worst_ipm, worst_brute, certified)};
}

// 3. Genericity for equality SDPs at the initial rank.
Outcome Genericity() {
  constexpr int kTrials = 100;
  constexpr int kRequired = 95;
  constexpr double kGapTol = 1e-6;
  constexpr double kSlackTol = 1e-7;
  const std::vector<int> clean = ParallelMap<int>(kTrials, [](int t) {
    const ConicSdpProblem p = GenerateRandom({{12}, 1, 0}, 8, "", 300 + t);
    StaircaseConfig config;
    config.solver.seed = 300 + t;
    const SolveReport r = StaircaseSolve(p, config);
    if (r.initial_bound.ranks != std::vector<int>{4}) return 0;
    const Eigen::MatrixXd s = SlackMatrix(p, r.multipliers.lambda).blocks[0].ToDense();
    const Eigen::VectorXd eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(s).eigenvalues();
    const double s_norm = eig.cwiseAbs().maxCoeff();
    const bool ok = r.verdict == Verdict::kGlobalOptimal && r.trace.size() == 1 &&
                    r.point.factors[0].cols() == 4 &&
                    std::abs(r.gap_vs_dual) <= kGapTol * (1.0 + std::abs(r.objective)) &&
                    eig(0) >= -kSlackTol * s_norm;
    return ok ? 1 : 0;
  });
  const int count = static_cast<int>(std::count(clean.begin(), clean.end(), 1));
  return {count >= kRequired,
          Fmt("n=12 m=8 p=4: %g/100 GlobalOptimal at the initial rank (need 95)", count)};
}

// 4. Matrix sensing with identity cost.
Outcome SensingPsd() {
  constexpr double kTol = 1e-5;
  struct Row {
    bool certified = false;
    double err = 0.0;
  };
  const std::vector<Row> rows = ParallelMap<Row>(50, [](int t) {
    const SensingFixture f = BuildSensingPsd(8, 1 + t % 2, 10, 400 + t);
    StaircaseConfig config;
    config.solver.seed = 400 + t;
    const SolveReport r = StaircaseSolve(f.problem, config);
    return Row{r.verdict == Verdict::kGlobalOptimal,
               std::abs(r.objective - OracleSolve(f.problem).objective)};
  });
  int certified = 0;
  double worst = 0.0;
  for (const Row& r : rows) {
    certified += r.certified;
    worst = std::max(worst, r.err);
  }
  return {certified == 50 && worst <= kTol,
          Fmt("n=8 m=10: %g/50 GlobalOptimal, max |obj - oracle| %.1e (tol 1e-5)", certified,
              worst)};
}

// 5. Planted spurious points are never certified and the staircase escapes them.
Outcome Adversarial() {
  constexpr double kStationarityTol = 1e-10;
  constexpr double kSpuriousGap = 1e-4;
  struct Row {
    double stationarity = 0.0;
    bool certified = false;
    bool spurious = false;
    bool beaten = false;
  };
  const std::vector<Row> rows = ParallelMap<Row>(50, [](int t) {
    const AdversarialFixture f = RandomAdversarialFixture(6, 2, 12, 500 + t);
    Multipliers planted;
    planted.lambda = f.planted_lambda;
    Row row;
    row.stationarity = ComputeKktResiduals(f.problem, f.planted, planted).stationarity;
    row.certified = Certify(f.problem, f.planted, EstimateMultipliers(f.problem, f.planted))
                        .verdict == Verdict::kGlobalOptimal;
    row.spurious = f.planted_objective - OracleSolve(f.problem).objective > kSpuriousGap;
    StaircaseConfig config;
    config.solver.seed = 1000003 + t;
    row.beaten = StaircaseSolve(f.problem, config).objective < f.planted_objective - 1e-6;
    return row;
  });
  double worst = 0.0;
  int certified = 0;
  int spurious = 0;
  int escaped = 0;
  for (const Row& r : rows) {
    worst = std::max(worst, r.stationarity);
    certified += r.certified;
    spurious += r.spurious;
    escaped += r.spurious && r.beaten;
  }
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "n=6 p=2: max planted stationarity %.1e, %d/50 certified, staircase beat %d/%d "
                "with oracle gap > 1e-4",
                worst, certified, escaped, spurious);
  return {worst <= kStationarityTol && certified == 0 && escaped == spurious, buf};
}

// 6. Two-block symmetric sensing and the nuclear norm.
Outcome SymmetricSensing() {
  constexpr double kTol = 1e-5;
  struct Row {
    bool certified = false;
    bool rank_five = false;
    double err = 0.0;
  };
  const std::vector<Row> rows = ParallelMap<Row>(20, [](int t) {
    std::mt19937_64 rng(600 + t);
    const Eigen::MatrixXd g = testing::RandomMatrix(rng, 6, 2);
    const Eigen::MatrixXd planted =
        g.col(0) * g.col(0).transpose() - g.col(1) * g.col(1).transpose();
    const SensingFixture f = BuildSensingSymmetric(6, 10, planted, 600 + t);
    StaircaseConfig config;
    config.solver.seed = 600 + t;
    const SolveReport r = StaircaseSolve(f.problem, config);
    const Eigen::VectorXd eig =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(SymmetricEstimate(Lift(r.point)))
            .eigenvalues();
    return Row{r.verdict == Verdict::kGlobalOptimal,
               r.initial_bound.ranks == std::vector<int>{5, 5},
               std::abs(eig.cwiseAbs().sum() - OracleSolve(f.problem).objective)};
  });
  int certified = 0;
  int rank_five = 0;
  double worst = 0.0;
  for (const Row& r : rows) {
    certified += r.certified;
    rank_five += r.rank_five;
    worst = std::max(worst, r.err);
  }
  return {certified == 20 && rank_five == 20 && worst <= kTol,
          Fmt("n=6 m=10 p=5: %g/20 GlobalOptimal, max |nuclear norm - oracle| %.1e (tol 1e-5)",
              certified, worst)};
}

// 7. Second-order cone embedding.
Outcome SocEmbedding() {
  constexpr double kValueTol = 1e-6;
  constexpr double kEigTol = 1e-8;
  double worst = 0.0;
  int certified = 0;
  for (int t = 0; t < 10; ++t) {
    const SocInstance inst = RandomSocInstance(3 + t % 3, 3, 2 + t % 3, 700 + t);
    const ConicSdpProblem arrow = BuildSocEmbedding(inst);
    const double reference = OracleSolve(BuildSocRotatedEmbedding(inst)).objective;
    StaircaseConfig config;
    config.solver.seed = 700 + t;
    const SolveReport r = StaircaseSolve(arrow, config);
    certified += r.verdict == Verdict::kGlobalOptimal;
    worst = std::max({worst, Rel(r.objective, reference),
                      Rel(OracleSolve(arrow).objective, reference)});
  }
  std::mt19937_64 rng(77);
  int boundary_ok = 0;
  for (int t = 0; t < 100; ++t) {
    const int dim = 2 + t % 5;
    Eigen::VectorXd x = testing::RandomMatrix(rng, dim, 1).col(0);
    x(0) = x.tail(dim - 1).norm();
    const Eigen::VectorXd eig =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(ArrowMatrix(x)).eigenvalues();
    const double tol = kEigTol * (1.0 + x(0));
    const int rank = static_cast<int>((eig.array() > tol).count());
    boundary_ok += std::abs(eig(0)) <= tol && rank == dim - 1;
  }
  return {worst <= kValueTol && certified == 10 && boundary_ok == 100,
          Fmt("10 fixtures in Q3, max rel err vs rotated-form oracle %.1e, %g certified; boundary rank "
              "n-1 on %g/100 points",
              worst, certified, boundary_ok)};
}

// 8. LICQ at feasible points of generic instances.
Outcome Licq() {
  int passed = 0;
  for (int t = 0; t < 100; ++t) {
    const int n = 6 + t % 3;
    const int m = 6 + t % 5;
    const int p = MinimalRank(m, n);
    std::mt19937_64 rng(800 + t);
    const Eigen::MatrixXd y = testing::RandomMatrix(rng, n, p);
    const Eigen::MatrixXd x = y * y.transpose();
    ProblemBuilder b({{n}, 1, 0});
    b.SetCostBlock(0, Eigen::MatrixXd::Identity(n, n));
    bool nonzero_b = true;
    for (int i = 0; i < m; ++i) {
      const Eigen::MatrixXd a = RandomMeasurement(n, 800 + t, i);
      const bool inequality = i % 3 == 2;
      const double rhs = a.cwiseProduct(x).sum() - (inequality && i % 2 == 0 ? 0.5 : 0.0);
      nonzero_b = nonzero_b && rhs != 0.0;
      const int k = b.AddConstraint(
          inequality ? ConstraintKind::kInequality : ConstraintKind::kEquality, rhs);
      b.SetConstraintBlock(k, 0, a);
    }
    FactorizedPoint point;
    point.factors = {y};
    passed += nonzero_b && LicqCheck(b.Build(), point).holds;
  }
  ProblemBuilder dup({{4}, 1, 0});
  const Eigen::MatrixXd a = RandomMeasurement(4, 1, 0);
  for (int copy = 0; copy < 2; ++copy) {
    dup.SetConstraintBlock(dup.AddConstraint(ConstraintKind::kEquality, 1.0), 0, a);
  }
  std::mt19937_64 rng(1);
  Eigen::MatrixXd y = testing::RandomMatrix(rng, 4, 2);
  y *= 1.0 / std::sqrt(a.cwiseProduct(y * y.transpose()).sum());
  FactorizedPoint point;
  point.factors = {y};
  const bool duplicate_fails = !LicqCheck(dup.Build(), point).holds;
  return {passed == 100 && duplicate_fails,
          Fmt("%g/100 generic trials hold; duplicated constraint rejected: ", passed) +
              (duplicate_fails ? "yes" : "no")};
}

// 9. Triangular numbers and m' against exhaustive subset search.
Outcome RankBounds() {
  const long long expected[] = {0, 1, 3, 6, 10, 15, 21, 28, 36, 45, 55};
  bool triangular = true;
  for (int k = 0; k <= 10; ++k) triangular = triangular && Triangular(k) == expected[k];
  const std::vector<std::string> kinds = {"III", "EIII", "IIIII", "EEIIII", "EIIIIII", "IIIIIIII",
                                          "EIIIIIII", "EEIIIIII"};
  MPrimeOptions exhaustive;
  exhaustive.exhaustive = true;
  const std::vector<int> match = ParallelMap<int>(16, [&](int t) {
    const std::string& k = kinds[t % kinds.size()];
    const ConicSdpProblem p =
        GenerateRandom({{3 + t % 3}, 1, 0}, static_cast<int>(k.size()), k, 900 + t);
    const RankBoundReport pruned = MPrimeInequality(p);
    return pruned.method == RankBoundMethod::kExactEnumeration &&
                   pruned.m_prime == MPrimeInequality(p, exhaustive).m_prime
               ? 1
               : 0;
  });
  const int matched = static_cast<int>(std::count(match.begin(), match.end(), 1));
  return {triangular && matched == 16,
          std::string("tau(0..10) exact: ") + (triangular ? "yes" : "no") +
              Fmt("; m' enumeration = exhaustive on %g/16 instances (m <= 8)", matched)};
}

// 10. Byte-identical reruns through the command line entry point.
Outcome Determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "bmsdp_acceptance";
  fs::create_directories(dir);
  const fs::path file = dir / "problem.txt";
  std::ofstream(file) << WriteProblem(GenerateRandom({{5, 3}, 1, 1}, 6, "EEIEIE", 10));
  auto run = [](std::vector<std::string> args) {
    args.insert(args.begin(), "bmsdp");
    std::vector<const char*> argv;
    for (const std::string& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    cli::Main(static_cast<int>(argv.size()), argv.data(), out, err);
    return out.str();
  };
  const std::vector<std::string> solve = {"solve", file.string(), "--seed", "4", "--oracle"};
  const std::vector<std::string> experiment = {"experiment", "genericity", "--n", "8", "--m",
                                               "6", "--trials", "8", "--seed", "5"};
  std::vector<std::string> threaded = experiment;
  threaded.insert(threaded.end(), {"--jobs", "4"});
  const std::string s1 = run(solve);
  const bool solve_same = !s1.empty() && s1 == run(solve);
  const std::string e1 = run(experiment);
  const bool experiment_same = !e1.empty() && e1 == run(experiment) && e1 == run(threaded);
  fs::remove_all(dir);
  return {solve_same && experiment_same,
          std::string("solve rerun identical: ") + (solve_same ? "yes" : "no") +
              "; experiment rerun (1 and 4 jobs) identical: " + (experiment_same ? "yes" : "no")};
}

}  // namespace
}  // namespace bmsdp

int main() {
  bmsdp::Gate gate;
  gate.Run(1, "derivatives", 30, bmsdp::Derivatives);
  gate.Run(2, "oracle-equivalence", 120, bmsdp::OracleEquivalence);
  gate.Run(3, "genericity", 300, bmsdp::Genericity);
  gate.Run(4, "sensing-psd", 180, bmsdp::SensingPsd);
  gate.Run(5, "adversarial", 120, bmsdp::Adversarial);
  gate.Run(6, "symmetric-sensing", 300, bmsdp::SymmetricSensing);
  gate.Run(7, "soc-embedding", 300, bmsdp::SocEmbedding);
  gate.Run(8, "licq", 60, bmsdp::Licq);
  gate.Run(9, "rank-bounds", 300, bmsdp::RankBounds);
  gate.Run(10, "determinism", 300, bmsdp::Determinism);
  std::printf("%d of 10 criteria failed\n", gate.failures());
  return gate.failures() == 0 ? 0 : 1;
}
