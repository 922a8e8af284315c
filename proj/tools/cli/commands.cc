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

#include "cli/commands.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "bmsdp/apps.h"
#include "bmsdp/certification.h"
#include "bmsdp/error.h"
#include "bmsdp/factorization.h"
#include "bmsdp/oracle.h"
#include "bmsdp/problem_io.h"
#include "bmsdp/staircase.h"

namespace bmsdp::cli {
namespace {

constexpr double kOracleMatchTol = 1e-5;

Json VectorJson(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json MatrixJson(const Eigen::MatrixXd& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

Json KktJson(const KktResiduals& kkt) {
  Json out;
  out["stationarity"] = kkt.stationarity;
  out["feasibility"] = kkt.feasibility;
  out["complementarity"] = kkt.complementarity;
  out["sign"] = kkt.sign;
  out["free"] = kkt.free;
  return out;
}

Json BoundJson(const RankBoundReport& bound) {
  Json out;
  out["m_prime"] = bound.m_prime;
  out["p_per_block"] = bound.ranks;
  out["method"] = RankBoundMethodName(bound.method);
  return out;
}

const char* SourceName(MultiplierSource source) {
  return source == MultiplierSource::kFromSolver ? "FromSolver" : "LeastSquares";
}

Json StageJson(const StageRecord& stage) {
  Json out;
  out["rank"] = stage.ranks;
  out["seed"] = stage.seed;
  out["objective"] = stage.objective;
  out["kkt"] = KktJson(stage.kkt);
  out["slack_min_eig"] = stage.slack_min_eig;
  out["duality_gap"] = stage.duality_gap;
  out["verdict"] = VerdictName(stage.verdict);
  out["multipliers"] = SourceName(stage.multiplier_source);
  out["outer_iterations"] = stage.outer_iterations;
  out["action"] = stage.action;
  return out;
}

Json CertifyConfigJson(const CertifyOptions& options) {
  Json out;
  out["cert_tol"] = options.cert_tol;
  out["kkt_tol"] = options.kkt_tol;
  out["active_tol"] = options.active_tol;
  return out;
}

CommandResult Usage(const std::string& message) {
  CommandResult result;
  result.exit_code = kExitUsage;
  result.diagnostics = message;
  return result;
}

CommandResult Finish(const Json& report, int exit_code, std::string diagnostics = {}) {
  CommandResult result;
  result.exit_code = exit_code;
  result.output = DumpJson(report);
  result.diagnostics = std::move(diagnostics);
  return result;
}

std::string ValidationMessage(const ConicSdpProblem& problem) {
  std::string message;
  for (const Diagnostic& d : Validate(problem)) {
    message += d.invariant + " (" + std::to_string(d.index) + "): " + d.message + "\n";
  }
  return message;
}

std::vector<std::string> Split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : text) {
    if (c == sep) {
      parts.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  parts.push_back(current);
  return parts;
}

int ParseInt(const std::string& token) {
  std::size_t used = 0;
  int value = 0;
  try {
    value = std::stoi(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != token.size()) {
    throw Error(ErrorCode::kInvalidArgument, "not an integer: '" + token + "'");
  }
  return value;
}

std::vector<std::vector<int>> ParseTailRanks(const std::string& text) {
  std::vector<std::vector<int>> out;
  for (const std::string& block : Split(text, ';')) {
    std::vector<int> ranks;
    for (const std::string& token : Split(block, ',')) {
      if (!token.empty()) ranks.push_back(ParseInt(token));
    }
    out.push_back(std::move(ranks));
  }
  return out;
}

// Runs fn(i) for i in [0, count) on up to `jobs` threads; results keep
// index order.
std::vector<Json> RunTrials(int count, int jobs, const std::function<Json(int)>& fn) {
  std::vector<Json> results(count);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) results[i] = fn(i);
  };
  const int threads = std::clamp(jobs, 1, std::max(1, count));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  return results;
}

double Fraction(const std::vector<Json>& trials, const char* key) {
  if (trials.empty()) return 0.0;
  int hits = 0;
  for (const Json& t : trials) hits += t.value(key, false) ? 1 : 0;
  return static_cast<double>(hits) / trials.size();
}

std::mt19937_64 TrialStream(std::uint64_t seed, std::uint64_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag)};
  return std::mt19937_64(seq);
}

Eigen::MatrixXd GaussianMatrix(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd g(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) g(r, c) = normal(rng);
  }
  return g;
}

Json GenericityTrial(const ExperimentFlags& flags, std::uint64_t seed) {
  const ConicSdpProblem problem = GenerateRandom({{flags.n}, 1, 0}, flags.m, "", seed);
  StaircaseConfig config;
  config.solver.seed = seed;
  config.initial_rank = flags.p;
  Json out;
  out["seed"] = seed;
  try {
    const SolveReport report = StaircaseSolve(problem, config);
    out["verdict"] = VerdictName(report.verdict);
    out["objective"] = report.objective;
    out["initial_rank"] = report.trace.front().ranks;
    out["rank_increments"] = report.rank_increments;
    out["stages"] = report.trace.size();
    out["gap_vs_dual"] = report.gap_vs_dual;
    out["slack_min_eig"] = report.certificate.slack_min_eig;
    out["certified"] = report.verdict == Verdict::kGlobalOptimal;
    out["certified_without_increment"] =
        report.verdict == Verdict::kGlobalOptimal && report.rank_increments == 0;
    if (flags.oracle) {
      const OracleSolution oracle = OracleSolve(problem);
      out["oracle_objective"] = oracle.objective;
      out["matches_oracle"] = std::abs(report.objective - oracle.objective) <=
                              kOracleMatchTol * (1.0 + std::abs(oracle.objective));
    }
  } catch (const Error& e) {
    out["verdict"] = "Error";
    out["error"] = e.what();
  }
  return out;
}

Json AdversarialTrial(const ExperimentFlags& flags, std::uint64_t seed) {
  const int p = flags.p.value_or(2);
  const AdversarialFixture fixture = RandomAdversarialFixture(flags.n, p, flags.m, seed);
  const Multipliers mult = EstimateMultipliers(fixture.problem, fixture.planted);
  const Certificate cert = Certify(fixture.problem, fixture.planted, mult);
  Json out;
  out["seed"] = seed;
  out["planted_objective"] = fixture.planted_objective;
  out["planted_stationarity"] = cert.kkt.stationarity;
  out["planted_verdict"] = VerdictName(cert.verdict);
  out["rejected"] = cert.verdict != Verdict::kGlobalOptimal;
  if (flags.oracle) {
    const OracleSolution oracle = OracleSolve(fixture.problem);
    const double gap = fixture.planted_objective - oracle.objective;
    out["oracle_objective"] = oracle.objective;
    out["oracle_gap"] = gap;
    out["spurious"] = gap > 1e-4;
  }
  StaircaseConfig config;
  config.solver.seed = seed + 1000003;
  const SolveReport report = StaircaseSolve(fixture.problem, config);
  out["staircase_objective"] = report.objective;
  out["staircase_verdict"] = VerdictName(report.verdict);
  out["beats_planted"] = report.objective < fixture.planted_objective - 1e-6;
  return out;
}

Json LicqTrial(const ExperimentFlags& flags, std::uint64_t seed) {
  const int p = flags.p.value_or(MinimalRank(flags.m, flags.n));
  std::mt19937_64 rng = TrialStream(seed, 0x11c);
  const Eigen::MatrixXd y = GaussianMatrix(rng, flags.n, p);
  const Eigen::MatrixXd x = y * y.transpose();
  ProblemBuilder builder({{flags.n}, 1, 0}, "licq-trial");
  builder.SetCostBlock(0, Eigen::MatrixXd::Identity(flags.n, flags.n));
  bool nonzero_b = true;
  for (int i = 0; i < flags.m; ++i) {
    const Eigen::MatrixXd a = RandomMeasurement(flags.n, seed, i);
    const double b = a.cwiseProduct(x).sum();
    nonzero_b = nonzero_b && b != 0.0;
    const int k = builder.AddConstraint(ConstraintKind::kEquality, b);
    builder.SetConstraintBlock(k, 0, a);
  }
  const ConicSdpProblem problem = builder.Build();
  FactorizedPoint point;
  point.factors = {y};
  const LicqResult licq = LicqCheck(problem, point);
  Json out;
  out["seed"] = seed;
  out["rank"] = p;
  out["nonzero_b"] = nonzero_b;
  out["jacobian_rank"] = licq.jacobian_rank;
  out["active_count"] = licq.active_count;
  out["holds"] = licq.holds;
  return out;
}

Eigen::MatrixXd PlantedSymmetric(int n, int rank, std::uint64_t seed) {
  std::mt19937_64 rng = TrialStream(seed, 0x5e5);
  const Eigen::MatrixXd g = GaussianMatrix(rng, n, rank);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < rank; ++k) {
    x += (k % 2 == 0 ? 1.0 : -1.0) * g.col(k) * g.col(k).transpose();
  }
  return x;
}

}  // namespace

ConicSdpProblem LoadProblem(const std::string& path) {
  return ReadProblem(ReadTextFile(path));
}

Json ProblemSummary(const ConicSdpProblem& problem) {
  Json out;
  out["name"] = problem.name;
  out["n_blocks"] = problem.structure.num_blocks();
  out["block_sizes"] = problem.structure.psd_sizes;
  out["factorized"] = problem.structure.factorized_count;
  out["free_dim"] = problem.structure.free_dim;
  out["m"] = problem.num_constraints();
  std::string kinds;
  for (int i = 0; i < problem.num_constraints(); ++i) kinds += problem.is_inequality(i) ? 'I' : 'E';
  out["kinds"] = kinds;
  return out;
}

CommandResult RunSolve(const ConicSdpProblem& problem, const SolveFlags& flags) {
  if (const std::string invalid = ValidationMessage(problem); !invalid.empty()) {
    return Usage("invalid problem:\n" + invalid);
  }
  StaircaseConfig config;
  config.solver.seed = flags.seed;
  config.solver.outer_tol = flags.tol;
  config.solver.feas_tol = flags.tol;
  config.solver.max_outer = flags.max_outer;
  config.restarts_per_rank = flags.restarts;
  config.initial_rank = flags.rank;

  Json report;
  report["problem"] = ProblemSummary(problem);
  Json cfg;
  cfg["rank"] = flags.rank ? Json(*flags.rank) : Json(nullptr);
  cfg["seed"] = flags.seed;
  cfg["tol"] = flags.tol;
  cfg["max_outer"] = flags.max_outer;
  cfg["max_inner"] = config.solver.max_inner;
  cfg["restarts"] = flags.restarts;
  cfg["penalty_init"] = config.solver.penalty_init;
  cfg["penalty_growth"] = config.solver.penalty_growth;
  cfg["certify"] = CertifyConfigJson(config.certify);
  report["config"] = cfg;

  Json final;
  int exit_code = kExitOk;
  std::string diagnostics;
  try {
    const SolveReport solved = StaircaseSolve(problem, config);
    report["initial_bound"] = BoundJson(solved.initial_bound);
    Json trace = Json::array();
    for (const StageRecord& stage : solved.trace) trace.push_back(StageJson(stage));
    report["trace"] = trace;
    final["verdict"] = VerdictName(solved.verdict);
    final["objective"] = solved.objective;
    final["gap_vs_dual"] = solved.gap_vs_dual;
    final["rank_increments"] = solved.rank_increments;
    final["licq"] = solved.certificate.licq;
    final["time_ms"] = flags.timing ? Json(solved.time_ms) : Json(nullptr);
    final["seed"] = flags.seed;
    exit_code = solved.verdict == Verdict::kGlobalOptimal ? kExitOk : kExitIndeterminate;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInfeasible) return Usage(e.what());
    report["trace"] = Json::array();
    final["verdict"] = "Infeasible";
    final["objective"] = nullptr;
    final["gap_vs_dual"] = nullptr;
    final["time_ms"] = nullptr;
    final["seed"] = flags.seed;
    exit_code = kExitInfeasible;
    diagnostics = e.what();
  }
  if (flags.oracle) {
    try {
      const OracleSolution oracle = OracleSolve(problem);
      final["oracle_objective"] = oracle.objective;
      final["oracle_converged"] = oracle.converged;
    } catch (const Error& e) {
      final["oracle_objective"] = nullptr;
      final["oracle_error"] = e.what();
    }
  }
  report["final"] = final;
  return Finish(report, exit_code, diagnostics);
}

CommandResult RunCertify(const ConicSdpProblem& problem, const std::string& point_text) {
  if (const std::string invalid = ValidationMessage(problem); !invalid.empty()) {
    return Usage("invalid problem:\n" + invalid);
  }
  FactorizedPoint point;
  try {
    point = ReadPoint(point_text, problem.structure);
  } catch (const Error& e) {
    return Usage(std::string("point: ") + e.what());
  }
  const CertifyOptions options;
  const Multipliers mult = EstimateMultipliers(problem, point, options.active_tol);
  const Certificate cert = Certify(problem, point, mult, options);
  const LicqResult licq = LicqCheck(problem, point, options.active_tol);

  Json report;
  report["problem"] = ProblemSummary(problem);
  report["config"] = CertifyConfigJson(options);
  Json c;
  c["verdict"] = VerdictName(cert.verdict);
  c["objective"] = cert.objective;
  c["dual_objective"] = cert.dual_objective;
  c["duality_gap"] = cert.duality_gap;
  c["kkt"] = KktJson(cert.kkt);
  c["residuals_pass"] = cert.residuals_pass;
  c["slack_min_eig"] = cert.slack_min_eig;
  Json spectrum = Json::array();
  for (const Eigen::VectorXd& values : cert.slack_spectrum) spectrum.push_back(VectorJson(values));
  c["slack_spectrum"] = spectrum;
  Json l;
  l["holds"] = licq.holds;
  l["jacobian_rank"] = licq.jacobian_rank;
  l["active_count"] = licq.active_count;
  c["licq"] = l;
  Json m;
  m["lambda"] = VectorJson(mult.lambda);
  m["active_set"] = mult.active_set;
  m["source"] = SourceName(mult.source);
  m["residual"] = mult.residual;
  m["rank_deficient"] = mult.rank_deficient;
  c["multipliers"] = m;
  if (cert.escape) {
    Json e;
    e["block"] = cert.escape->block;
    e["eigenvalue"] = cert.escape->eigenvalue;
    e["eigenvector"] = VectorJson(cert.escape->eigenvector);
    c["escape"] = e;
  } else {
    c["escape"] = nullptr;
  }
  report["certificate"] = c;
  Json final;
  final["verdict"] = VerdictName(cert.verdict);
  final["objective"] = cert.objective;
  final["gap_vs_dual"] = cert.duality_gap;
  final["time_ms"] = nullptr;
  final["seed"] = nullptr;
  report["final"] = final;
  return Finish(report, cert.verdict == Verdict::kGlobalOptimal ? kExitOk : kExitIndeterminate);
}

CommandResult RunBound(const ConicSdpProblem& problem, const BoundFlags& flags) {
  if (const std::string invalid = ValidationMessage(problem); !invalid.empty()) {
    return Usage("invalid problem:\n" + invalid);
  }
  RankBoundReport bound;
  try {
    if (flags.ranks) {
      bound = MPrimeConic(problem, ParseTailRanks(*flags.ranks));
    } else if (problem.structure.num_blocks() == 1 && problem.structure.free_dim == 0) {
      MPrimeOptions options;
      options.exact_enumeration_cap = flags.cap;
      bound = MPrimeInequality(problem, options);
    } else {
      bound = DefaultRankBound(problem);
    }
  } catch (const Error& e) {
    return Usage(e.what());
  }
  Json report;
  report["problem"] = ProblemSummary(problem);
  const Json b = BoundJson(bound);
  for (const auto& [key, value] : b.items()) report[key] = value;
  return Finish(report, kExitOk);
}

CommandResult RunExperiment(const ExperimentFlags& flags) {
  if (flags.trials < 0 || flags.n < 1 || flags.m < 0 || flags.jobs < 1 ||
      (flags.p && *flags.p < 1)) {
    return Usage("experiment: need n >= 1, m >= 0, trials >= 0, jobs >= 1, p >= 1");
  }
  std::function<Json(int)> trial;
  if (flags.kind == "genericity") {
    trial = [&](int i) { return GenericityTrial(flags, flags.seed + i); };
  } else if (flags.kind == "adversarial") {
    if (flags.p.value_or(2) >= flags.n) return Usage("adversarial: need p < n");
    trial = [&](int i) { return AdversarialTrial(flags, flags.seed + i); };
  } else if (flags.kind == "licq") {
    trial = [&](int i) { return LicqTrial(flags, flags.seed + i); };
  } else {
    return Usage("experiment: unknown kind '" + flags.kind +
                 "' (expected genericity, adversarial or licq)");
  }
  std::vector<Json> trials;
  try {
    trials = RunTrials(flags.trials, flags.jobs, trial);
  } catch (const Error& e) {
    return Usage(e.what());
  }
  Json report;
  report["experiment"] = flags.kind;
  Json cfg;
  cfg["n"] = flags.n;
  cfg["m"] = flags.m;
  cfg["p"] = flags.p ? Json(*flags.p) : Json(nullptr);
  cfg["trials"] = flags.trials;
  cfg["seed"] = flags.seed;
  cfg["oracle"] = flags.oracle;
  report["config"] = cfg;
  Json summary;
  summary["trials"] = flags.trials;
  if (flags.kind == "genericity") {
    summary["certified_fraction"] = Fraction(trials, "certified");
    summary["certified_without_increment_fraction"] = Fraction(trials, "certified_without_increment");
    if (flags.oracle) summary["oracle_match_fraction"] = Fraction(trials, "matches_oracle");
  } else if (flags.kind == "adversarial") {
    summary["rejection_fraction"] = Fraction(trials, "rejected");
    if (flags.oracle) summary["spurious_fraction"] = Fraction(trials, "spurious");
    summary["beaten_fraction"] = Fraction(trials, "beats_planted");
  } else {
    summary["pass_fraction"] = Fraction(trials, "holds");
    summary["nonzero_b_fraction"] = Fraction(trials, "nonzero_b");
  }
  report["summary"] = summary;
  report["trials"] = trials;
  return Finish(report, kExitOk);
}

CommandResult RunGenerate(const GenerateFlags& flags) {
  ConicSdpProblem problem;
  Json fixture;
  fixture["kind"] = flags.kind;
  fixture["seed"] = flags.seed;
  try {
    if (flags.kind == "random") {
      BlockStructure structure;
      if (flags.blocks.empty()) {
        structure.psd_sizes = {flags.n};
      } else {
        for (const std::string& token : Split(flags.blocks, ',')) {
          structure.psd_sizes.push_back(ParseInt(token));
        }
      }
      structure.factorized_count = std::min(flags.factorized, structure.num_blocks());
      structure.free_dim = flags.free_dim;
      problem = GenerateRandom(structure, flags.m, flags.kinds, flags.seed);
    } else if (flags.kind == "sensing-psd") {
      const SensingFixture f = BuildSensingPsd(flags.n, flags.rank, flags.m, flags.seed);
      problem = f.problem;
      fixture["planted"] = MatrixJson(f.planted);
      fixture["nuclear_norm"] = f.nuclear_norm;
    } else if (flags.kind == "sensing-symmetric") {
      if (flags.rank < 1 || flags.rank > flags.n) {
        throw Error(ErrorCode::kInvalidArgument, "sensing: need 1 <= rank <= n");
      }
      const SensingFixture f = BuildSensingSymmetric(
          flags.n, flags.m, PlantedSymmetric(flags.n, flags.rank, flags.seed), flags.seed);
      problem = f.problem;
      fixture["planted"] = MatrixJson(f.planted);
      fixture["nuclear_norm"] = f.nuclear_norm;
    } else if (flags.kind == "adversarial") {
      const AdversarialFixture f = RandomAdversarialFixture(flags.n, flags.rank, flags.m, flags.seed);
      problem = f.problem;
      fixture["planted_objective"] = f.planted_objective;
      fixture["planted_lambda"] = VectorJson(f.planted_lambda);
      fixture["planted_point"] = WritePoint(f.planted);
    } else if (flags.kind == "iqm") {
      std::mt19937_64 rng = TrialStream(flags.seed, 0x1a);
      const Eigen::MatrixXd g = GaussianMatrix(rng, flags.n, flags.n);
      const Eigen::MatrixXd q = g * g.transpose() / flags.n +
                                0.1 * Eigen::MatrixXd::Identity(flags.n, flags.n);
      const Eigen::VectorXd lin = GaussianMatrix(rng, flags.n, 1).col(0);
      const IntegerQuadraticFixture f =
          BuildIntegerQuadratic(IntegerQuadraticCost(q, lin, 1.0));
      problem = f.problem;
      fixture["bound"] = BoundJson(f.bound);
    } else if (flags.kind == "soc") {
      const SocInstance inst = RandomSocInstance(flags.n, flags.cone_dim, flags.m, flags.seed);
      problem = BuildSocEmbedding(inst);
      fixture["cone_dim"] = flags.cone_dim;
    } else {
      return Usage("generate: unknown kind '" + flags.kind + "'");
    }
  } catch (const Error& e) {
    return Usage(e.what());
  }
  fixture["name"] = problem.name;
  if (flags.fixture_path) {
    std::ofstream file(*flags.fixture_path);
    if (!file) return Usage("cannot write " + *flags.fixture_path);
    file << DumpJson(fixture);
  }
  CommandResult result;
  result.output = WriteProblem(problem);
  return result;
}

int Main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Certified low-rank solver for semidefinite programs", "bmsdp"};
  app.require_subcommand(1);
  std::string out_path;

  std::string problem_path;
  std::string point_path;
  SolveFlags solve;
  auto* solve_cmd = app.add_subcommand("solve", "Run the rank staircase and certify the result");
  solve_cmd->add_option("problem", problem_path, "Problem file")->required();
  solve_cmd->add_option("--rank", solve.rank, "Initial factor rank for every factorized block");
  solve_cmd->add_option("--seed", solve.seed, "Random seed");
  solve_cmd->add_option("--tol", solve.tol, "Stationarity and feasibility tolerance");
  solve_cmd->add_option("--max-outer", solve.max_outer, "Outer iterations per stage");
  solve_cmd->add_option("--restarts", solve.restarts, "Fresh-seed restarts per rank");
  solve_cmd->add_flag("--oracle", solve.oracle, "Also run the interior-point oracle");
  solve_cmd->add_flag("--timing", solve.timing, "Record wall time in the report");
  solve_cmd->add_option("--out", out_path, "Write the report here instead of stdout");

  auto* certify_cmd = app.add_subcommand("certify", "Certify a given point");
  certify_cmd->add_option("problem", problem_path, "Problem file")->required();
  certify_cmd->add_option("point", point_path, "Point file")->required();
  certify_cmd->add_option("--out", out_path, "Write the report here instead of stdout");

  BoundFlags bound;
  auto* bound_cmd = app.add_subcommand("bound", "Compute m' and the minimal factor ranks");
  bound_cmd->add_option("problem", problem_path, "Problem file")->required();
  bound_cmd->add_option("--ranks", bound.ranks, "Tail-block rank sets, e.g. \"0,1;1\"");
  bound_cmd->add_option("--cap", bound.cap, "Largest m for exact enumeration");
  bound_cmd->add_option("--out", out_path, "Write the report here instead of stdout");

  ExperimentFlags experiment;
  auto* experiment_cmd = app.add_subcommand("experiment", "Seeded statistical experiments");
  experiment_cmd->add_option("kind", experiment.kind, "genericity | adversarial | licq")->required();
  experiment_cmd->add_option("--n", experiment.n, "Matrix size");
  experiment_cmd->add_option("--m", experiment.m, "Number of constraints");
  experiment_cmd->add_option("--p", experiment.p, "Factor rank");
  experiment_cmd->add_option("--trials", experiment.trials, "Number of seeded trials");
  experiment_cmd->add_option("--seed", experiment.seed, "First seed");
  experiment_cmd->add_option("--jobs", experiment.jobs, "Worker threads");
  bool no_oracle = false;
  experiment_cmd->add_flag("--no-oracle", no_oracle, "Skip the interior-point cross-check");
  experiment_cmd->add_option("--out", out_path, "Write the report here instead of stdout");

  GenerateFlags generate;
  std::string fixture_path;
  auto* generate_cmd = app.add_subcommand("generate", "Write a fixture problem file");
  generate_cmd->add_option("kind", generate.kind,
                           "random | sensing-psd | sensing-symmetric | adversarial | iqm | soc")
      ->required();
  generate_cmd->add_option("--n", generate.n, "Matrix size");
  generate_cmd->add_option("--m", generate.m, "Number of constraints");
  generate_cmd->add_option("--rank", generate.rank, "Planted rank");
  generate_cmd->add_option("--seed", generate.seed, "Random seed");
  generate_cmd->add_option("--blocks", generate.blocks, "Block sizes for random problems");
  generate_cmd->add_option("--factorized", generate.factorized, "Number of factorized blocks");
  generate_cmd->add_option("--free", generate.free_dim, "Free variables");
  generate_cmd->add_option("--cone", generate.cone_dim, "Second-order cone dimension");
  generate_cmd->add_option("--kinds", generate.kinds, "Constraint kinds, e.g. EEI");
  generate_cmd->add_option("--fixture", fixture_path, "Sidecar JSON with planted data");
  generate_cmd->add_option("--out", out_path, "Write the problem here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  CommandResult result;
  try {
    if (*solve_cmd) {
      result = RunSolve(LoadProblem(problem_path), solve);
    } else if (*certify_cmd) {
      result = RunCertify(LoadProblem(problem_path), ReadTextFile(point_path));
    } else if (*bound_cmd) {
      result = RunBound(LoadProblem(problem_path), bound);
    } else if (*experiment_cmd) {
      experiment.oracle = !no_oracle;
      result = RunExperiment(experiment);
    } else {
      if (!fixture_path.empty()) generate.fixture_path = fixture_path;
      result = RunGenerate(generate);
    }
  } catch (const Error& e) {
    result = Usage(e.what());
  }

  if (!result.diagnostics.empty()) err << result.diagnostics << "\n";
  if (!result.output.empty()) {
    if (out_path.empty()) {
      out << result.output;
    } else {
      std::ofstream file(out_path);
      if (!file) {
        err << "cannot write " << out_path << "\n";
        return kExitUsage;
      }
      file << result.output;
    }
  }
  return result.exit_code;
}

}  // namespace bmsdp::cli
