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

#include "bmsdp/staircase.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <utility>

#include "bmsdp/error.h"
#include "bmsdp/linalg.h"

namespace bmsdp {
namespace {

// Moves along U (zero-padded to the factor's shape) with the step that
// minimizes the augmented Lagrangian on a geometric grid.
FactorVariables LineSearchAlong(const ConicSdpProblem& problem,
                                const FactorVariables& start, int block,
                                const Eigen::MatrixXd& direction,
                                const Eigen::VectorXd& lambda, double penalty) {
  const Eigen::MatrixXd& y = start.factors[block];
  const double base = std::max(1.0, y.norm());
  FactorVariables best = start;
  double best_value = AlValueGrad(problem, start, lambda, penalty).value;
  for (int k = -20; k <= 4; ++k) {
    FactorVariables trial = start;
    trial.factors[block] += std::ldexp(base, k) * direction;
    const double value = AlValueGrad(problem, trial, lambda, penalty).value;
    if (value < best_value) {
      best_value = value;
      best = std::move(trial);
    }
  }
  return best;
}

}  // namespace

SolveReport StaircaseSolve(const ConicSdpProblem& problem,
                           const StaircaseConfig& config) {
  ValidateConfig(config.solver);
  const auto started = std::chrono::steady_clock::now();
  const BlockStructure& s = problem.structure;
  SolveReport report;
  report.seed = config.solver.seed;
  report.initial_bound = DefaultRankBound(problem);
  std::vector<int> ranks = report.initial_bound.ranks;
  if (config.initial_rank) {
    if (*config.initial_rank < 1) {
      throw Error(ErrorCode::kInvalidArgument, "staircase: rank override must be >= 1");
    }
    for (int j = 0; j < s.factorized_count; ++j) {
      ranks[j] = std::min(*config.initial_rank, s.psd_sizes[j]);
    }
  }

  std::uint64_t next_seed = config.solver.seed;
  int restarts_at_rank = 0;
  std::optional<FactorVariables> warm;
  Eigen::VectorXd warm_lambda;
  bool have_result = false;

  for (int stage = 0; stage < config.max_stages; ++stage) {
    SolverConfig solver = config.solver;
    StageRecord record;
    AlResult al;
    if (warm) {
      solver.seed = next_seed - 1;
      al = AlSolveFrom(problem, std::move(*warm), warm_lambda, solver.penalty_init, solver);
      warm.reset();
    } else {
      solver.seed = next_seed++;
      al = AlSolve(problem, ranks, solver);
    }
    record.seed = solver.seed;
    record.outer_iterations = static_cast<int>(al.trace.size());

    FactorizedPoint point = ToFactorizedPoint(al.state.point, s);
    record.ranks = point.ranks();
    Multipliers from_solver;
    from_solver.lambda = al.state.lambda;
    from_solver.source = MultiplierSource::kFromSolver;
    from_solver.active_set = ActiveSet(problem, point, config.certify.active_tol);
    Multipliers least_squares = EstimateMultipliers(problem, point, config.certify.active_tol);
    const KktResiduals kkt_solver = ComputeKktResiduals(problem, point, from_solver);
    const KktResiduals kkt_ls = ComputeKktResiduals(problem, point, least_squares);
    Certificate cert_solver = Certify(problem, point, from_solver, config.certify);
    Certificate cert_ls = Certify(problem, point, least_squares, config.certify);
    const bool solver_ok = cert_solver.verdict == Verdict::kGlobalOptimal;
    const bool ls_ok = cert_ls.verdict == Verdict::kGlobalOptimal;
    const bool use_ls = ls_ok != solver_ok ? ls_ok : kkt_ls.stationarity < kkt_solver.stationarity;
    Multipliers chosen = use_ls ? std::move(least_squares) : std::move(from_solver);
    const Certificate cert = use_ls ? std::move(cert_ls) : std::move(cert_solver);

    record.objective = cert.objective;
    record.kkt = cert.kkt;
    record.slack_min_eig = cert.slack_min_eig;
    record.duality_gap = cert.duality_gap;
    record.verdict = cert.verdict;
    record.multiplier_source = chosen.source;

    report.point = point;
    report.multipliers = chosen;
    report.certificate = cert;
    have_result = true;

    const bool last_stage = stage + 1 >= config.max_stages;
    if (cert.verdict == Verdict::kGlobalOptimal || last_stage) {
      record.action = cert.verdict == Verdict::kGlobalOptimal ? "stop" : "give-up";
      report.trace.push_back(std::move(record));
      break;
    }

    if (cert.verdict == Verdict::kEscapable) {
      const EscapeStep step = EscapeDirection(point, cert);
      const int j = step.block;
      const int n = s.psd_sizes[j];
      FactorVariables vars = al.state.point;
      bool escaped = false;
      if (step.kind == EscapeKind::kKernelDirection) {
        vars = LineSearchAlong(problem, vars, j, step.direction, chosen.lambda,
                               config.solver.penalty_init);
        record.action = "kernel-escape";
        escaped = true;
      } else if (vars.factors[j].cols() < n) {
        Eigen::MatrixXd grown(n, vars.factors[j].cols() + 1);
        grown << vars.factors[j], Eigen::VectorXd::Zero(n);
        vars.factors[j] = std::move(grown);
        Eigen::MatrixXd direction = Eigen::MatrixXd::Zero(n, vars.factors[j].cols());
        direction.rightCols(1) = step.column;
        vars = LineSearchAlong(problem, vars, j, direction, chosen.lambda,
                               config.solver.penalty_init);
        ranks[j] = static_cast<int>(vars.factors[j].cols());
        ++report.rank_increments;
        restarts_at_rank = 0;
        record.action = "rank-increment";
        escaped = true;
      }
      if (escaped) {
        warm = std::move(vars);
        warm_lambda = chosen.lambda;
        report.trace.push_back(std::move(record));
        continue;
      }
    }

    if (restarts_at_rank >= config.restarts_per_rank) {
      record.action = "give-up";
      report.trace.push_back(std::move(record));
      break;
    }
    ++restarts_at_rank;
    record.action = "restart";
    report.trace.push_back(std::move(record));
  }

  if (have_result) {
    report.verdict = report.certificate.verdict;
    report.objective = report.certificate.objective;
    report.gap_vs_dual = report.certificate.duality_gap;
  }
  report.time_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - started)
                       .count();
  return report;
}

}  // namespace bmsdp
