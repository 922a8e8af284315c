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

#ifndef BMSDP_STAIRCASE_H_
#define BMSDP_STAIRCASE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bmsdp/certification.h"
#include "bmsdp/factorization.h"
#include "bmsdp/local_solver.h"
#include "bmsdp/model.h"

namespace bmsdp {

struct StaircaseConfig {
  SolverConfig solver;
  std::optional<int> initial_rank;  // overrides the bound for every factor
  int restarts_per_rank = 3;
  CertifyOptions certify;
  int max_stages = 64;
};

struct StageRecord {
  std::vector<int> ranks;
  std::uint64_t seed = 0;
  double objective = 0.0;
  KktResiduals kkt;
  double slack_min_eig = 0.0;
  double duality_gap = 0.0;
  Verdict verdict = Verdict::kIndeterminate;
  MultiplierSource multiplier_source = MultiplierSource::kFromSolver;
  int outer_iterations = 0;
  // What the staircase did next: "stop", "kernel-escape", "rank-increment",
  // "restart" or "give-up".
  std::string action;
};

struct SolveReport {
  std::vector<StageRecord> trace;
  RankBoundReport initial_bound;
  Verdict verdict = Verdict::kIndeterminate;
  double objective = 0.0;
  double gap_vs_dual = 0.0;
  double time_ms = 0.0;
  std::uint64_t seed = 0;
  int rank_increments = 0;
  FactorizedPoint point;
  Multipliers multipliers;
  Certificate certificate;
};

// Repeats {local solve, multiplier recovery, certification}, escaping along
// negative slack directions until the point is certified, every factor is at
// full rank, or the restart budget is spent. Throws kInfeasible.
SolveReport StaircaseSolve(const ConicSdpProblem& problem,
                           const StaircaseConfig& config = {});

}  // namespace bmsdp

#endif  // BMSDP_STAIRCASE_H_
