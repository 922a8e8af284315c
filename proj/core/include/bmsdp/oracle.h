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

#ifndef BMSDP_ORACLE_H_
#define BMSDP_ORACLE_H_

#include <vector>

#include <Eigen/Core>

#include "bmsdp/model.h"

namespace bmsdp {

struct OracleOptions {
  double tol = 1e-9;
  int max_iterations = 120;
  // Primal or dual iterates growing past this norm are taken as evidence
  // that the problem has no interior.
  double divergence_norm = 1e10;
};

struct OracleIterate {
  double objective = 0.0;
  double dual_objective = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
};

struct OracleSolution {
  PrimalPoint x;
  Eigen::VectorXd lambda;
  double objective = 0.0;
  double dual_objective = 0.0;
  double gap = 0.0;
  int iterations = 0;
  double primal_infeasibility = 0.0;  // relative
  double dual_infeasibility = 0.0;    // relative
  double relative_gap = 0.0;
  bool converged = false;  // all three measures <= tol
  std::vector<OracleIterate> history;
};

// Dense infeasible-start primal-dual path-following method (HKM direction,
// Mehrotra predictor-corrector). Inequalities become 1x1 slack blocks; free
// variables are eliminated from the Schur complement system.
// Deterministic. Throws kNotStrictlyFeasible on divergence and
// kMaxIterations if the iteration limit leaves residuals above sqrt(tol).
OracleSolution OracleSolve(const ConicSdpProblem& problem,
                           const OracleOptions& options = {});

// Independent oracle for a single 2x2 block without free variables: grids
// the affine slice cut out by the equalities, then runs an ellipsoid method
// on it. Throws kUnsupportedStructure for other shapes.
double BruteForce2x2(const ConicSdpProblem& problem);

}  // namespace bmsdp

#endif  // BMSDP_ORACLE_H_
