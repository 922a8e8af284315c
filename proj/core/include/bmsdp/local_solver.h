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

#ifndef BMSDP_LOCAL_SOLVER_H_
#define BMSDP_LOCAL_SOLVER_H_

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "bmsdp/factorization.h"
#include "bmsdp/model.h"

namespace bmsdp {

struct SolverConfig {
  double outer_tol = 1e-8;
  double feas_tol = 1e-8;
  int max_outer = 50;
  int max_inner = 500;
  double penalty_init = 10.0;
  double penalty_growth = 10.0;
  double tr_radius_init = 1.0;
  std::uint64_t seed = 0;
  double init_scale = 1.0;
};

// Throws kInvalidArgument unless every tolerance is positive and the
// penalty growth exceeds one.
void ValidateConfig(const SolverConfig& config);

inline constexpr double kPenaltyCap = 1e12;
inline constexpr double kMultiplierCap = 1e10;

// Solver variables: one factor per PSD block (tail blocks at full rank) and
// the free vector. Flattening is column-major per factor, then the free part.
struct FactorVariables {
  std::vector<Eigen::MatrixXd> factors;
  Eigen::VectorXd free;

  int size() const;
  Eigen::VectorXd Flatten() const;
  void Unflatten(const Eigen::VectorXd& flat);
  FactorVariables ZerosLike() const;
};

FactorVariables ToVariables(const FactorizedPoint& point,
                            const BlockStructure& structure);
FactorizedPoint ToFactorizedPoint(const FactorVariables& vars,
                                  const BlockStructure& structure);

// c = A(q(Y), x) - b.
Eigen::VectorXd ConstraintResiduals(const ConicSdpProblem& problem,
                                    const FactorVariables& vars);
double Objective(const ConicSdpProblem& problem, const FactorVariables& vars);

// sqrt(sum_eq c_i^2 + sum_ineq min(0, c_i)^2).
double Infeasibility(const ConicSdpProblem& problem,
                     const Eigen::VectorXd& residuals);

struct AlEvaluation {
  double value = 0.0;
  double objective = 0.0;
  FactorVariables gradient;
  Eigen::VectorXd residuals;        // c
  Eigen::VectorXd shifted_lambda;   // lambda~
};

// Powell-Hestenes-Rockafellar augmented Lagrangian and its gradient.
AlEvaluation AlValueGrad(const ConicSdpProblem& problem,
                         const FactorVariables& vars,
                         const Eigen::VectorXd& lambda, double penalty);

// Exact Hessian-vector product of the augmented Lagrangian.
FactorVariables AlHessianVector(const ConicSdpProblem& problem,
                                const FactorVariables& vars,
                                const Eigen::VectorXd& lambda, double penalty,
                                const FactorVariables& direction);

struct LagrangianState {
  FactorVariables point;
  Eigen::VectorXd lambda;
  double penalty = 0.0;
  double objective = 0.0;
  double al_value = 0.0;
  double infeasibility = 0.0;
  double stationarity = 0.0;  // ||grad AL||
  int accepted_steps = 0;
  int inner_iterations = 0;
  bool hit_iteration_limit = false;
};

LagrangianState MakeState(const ConicSdpProblem& problem,
                          FactorVariables point, Eigen::VectorXd lambda,
                          double penalty);

// Trust-region Newton (Steihaug-Toint truncated CG) on the augmented
// Lagrangian with fixed multipliers and penalty. Stops at
// stationarity <= max(outer_tol, 0.1 * infeasibility) without negative
// curvature, or after max_inner iterations.
LagrangianState InnerMinimize(const ConicSdpProblem& problem,
                              LagrangianState state,
                              const SolverConfig& config);

struct OuterRecord {
  int iteration = 0;
  double objective = 0.0;
  double infeasibility = 0.0;
  double stationarity = 0.0;
  double penalty = 0.0;
  int inner_iterations = 0;
};

struct AlResult {
  LagrangianState state;
  std::vector<OuterRecord> trace;
  bool converged = false;
};

// Gaussian start: factor j has ranks[j] columns for factorized blocks and
// n_j columns for tail blocks.
FactorVariables RandomStart(const ConicSdpProblem& problem,
                            std::span<const int> ranks,
                            const SolverConfig& config);

// Augmented Lagrangian outer loop. Throws kInfeasible when infeasibility
// stalls with the penalty at its cap.
AlResult AlSolve(const ConicSdpProblem& problem, std::span<const int> ranks,
                 const SolverConfig& config);
AlResult AlSolveFrom(const ConicSdpProblem& problem, FactorVariables start,
                     Eigen::VectorXd lambda, double penalty,
                     const SolverConfig& config);

}  // namespace bmsdp

#endif  // BMSDP_LOCAL_SOLVER_H_
