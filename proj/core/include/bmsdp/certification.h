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

#ifndef BMSDP_CERTIFICATION_H_
#define BMSDP_CERTIFICATION_H_

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "bmsdp/factorization.h"
#include "bmsdp/model.h"

namespace bmsdp {

enum class MultiplierSource { kFromSolver, kLeastSquares };

struct Multipliers {
  Eigen::VectorXd lambda;
  std::vector<int> active_set;
  MultiplierSource source = MultiplierSource::kLeastSquares;
  double residual = 0.0;  // least-squares stationarity residual
  bool rank_deficient = false;
};

// All equalities plus inequalities with |A_i(X) - b_i| <= tol (1 + |b_i|).
std::vector<int> ActiveSet(const ConicSdpProblem& problem,
                           const FactorizedPoint& point, double tol = 1e-7);

// Least-squares multipliers: zero on inactive inequalities, nonnegative on
// active ones.
Multipliers EstimateMultipliers(const ConicSdpProblem& problem,
                                const FactorizedPoint& point,
                                double active_tol = 1e-7);

// S(lambda) = C - A*(lambda), blockwise, with free component s(lambda).
BlockElement SlackMatrix(const ConicSdpProblem& problem,
                         const Eigen::VectorXd& lambda);

struct KktResiduals {
  double stationarity = 0.0;     // max_j ||S_j Y_j||_F over factorized blocks
  double feasibility = 0.0;      // ||violations||_2
  double complementarity = 0.0;  // max |lambda_i c_i|, |<S_j, X_j>| on tails
  double sign = 0.0;             // max(0, -min inequality lambda)
  double free = 0.0;             // ||s(lambda)||
};

KktResiduals ComputeKktResiduals(const ConicSdpProblem& problem,
                                 const FactorizedPoint& point,
                                 const Multipliers& multipliers);

struct SecondOrderResult {
  bool passes = true;
  bool vacuous = false;        // null space of the active Jacobian is {0}
  double min_eigenvalue = 0.0; // of the reduced Lagrangian Hessian
  int null_space_dim = 0;
  std::vector<Eigen::MatrixXd> worst_direction;  // one U_j per factor
};

// Restricts the Lagrangian Hessian U -> sum_j 2 S_j . U_j U_j^T to the null
// space of the active constraint Jacobian of the factorized blocks.
SecondOrderResult SecondOrderCheck(const ConicSdpProblem& problem,
                                   const FactorizedPoint& point,
                                   const Multipliers& multipliers,
                                   double tol = 1e-7);

struct LicqResult {
  bool holds = true;
  int jacobian_rank = 0;
  int active_count = 0;
};

// Linear independence of the active constraint gradients with respect to
// all solver variables (tail blocks enter through a full-rank factor).
LicqResult LicqCheck(const ConicSdpProblem& problem,
                     const FactorizedPoint& point, double active_tol = 1e-7);

enum class Verdict { kGlobalOptimal, kEscapable, kIndeterminate };

const char* VerdictName(Verdict verdict);

struct EscapeInfo {
  int block = 0;
  Eigen::VectorXd eigenvector;
  double eigenvalue = 0.0;
};

struct CertifyOptions {
  // Slack eigenvalues must be >= -cert_tol (1 + ||S_j||_2).
  double cert_tol = 1e-7;
  // Stationarity and free residuals are compared against
  // kkt_tol (1 + ||C||); feasibility against kkt_tol (1 + ||b||_inf);
  // complementarity against kkt_tol (1 + |C . X|); sign against kkt_tol.
  double kkt_tol = 1e-6;
  double active_tol = 1e-7;
};

struct Certificate {
  std::vector<Eigen::VectorXd> slack_spectrum;  // ascending, per block
  KktResiduals kkt;
  double objective = 0.0;
  double dual_objective = 0.0;  // b^T lambda
  double duality_gap = 0.0;     // objective - dual_objective
  // min over blocks of lambda_min(S_j) / (1 + ||S_j||_2).
  double slack_min_eig = 0.0;
  bool residuals_pass = false;
  bool licq = false;
  Verdict verdict = Verdict::kIndeterminate;
  std::optional<EscapeInfo> escape;
};

Certificate Certify(const ConicSdpProblem& problem,
                    const FactorizedPoint& point,
                    const Multipliers& multipliers,
                    const CertifyOptions& options = {});

enum class EscapeKind { kKernelDirection, kRankIncrement };

struct EscapeStep {
  EscapeKind kind = EscapeKind::kRankIncrement;
  int block = 0;
  Eigen::MatrixXd direction;  // U = v z^T for kernel directions
  Eigen::VectorXd column;     // v for rank increments
};

// For an Escapable certificate at a factorized block: the kernel direction
// v z^T when Y_j is column-rank deficient, else a rank increment along v.
EscapeStep EscapeDirection(const FactorizedPoint& point,
                           const Certificate& certificate);

}  // namespace bmsdp

#endif  // BMSDP_CERTIFICATION_H_
