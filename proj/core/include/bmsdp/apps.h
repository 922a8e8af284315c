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

#ifndef BMSDP_APPS_H_
#define BMSDP_APPS_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bmsdp/factorization.h"
#include "bmsdp/model.h"

namespace bmsdp {

// C with (x, 1)^T C (x, 1) = x^T Q x + q^T x + c.
Eigen::MatrixXd IntegerQuadraticCost(const Eigen::MatrixXd& q_matrix,
                                     const Eigen::VectorXd& q_vector,
                                     double constant);

struct IntegerQuadraticFixture {
  ConicSdpProblem problem;
  RankBoundReport bound;
};

// Relaxation of min f(x) over integers: X_{n+1,n+1} = 1 and
// X_ii - X_{i,n+1} >= 0, with the rank bound tau(p) > n + 1.
IntegerQuadraticFixture BuildIntegerQuadratic(const Eigen::MatrixXd& cost);

// Gaussian symmetric matrix scaled to unit Frobenius norm.
Eigen::MatrixXd RandomMeasurement(int n, std::uint64_t seed, int index);

struct SensingFixture {
  ConicSdpProblem problem;
  Eigen::MatrixXd planted;
  double nuclear_norm = 0.0;
};

// min I . X  s.t.  A(X) = A(X*), X PSD, with X* = G G^T of rank `rank`.
SensingFixture BuildSensingPsd(int n, int rank, int m, std::uint64_t seed);

// Two-block split X = X_1 - X_2 of nuclear-norm sensing:
// min I . X_1 + I . X_2  s.t.  A(X_1) - A(X_2) = A(X*).
SensingFixture BuildSensingSymmetric(
    const std::vector<Eigen::MatrixXd>& measurements,
    const Eigen::MatrixXd& planted);
SensingFixture BuildSensingSymmetric(int n, int m,
                                     const Eigen::MatrixXd& planted,
                                     std::uint64_t seed);

// Recovered symmetric estimate X_1 - X_2 from a two-block primal point.
Eigen::MatrixXd SymmetricEstimate(const PrimalPoint& point);

// Linear problem over S_+^{n1} x Q^{n2} with m1 equalities
// <A_i, X> + a_i . x = b_i and cost <C, X> + c . x.
struct SocInstance {
  int psd_dim = 0;
  int cone_dim = 0;
  std::vector<Eigen::MatrixXd> psd_coefficients;
  std::vector<Eigen::VectorXd> cone_coefficients;
  Eigen::VectorXd rhs;
  Eigen::MatrixXd psd_cost;
  Eigen::VectorXd cone_cost;
};

// Arrow matrix [[x1, x_bar^T], [x_bar, x1 I]]; PSD iff x lies in the cone.
Eigen::MatrixXd ArrowMatrix(const Eigen::VectorXd& x);
// Inverse of ArrowMatrix on its image: (X_00, X_01, ..., X_0,n-1).
Eigen::VectorXd ArrowToCone(const Eigen::MatrixXd& arrow);
bool InSecondOrderCone(const Eigen::VectorXd& x, double tol = 0.0);

// Two PSD blocks (n1 factorized, n2 tail) plus tau(n2 - 1) equalities
// forcing the tail block into arrow form. Throws kInvalidArgument if n2 < 2.
ConicSdpProblem BuildSocEmbedding(const SocInstance& instance);

// Same instance with Q^3 written as the 2x2 PSD block
// [[x1 + x2, x3], [x3, x1 - x2]]; an independent formulation for n2 = 3.
ConicSdpProblem BuildSocRotatedEmbedding(const SocInstance& instance);

// Strictly feasible, dual strictly feasible random instance.
SocInstance RandomSocInstance(int psd_dim, int cone_dim, int m1,
                              std::uint64_t seed);

struct AdversarialFixture {
  ConicSdpProblem problem;
  FactorizedPoint planted;
  Eigen::VectorXd planted_lambda;
  Eigen::MatrixXd planted_slack;
  double planted_objective = 0.0;
};

// C = S + A*(lambda) with S Y = 0, rank S <= n - p and S indefinite, so Y
// is first-order critical with slack S. `slack_core` is the (n-p)x(n-p)
// matrix expressed in an orthonormal basis of range(Y)^perp; when empty a
// random indefinite one is drawn. Throws kInvalidArgument if p >= n.
AdversarialFixture BuildAdversarialCost(
    const std::vector<Eigen::MatrixXd>& measurements, const Eigen::MatrixXd& y,
    std::uint64_t seed, const Eigen::MatrixXd& slack_core = {});

// Measurements: a normalized trace constraint plus m - 1 Gaussian ones;
// b = A(Y Y^T) for a Gaussian n x p factor Y.
AdversarialFixture RandomAdversarialFixture(int n, int p, int m,
                                            std::uint64_t seed);

// Random bounded, strictly feasible instance: Gaussian unit-norm A_i,
// b = A(X0) minus positive slack on inequalities for a random PD X0 (entries
// of b resampled away from zero), and C = A*(mu) + W with W PD random and
// mu nonnegative on inequalities. `kinds` holds 'E'/'I' per constraint
// (empty means all equalities).
ConicSdpProblem GenerateRandom(const BlockStructure& structure, int m,
                               const std::string& kinds, std::uint64_t seed);

}  // namespace bmsdp

#endif  // BMSDP_APPS_H_
