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

#ifndef BMSDP_TESTS_TEST_FIXTURES_H_
#define BMSDP_TESTS_TEST_FIXTURES_H_

#include <algorithm>
#include <cstdint>
#include <random>

#include <Eigen/Core>

#include "bmsdp/local_solver.h"
#include "bmsdp/model.h"

namespace bmsdp::testing {

// min I_2 . X  s.t.  X_11 = 1.  Optimum X = E_11, lambda = 1.
inline ConicSdpProblem TrivialSdp() {
  ProblemBuilder b({{2}, 1, 0}, "trivial");
  b.SetCostBlock(0, Eigen::MatrixXd::Identity(2, 2));
  const int k = b.AddConstraint(ConstraintKind::kEquality, 1.0);
  b.AddEntry(k, 0, 0, 0, 1.0);
  return b.Build();
}

// min diag(1, -1) . X  s.t.  tr X = 1.  Optimum -1 at e_2 e_2^T.
inline ConicSdpProblem TraceOneSdp() {
  ProblemBuilder b({{2}, 1, 0}, "trace-one");
  b.SetCostEntry(0, 0, 0, 1.0);
  b.SetCostEntry(0, 1, 1, -1.0);
  const int k = b.AddConstraint(ConstraintKind::kEquality, 1.0);
  b.AddEntry(k, 0, 0, 0, 1.0);
  b.AddEntry(k, 0, 1, 1, 1.0);
  return b.Build();
}

// Max-cut on a triangle: min ones(3) . X  s.t.  X_ii = 1. Every optimum
// has rank 2 and value 0.
inline ConicSdpProblem TriangleMaxCut() {
  ProblemBuilder b({{3}, 1, 0}, "triangle");
  b.SetCostBlock(0, Eigen::MatrixXd::Ones(3, 3));
  for (int i = 0; i < 3; ++i) {
    const int k = b.AddConstraint(ConstraintKind::kEquality, 1.0);
    b.AddEntry(k, 0, i, i, 1.0);
  }
  return b.Build();
}

// Unconstrained problem with the given dense cost.
inline ConicSdpProblem Unconstrained(const Eigen::MatrixXd& cost) {
  ProblemBuilder b({{static_cast<int>(cost.rows())}, 1, 0}, "unconstrained");
  b.SetCostBlock(0, cost);
  return b.Build();
}

inline Eigen::MatrixXd RandomMatrix(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd m(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) m(r, c) = normal(rng);
  }
  return m;
}

inline PrimalPoint RandomPsdPoint(const BlockStructure& s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  PrimalPoint x;
  for (int n : s.psd_sizes) {
    const Eigen::MatrixXd g = RandomMatrix(rng, n, n);
    x.blocks.push_back(SymmetricMatrix::FromDense(g * g.transpose()));
  }
  x.free = RandomMatrix(rng, s.free_dim, 1).col(0);
  return x;
}

// ||g - g_fd|| / max(1, ||g||) with central differences of step h.
inline double GradientFdError(const ConicSdpProblem& problem,
                              const FactorVariables& vars,
                              const Eigen::VectorXd& lambda, double penalty,
                              double h = 1e-5) {
  const Eigen::VectorXd x = vars.Flatten();
  const Eigen::VectorXd g = AlValueGrad(problem, vars, lambda, penalty).gradient.Flatten();
  Eigen::VectorXd fd(x.size());
  FactorVariables probe = vars;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    probe.Unflatten(xp);
    const double fp = AlValueGrad(problem, probe, lambda, penalty).value;
    probe.Unflatten(xm);
    const double fm = AlValueGrad(problem, probe, lambda, penalty).value;
    fd(i) = (fp - fm) / (2 * h);
  }
  return (g - fd).norm() / std::max(1.0, g.norm());
}

// ||Hu - (g(x + hu) - g(x - hu)) / 2h|| / max(1, ||Hu||).
inline double HessianFdError(const ConicSdpProblem& problem,
                             const FactorVariables& vars,
                             const Eigen::VectorXd& lambda, double penalty,
                             const FactorVariables& direction, double h = 1e-5) {
  const Eigen::VectorXd x = vars.Flatten();
  const Eigen::VectorXd u = direction.Flatten();
  const Eigen::VectorXd hu =
      AlHessianVector(problem, vars, lambda, penalty, direction).Flatten();
  FactorVariables probe = vars;
  probe.Unflatten(x + h * u);
  const Eigen::VectorXd gp = AlValueGrad(problem, probe, lambda, penalty).gradient.Flatten();
  probe.Unflatten(x - h * u);
  const Eigen::VectorXd gm = AlValueGrad(problem, probe, lambda, penalty).gradient.Flatten();
  return (hu - (gp - gm) / (2 * h)).norm() / std::max(1.0, hu.norm());
}

}  // namespace bmsdp::testing

#endif  // BMSDP_TESTS_TEST_FIXTURES_H_
