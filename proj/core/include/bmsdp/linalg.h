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

#ifndef BMSDP_LINALG_H_
#define BMSDP_LINALG_H_

#include <vector>

#include <Eigen/Core>

namespace bmsdp {

// Relative threshold used for every numerical-rank decision.
inline constexpr double kRankTolerance = 1e-9;

struct SymmetricEigen {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // columns match `values`
};

SymmetricEigen EigenDecompose(const Eigen::MatrixXd& symmetric);

double MinEigenvalue(const Eigen::MatrixXd& symmetric);

// Largest absolute eigenvalue of a symmetric matrix (0 for empty input).
double SpectralNorm(const Eigen::MatrixXd& symmetric);

// Rank with singular values counted above kRankTolerance * sigma_max.
int NumericalRank(const Eigen::MatrixXd& matrix,
                  double relative_tol = kRankTolerance);

// Orthonormal basis (columns) of {u : matrix * u = 0}.
Eigen::MatrixXd NullSpace(const Eigen::MatrixXd& matrix,
                          double relative_tol = kRankTolerance);

struct LeastSquaresResult {
  Eigen::VectorXd solution;
  double residual_norm = 0.0;
  bool rank_deficient = false;
};

// min ||A x - b|| with x_i >= 0 for i in `nonnegative` and the remaining
// coordinates free. Minimum-norm solution when A is rank deficient.
LeastSquaresResult PartiallyNonnegativeLeastSquares(
    const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
    const std::vector<bool>& nonnegative);

// Largest step t in (0, inf] with x + t * dx still PSD; x must be PD.
double MaxPsdStep(const Eigen::MatrixXd& x, const Eigen::MatrixXd& dx);

inline Eigen::MatrixXd Symmetrize(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

}  // namespace bmsdp

#endif  // BMSDP_LINALG_H_
