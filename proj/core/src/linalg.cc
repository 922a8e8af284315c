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

#include "bmsdp/linalg.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "bmsdp/error.h"

namespace bmsdp {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kNotPsd: return "NotPsd";
    case ErrorCode::kRankTooSmall: return "RankTooSmall";
    case ErrorCode::kUnsupportedStructure: return "UnsupportedStructure";
    case ErrorCode::kEmptyRange: return "EmptyRange";
    case ErrorCode::kNumericalFailure: return "NumericalFailure";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kNotStrictlyFeasible: return "NotStrictlyFeasible";
    case ErrorCode::kMaxIterations: return "MaxIterations";
  }
  return "Unknown";
}

SymmetricEigen EigenDecompose(const Eigen::MatrixXd& symmetric) {
  SymmetricEigen out;
  if (symmetric.rows() == 0) return out;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(Symmetrize(symmetric));
  out.values = solver.eigenvalues();
  out.vectors = solver.eigenvectors();
  return out;
}

double MinEigenvalue(const Eigen::MatrixXd& symmetric) {
  if (symmetric.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      Symmetrize(symmetric), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

double SpectralNorm(const Eigen::MatrixXd& symmetric) {
  if (symmetric.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      Symmetrize(symmetric), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

int NumericalRank(const Eigen::MatrixXd& matrix, double relative_tol) {
  if (matrix.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(matrix);
  const Eigen::VectorXd& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  const double threshold = relative_tol * s(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > threshold) ++rank;
  }
  return rank;
}

Eigen::MatrixXd NullSpace(const Eigen::MatrixXd& matrix, double relative_tol) {
  const Eigen::Index cols = matrix.cols();
  if (matrix.rows() == 0) return Eigen::MatrixXd::Identity(cols, cols);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(matrix, Eigen::ComputeFullV);
  const Eigen::VectorXd& s = svd.singularValues();
  int rank = 0;
  if (s.size() > 0 && s(0) > 0.0) {
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      if (s(i) > relative_tol * s(0)) ++rank;
    }
  }
  return svd.matrixV().rightCols(cols - rank);
}

namespace {

// Minimum-norm least squares restricted to the columns in `passive`.
Eigen::VectorXd SubsetSolve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                            const std::vector<int>& passive, bool* deficient) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(a.cols());
  if (passive.empty()) return x;
  Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(passive.size()));
  for (std::size_t k = 0; k < passive.size(); ++k) sub.col(k) = a.col(passive[k]);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(sub);
  cod.setThreshold(kRankTolerance);
  const Eigen::VectorXd s = cod.solve(b);
  if (deficient && cod.rank() < static_cast<Eigen::Index>(passive.size())) {
    *deficient = true;
  }
  for (std::size_t k = 0; k < passive.size(); ++k) x(passive[k]) = s(k);
  return x;
}

}  // namespace

LeastSquaresResult PartiallyNonnegativeLeastSquares(
    const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
    const std::vector<bool>& nonnegative) {
  const int n = static_cast<int>(a.cols());
  if (static_cast<int>(nonnegative.size()) != n || a.rows() != b.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "least squares: shape mismatch");
  }
  // Lawson-Hanson active set; unconstrained coordinates never leave the
  // passive set.
  std::vector<bool> in_passive(n, false);
  for (int i = 0; i < n; ++i) in_passive[i] = !nonnegative[i];
  auto passive_list = [&] {
    std::vector<int> p;
    for (int i = 0; i < n; ++i) {
      if (in_passive[i]) p.push_back(i);
    }
    return p;
  };

  Eigen::VectorXd x = SubsetSolve(a, b, passive_list(), nullptr);
  const double scale = std::max(1.0, a.norm() * std::max(1.0, b.norm()));
  const double dual_tol = 1e-13 * scale;
  for (int outer = 0; outer < 3 * n + 10; ++outer) {
    const Eigen::VectorXd w = a.transpose() * (b - a * x);
    int best = -1;
    double best_w = dual_tol;
    for (int i = 0; i < n; ++i) {
      if (nonnegative[i] && !in_passive[i] && w(i) > best_w) {
        best_w = w(i);
        best = i;
      }
    }
    if (best < 0) break;
    in_passive[best] = true;
    for (int inner = 0; inner < 3 * n + 10; ++inner) {
      const Eigen::VectorXd s = SubsetSolve(a, b, passive_list(), nullptr);
      double alpha = 1.0;
      bool feasible = true;
      for (int i = 0; i < n; ++i) {
        if (nonnegative[i] && in_passive[i] && s(i) <= 0.0) {
          feasible = false;
          const double denom = x(i) - s(i);
          if (denom > 0.0) alpha = std::min(alpha, x(i) / denom);
        }
      }
      if (feasible) {
        x = s;
        break;
      }
      alpha = std::clamp(alpha, 0.0, 1.0);
      x += alpha * (s - x);
      for (int i = 0; i < n; ++i) {
        if (nonnegative[i] && in_passive[i] && x(i) <= 1e-15 * scale) {
          in_passive[i] = false;
          x(i) = 0.0;
        }
      }
    }
  }

  LeastSquaresResult result;
  result.solution = SubsetSolve(a, b, passive_list(), &result.rank_deficient);
  for (int i = 0; i < n; ++i) {
    if (nonnegative[i] && result.solution(i) < 0.0) result.solution(i) = 0.0;
  }
  result.residual_norm = (a * result.solution - b).norm();
  return result;
}

double MaxPsdStep(const Eigen::MatrixXd& x, const Eigen::MatrixXd& dx) {
  Eigen::LLT<Eigen::MatrixXd> llt(x);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kNumericalFailure, "MaxPsdStep: base not PD");
  }
  const Eigen::MatrixXd l_inv_dx =
      llt.matrixL().solve(Symmetrize(dx));
  const Eigen::MatrixXd scaled =
      llt.matrixL().solve(l_inv_dx.transpose()).transpose();
  const double lmin = MinEigenvalue(scaled);
  if (lmin >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

}  // namespace bmsdp
