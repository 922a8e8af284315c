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

#include "bmsdp/certification.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "bmsdp/error.h"
#include "bmsdp/linalg.h"

namespace bmsdp {
namespace {

Eigen::VectorXd Residuals(const ConicSdpProblem& problem,
                          const FactorizedPoint& point) {
  return ApplyMap(problem, Lift(point)) - problem.rhs();
}

struct StationaritySystem {
  Eigen::MatrixXd columns;  // one column per constraint
  Eigen::VectorXd base;     // stationarity vector at lambda = 0
};

// Stacks vec(2 S_j Y_j) on factorized blocks, vec(S_j X_j) on tail blocks
// and s on the free part, each affine in lambda: base - columns * lambda.
StationaritySystem BuildStationarity(const ConicSdpProblem& problem,
                                     const FactorizedPoint& point) {
  const BlockStructure& s = problem.structure;
  const int m = problem.num_constraints();
  Eigen::Index length = s.free_dim;
  std::vector<Eigen::MatrixXd> right;  // Y_j or X_j
  for (int j = 0; j < s.num_blocks(); ++j) {
    right.push_back(s.is_factorized(j) ? point.factors[j]
                                       : point.tail_blocks[j - s.factorized_count].ToDense());
    length += right.back().size();
  }
  StationaritySystem sys;
  sys.columns = Eigen::MatrixXd::Zero(length, m);
  sys.base = Eigen::VectorXd::Zero(length);
  Eigen::Index offset = 0;
  for (int j = 0; j < s.num_blocks(); ++j) {
    const double factor = s.is_factorized(j) ? 2.0 : 1.0;
    const Eigen::MatrixXd& r = right[j];
    sys.base.segment(offset, r.size()) = (factor * problem.cost_block(j) * r).reshaped();
    for (int i = 0; i < m; ++i) {
      const SparseSymmetric& a = problem.constraints[i].blocks[j];
      if (a.empty()) continue;
      Eigen::MatrixXd ar = Eigen::MatrixXd::Zero(r.rows(), r.cols());
      a.MultiplyAddTo(factor, r, ar);
      sys.columns.col(i).segment(offset, r.size()) = ar.reshaped();
    }
    offset += r.size();
  }
  if (s.free_dim > 0) {
    sys.base.tail(s.free_dim) = problem.cost.free;
    for (int i = 0; i < m; ++i) {
      sys.columns.col(i).tail(s.free_dim) = problem.constraints[i].free;
    }
  }
  return sys;
}

}  // namespace

std::vector<int> ActiveSet(const ConicSdpProblem& problem,
                           const FactorizedPoint& point, double tol) {
  const Eigen::VectorXd c = Residuals(problem, point);
  std::vector<int> active;
  for (int i = 0; i < problem.num_constraints(); ++i) {
    if (!problem.is_inequality(i) ||
        std::abs(c(i)) <= tol * (1.0 + std::abs(problem.constraints[i].rhs))) {
      active.push_back(i);
    }
  }
  return active;
}

Multipliers EstimateMultipliers(const ConicSdpProblem& problem,
                                const FactorizedPoint& point,
                                double active_tol) {
  Multipliers out;
  out.source = MultiplierSource::kLeastSquares;
  out.active_set = ActiveSet(problem, point, active_tol);
  out.lambda = Eigen::VectorXd::Zero(problem.num_constraints());
  const StationaritySystem sys = BuildStationarity(problem, point);
  const int k = static_cast<int>(out.active_set.size());
  if (k == 0) {
    out.residual = sys.base.norm();
    return out;
  }
  Eigen::MatrixXd a(sys.base.size(), k);
  std::vector<bool> nonnegative(k);
  for (int c = 0; c < k; ++c) {
    a.col(c) = sys.columns.col(out.active_set[c]);
    nonnegative[c] = problem.is_inequality(out.active_set[c]);
  }
  const LeastSquaresResult ls = PartiallyNonnegativeLeastSquares(a, sys.base, nonnegative);
  for (int c = 0; c < k; ++c) out.lambda(out.active_set[c]) = ls.solution(c);
  out.residual = ls.residual_norm;
  out.rank_deficient = ls.rank_deficient;
  return out;
}

BlockElement SlackMatrix(const ConicSdpProblem& problem,
                         const Eigen::VectorXd& lambda) {
  const BlockElement adj = ApplyAdjoint(problem, lambda);
  BlockElement out;
  for (int j = 0; j < problem.structure.num_blocks(); ++j) {
    out.blocks.push_back(
        SymmetricMatrix::FromDense(problem.cost_block(j) - adj.blocks[j].ToDense()));
  }
  out.free = Eigen::VectorXd::Zero(problem.structure.free_dim);
  if (problem.structure.free_dim > 0) out.free = problem.cost.free - adj.free;
  return out;
}

KktResiduals ComputeKktResiduals(const ConicSdpProblem& problem,
                                 const FactorizedPoint& point,
                                 const Multipliers& multipliers) {
  const BlockStructure& s = problem.structure;
  const BlockElement slack = SlackMatrix(problem, multipliers.lambda);
  KktResiduals r;
  for (int j = 0; j < s.num_blocks(); ++j) {
    const Eigen::MatrixXd sj = slack.blocks[j].ToDense();
    if (s.is_factorized(j)) {
      r.stationarity = std::max(r.stationarity, (sj * point.factors[j]).norm());
    } else {
      const double inner = Inner(slack.blocks[j], point.tail_blocks[j - s.factorized_count]);
      r.complementarity = std::max(r.complementarity, std::abs(inner));
    }
  }
  const Eigen::VectorXd c = Residuals(problem, point);
  double violation = 0.0;
  for (int i = 0; i < problem.num_constraints(); ++i) {
    const double lam = multipliers.lambda(i);
    if (problem.is_inequality(i)) {
      const double v = std::min(0.0, c(i));
      violation += v * v;
      r.complementarity = std::max(r.complementarity, std::abs(lam * c(i)));
      r.sign = std::max(r.sign, -lam);
    } else {
      violation += c(i) * c(i);
    }
  }
  r.feasibility = std::sqrt(violation);
  r.free = slack.free.size() > 0 ? slack.free.norm() : 0.0;
  return r;
}

namespace {

// Jacobian rows vec(2 A_i Y) over the factorized blocks, for active i.
Eigen::MatrixXd FactorJacobian(const ConicSdpProblem& problem,
                               const FactorizedPoint& point,
                               const std::vector<int>& active) {
  Eigen::Index cols = 0;
  for (const Eigen::MatrixXd& y : point.factors) cols += y.size();
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(active.size()), cols);
  for (std::size_t r = 0; r < active.size(); ++r) {
    Eigen::Index offset = 0;
    for (std::size_t j = 0; j < point.factors.size(); ++j) {
      const Eigen::MatrixXd& y = point.factors[j];
      const SparseSymmetric& a = problem.constraints[active[r]].blocks[j];
      if (!a.empty()) {
        Eigen::MatrixXd ay = Eigen::MatrixXd::Zero(y.rows(), y.cols());
        a.MultiplyAddTo(2.0, y, ay);
        jac.row(r).segment(offset, y.size()) = ay.reshaped().transpose();
      }
      offset += y.size();
    }
  }
  return jac;
}

}  // namespace

SecondOrderResult SecondOrderCheck(const ConicSdpProblem& problem,
                                   const FactorizedPoint& point,
                                   const Multipliers& multipliers,
                                   double tol) {
  SecondOrderResult out;
  const BlockElement slack = SlackMatrix(problem, multipliers.lambda);
  Eigen::Index size = 0;
  for (const Eigen::MatrixXd& y : point.factors) size += y.size();
  if (size == 0) {
    out.vacuous = true;
    return out;
  }
  // Hessian of U -> sum_j 2 S_j . U_j U_j^T in column-major coordinates.
  Eigen::MatrixXd hessian = Eigen::MatrixXd::Zero(size, size);
  Eigen::Index offset = 0;
  for (std::size_t j = 0; j < point.factors.size(); ++j) {
    const Eigen::MatrixXd sj = slack.blocks[j].ToDense();
    const Eigen::Index n = point.factors[j].rows();
    for (Eigen::Index c = 0; c < point.factors[j].cols(); ++c) {
      hessian.block(offset + c * n, offset + c * n, n, n) = 2.0 * sj;
    }
    offset += point.factors[j].size();
  }
  const std::vector<int> active = ActiveSet(problem, point);
  Eigen::MatrixXd basis;
  if (active.empty()) {
    basis = Eigen::MatrixXd::Identity(size, size);
  } else {
    basis = NullSpace(FactorJacobian(problem, point, active));
  }
  out.null_space_dim = static_cast<int>(basis.cols());
  if (out.null_space_dim == 0) {
    out.vacuous = true;
    return out;
  }
  const Eigen::MatrixXd reduced = Symmetrize(basis.transpose() * hessian * basis);
  const SymmetricEigen eig = EigenDecompose(reduced);
  out.min_eigenvalue = eig.values(0);
  out.passes = out.min_eigenvalue >= -tol * (1.0 + SpectralNorm(hessian));
  const Eigen::VectorXd worst = basis * eig.vectors.col(0);
  offset = 0;
  for (const Eigen::MatrixXd& y : point.factors) {
    out.worst_direction.push_back(worst.segment(offset, y.size()).reshaped(y.rows(), y.cols()));
    offset += y.size();
  }
  return out;
}

LicqResult LicqCheck(const ConicSdpProblem& problem,
                     const FactorizedPoint& point, double active_tol) {
  const BlockStructure& s = problem.structure;
  const std::vector<int> active = ActiveSet(problem, point, active_tol);
  LicqResult out;
  out.active_count = static_cast<int>(active.size());
  if (active.empty()) return out;
  // Gradients with respect to every solver variable: factors, full-rank
  // factors of the tail blocks, and the free vector.
  FactorizedPoint expanded;
  for (int j = 0; j < s.num_blocks(); ++j) {
    if (s.is_factorized(j)) {
      expanded.factors.push_back(point.factors[j]);
    } else {
      const SymmetricEigen eig = EigenDecompose(point.tail_blocks[j - s.factorized_count].ToDense());
      expanded.factors.push_back(eig.vectors * eig.values.cwiseMax(0.0).cwiseSqrt().asDiagonal());
    }
  }
  const Eigen::MatrixXd block_jac = FactorJacobian(problem, expanded, active);
  Eigen::MatrixXd jac(block_jac.rows(), block_jac.cols() + s.free_dim);
  jac.leftCols(block_jac.cols()) = block_jac;
  for (std::size_t r = 0; r < active.size(); ++r) {
    if (s.free_dim > 0) jac.row(r).tail(s.free_dim) = problem.constraints[active[r]].free.transpose();
  }
  out.jacobian_rank = NumericalRank(jac);
  out.holds = out.jacobian_rank == out.active_count;
  return out;
}

const char* VerdictName(Verdict verdict) {
  switch (verdict) {
    case Verdict::kGlobalOptimal: return "GlobalOptimal";
    case Verdict::kEscapable: return "Escapable";
    case Verdict::kIndeterminate: return "Indeterminate";
  }
  return "Unknown";
}

Certificate Certify(const ConicSdpProblem& problem,
                    const FactorizedPoint& point,
                    const Multipliers& multipliers,
                    const CertifyOptions& options) {
  const BlockStructure& s = problem.structure;
  Certificate cert;
  cert.kkt = ComputeKktResiduals(problem, point, multipliers);
  const PrimalPoint x = Lift(point);
  cert.objective = Inner(BlockElement{problem.cost.blocks, problem.cost.free}, x);
  cert.dual_objective = problem.rhs().dot(multipliers.lambda);
  cert.duality_gap = cert.objective - cert.dual_objective;

  const double cost_scale = 1.0 + CostNorm(problem);
  const Eigen::VectorXd b = problem.rhs();
  const double b_scale = 1.0 + (b.size() > 0 ? b.cwiseAbs().maxCoeff() : 0.0);
  const double tol = options.kkt_tol;
  cert.residuals_pass = cert.kkt.stationarity <= tol * cost_scale &&
                        cert.kkt.free <= tol * cost_scale &&
                        cert.kkt.feasibility <= tol * b_scale &&
                        cert.kkt.complementarity <= tol * (1.0 + std::abs(cert.objective)) &&
                        cert.kkt.sign <= tol;

  const BlockElement slack = SlackMatrix(problem, multipliers.lambda);
  bool all_psd = true;
  double worst_factorized = std::numeric_limits<double>::infinity();
  cert.slack_min_eig = std::numeric_limits<double>::infinity();
  for (int j = 0; j < s.num_blocks(); ++j) {
    const SymmetricEigen eig = EigenDecompose(slack.blocks[j].ToDense());
    cert.slack_spectrum.push_back(eig.values);
    if (eig.values.size() == 0) continue;
    const double norm = std::max(std::abs(eig.values(0)), std::abs(eig.values(eig.values.size() - 1)));
    const double relative = eig.values(0) / (1.0 + norm);
    cert.slack_min_eig = std::min(cert.slack_min_eig, relative);
    if (relative >= -options.cert_tol) continue;
    all_psd = false;
    if (s.is_factorized(j) && relative < worst_factorized) {
      worst_factorized = relative;
      cert.escape = EscapeInfo{j, eig.vectors.col(0), eig.values(0)};
    }
  }
  if (!std::isfinite(cert.slack_min_eig)) cert.slack_min_eig = 0.0;
  cert.licq = LicqCheck(problem, point, options.active_tol).holds;
  if (cert.residuals_pass && all_psd) {
    cert.verdict = Verdict::kGlobalOptimal;
    cert.escape.reset();
  } else if (cert.escape) {
    cert.verdict = Verdict::kEscapable;
  } else {
    cert.verdict = Verdict::kIndeterminate;
  }
  return cert;
}

EscapeStep EscapeDirection(const FactorizedPoint& point,
                           const Certificate& certificate) {
  if (!certificate.escape) {
    throw Error(ErrorCode::kInvalidArgument, "escape: certificate is not Escapable");
  }
  const EscapeInfo& info = *certificate.escape;
  const Eigen::MatrixXd& y = point.factors.at(info.block);
  EscapeStep step;
  step.block = info.block;
  step.column = info.eigenvector;
  if (NumericalRank(y) < y.cols()) {
    const Eigen::MatrixXd kernel = NullSpace(y);
    step.kind = EscapeKind::kKernelDirection;
    step.direction = info.eigenvector * kernel.col(0).transpose();
  } else {
    step.kind = EscapeKind::kRankIncrement;
  }
  return step;
}

}  // namespace bmsdp
