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

#include "bmsdp/factorization.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "bmsdp/error.h"
#include "bmsdp/linalg.h"
#include "bmsdp/oracle.h"

namespace bmsdp {

std::vector<int> FactorizedPoint::ranks() const {
  std::vector<int> out;
  out.reserve(factors.size());
  for (const Eigen::MatrixXd& y : factors) out.push_back(static_cast<int>(y.cols()));
  return out;
}

const char* RankBoundMethodName(RankBoundMethod method) {
  switch (method) {
    case RankBoundMethod::kExactEnumeration: return "ExactEnumeration";
    case RankBoundMethod::kRankUpperBound: return "RankUpperBound";
    case RankBoundMethod::kConicFormula: return "ConicFormula";
  }
  return "Unknown";
}

int MinimalRank(long long m_prime, int n) {
  const long long target = std::min(m_prime, Triangular(n));
  int p = 1;
  while (p < n && Triangular(p) <= target) ++p;
  return p;
}

PrimalPoint Lift(const FactorizedPoint& point) {
  PrimalPoint out;
  for (const Eigen::MatrixXd& y : point.factors) {
    out.blocks.push_back(SymmetricMatrix::FromDense(y * y.transpose()));
  }
  for (const SymmetricMatrix& x : point.tail_blocks) out.blocks.push_back(x);
  out.free = point.free;
  return out;
}

Eigen::MatrixXd FactorPsd(const Eigen::MatrixXd& x, int rank, double tol) {
  if (x.rows() != x.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "factor: matrix must be square");
  }
  if (rank < 1) throw Error(ErrorCode::kInvalidArgument, "factor: rank must be >= 1");
  const int n = static_cast<int>(x.rows());
  const SymmetricEigen eig = EigenDecompose(x);
  const double top = n > 0 ? std::max(std::abs(eig.values(0)), std::abs(eig.values(n - 1))) : 0.0;
  if (n > 0 && eig.values(0) < -tol * std::max(1.0, top)) {
    throw Error(ErrorCode::kNotPsd, "factor: eigenvalue " + std::to_string(eig.values(0)) +
                                        " below -tolerance");
  }
  std::vector<int> kept;
  for (int i = n - 1; i >= 0; --i) {
    if (eig.values(i) > kRankTolerance * top && eig.values(i) > 0.0) kept.push_back(i);
  }
  if (static_cast<int>(kept.size()) > rank) {
    throw Error(ErrorCode::kRankTooSmall, "factor: numerical rank " +
                                              std::to_string(kept.size()) +
                                              " exceeds requested rank " +
                                              std::to_string(rank));
  }
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(n, rank);
  for (std::size_t c = 0; c < kept.size(); ++c) {
    y.col(c) = std::sqrt(eig.values(kept[c])) * eig.vectors.col(kept[c]);
  }
  return y;
}

FactorizedPoint Factor(const PrimalPoint& x, const BlockStructure& structure,
                       std::span<const int> ranks, double tol) {
  if (static_cast<int>(x.blocks.size()) != structure.num_blocks() ||
      static_cast<int>(ranks.size()) != structure.factorized_count) {
    throw Error(ErrorCode::kDimensionMismatch, "factor: layout mismatch");
  }
  FactorizedPoint out;
  for (int j = 0; j < structure.factorized_count; ++j) {
    out.factors.push_back(FactorPsd(x.blocks[j].ToDense(), ranks[j], tol));
  }
  for (int j = structure.factorized_count; j < structure.num_blocks(); ++j) {
    out.tail_blocks.push_back(x.blocks[j]);
  }
  out.free = x.free;
  return out;
}

FactorizedPoint AppendColumn(const FactorizedPoint& point, int block,
                             const Eigen::VectorXd& v, double step) {
  if (block < 0 || block >= static_cast<int>(point.factors.size())) {
    throw Error(ErrorCode::kInvalidArgument, "append_column: block out of range");
  }
  const Eigen::MatrixXd& y = point.factors[block];
  if (v.size() != y.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "append_column: vector length mismatch");
  }
  FactorizedPoint out = point;
  Eigen::MatrixXd grown(y.rows(), y.cols() + 1);
  grown << y, step * v;
  out.factors[block] = std::move(grown);
  return out;
}

namespace {

Eigen::VectorXd VectorizeConstraint(const ConicSdpProblem& problem, int i) {
  const BlockStructure& s = problem.structure;
  long long length = s.free_dim;
  for (int n : s.psd_sizes) length += Triangular(n);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(length);
  long long offset = 0;
  const Constraint& c = problem.constraints[i];
  for (int j = 0; j < s.num_blocks(); ++j) {
    for (const SparseEntry& e : c.blocks[j].entries()) {
      const long long idx = offset + Triangular(e.col) + e.row;
      out(idx) += e.row == e.col ? e.value : std::sqrt(2.0) * e.value;
    }
    offset += Triangular(s.psd_sizes[j]);
  }
  if (s.free_dim > 0) out.tail(s.free_dim) = c.free;
  return out;
}

}  // namespace

int ConstraintRank(const ConicSdpProblem& problem,
                   std::span<const int> indices) {
  if (indices.empty()) return 0;
  Eigen::MatrixXd stacked;
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const Eigen::VectorXd v = VectorizeConstraint(problem, indices[r]);
    if (r == 0) stacked.resize(static_cast<Eigen::Index>(indices.size()), v.size());
    stacked.row(r) = v.transpose();
  }
  return NumericalRank(stacked);
}

bool SimultaneouslyActive(const ConicSdpProblem& problem,
                          std::span<const int> subset, double activity_tol) {
  if (subset.empty()) return true;
  // min sum_{i in subset} (A_i(X) - b_i) over the feasible set intersected
  // with a large trace ball. The value is 0 iff the subset can be tight at
  // once.
  ConicSdpProblem aux = problem;
  aux.name = problem.name + "-activity";
  for (SymmetricMatrix& c : aux.cost.blocks) c = SymmetricMatrix(c.dim());
  aux.cost.free.setZero();
  double offset = 0.0;
  double scale = 1.0;
  for (int i : subset) {
    const Constraint& c = problem.constraints.at(i);
    for (std::size_t j = 0; j < c.blocks.size(); ++j) {
      for (const SparseEntry& e : c.blocks[j].entries()) {
        aux.cost.blocks[j].at(e.row, e.col) += e.value;
      }
    }
    if (c.free.size() > 0) aux.cost.free += c.free;
    offset += c.rhs;
    scale += std::abs(c.rhs);
  }
  const Eigen::VectorXd b = problem.rhs();
  const double b_inf = b.size() > 0 ? b.cwiseAbs().maxCoeff() : 0.0;
  int total_dim = 0;
  Constraint ball;
  for (int n : problem.structure.psd_sizes) {
    SparseSymmetric block(n);
    for (int k = 0; k < n; ++k) block.Add(k, k, -1.0);
    block.Normalize();
    ball.blocks.push_back(std::move(block));
    total_dim += n;
  }
  ball.free = Eigen::VectorXd::Zero(problem.structure.free_dim);
  ball.rhs = -1e4 * std::max(1, total_dim) * (1.0 + b_inf);
  ball.kind = ConstraintKind::kInequality;
  aux.constraints.push_back(std::move(ball));
  try {
    const OracleSolution sol = OracleSolve(aux);
    return sol.objective - offset <= activity_tol * scale;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kNotStrictlyFeasible ||
        e.code() == ErrorCode::kMaxIterations) {
      return false;
    }
    throw;
  }
}

RankBoundReport MPrimeInequality(const ConicSdpProblem& problem,
                                 const MPrimeOptions& options) {
  const BlockStructure& s = problem.structure;
  if (s.num_blocks() != 1 || s.free_dim != 0) {
    throw Error(ErrorCode::kUnsupportedStructure,
                "m' enumeration needs a single PSD block and no free variables");
  }
  const int n = s.psd_sizes[0];
  const int m = problem.num_constraints();
  RankBoundReport report;
  std::vector<int> all(m);
  for (int i = 0; i < m; ++i) all[i] = i;
  const int full_rank = ConstraintRank(problem, all);

  auto finish = [&](long long m_prime, RankBoundMethod method) {
    report.m_prime = m_prime;
    report.method = method;
    report.ranks.assign(s.factorized_count, MinimalRank(m_prime, n));
    return report;
  };

  const int m1 = problem.num_equalities();
  const int m2 = m - m1;
  if (m2 == 0) return finish(full_rank, RankBoundMethod::kExactEnumeration);
  if (m > options.exact_enumeration_cap) {
    return finish(std::min(m, full_rank), RankBoundMethod::kRankUpperBound);
  }

  std::vector<int> equalities(m1);
  for (int i = 0; i < m1; ++i) equalities[i] = i;
  auto members = [&](std::uint32_t mask) {
    std::vector<int> idx;
    for (int t = 0; t < m2; ++t) {
      if (mask & (1u << t)) idx.push_back(m1 + t);
    }
    return idx;
  };
  auto rank_of = [&](std::uint32_t mask) {
    std::vector<int> idx = equalities;
    for (int i : members(mask)) idx.push_back(i);
    return ConstraintRank(problem, idx);
  };

  int best = ConstraintRank(problem, equalities);
  if (options.exhaustive) {
    for (std::uint32_t mask = 1; mask < (1u << m2); ++mask) {
      const int r = rank_of(mask);
      if (r <= best) continue;
      const std::vector<int> idx = members(mask);
      if (SimultaneouslyActive(problem, idx, options.activity_tol)) best = r;
    }
    return finish(best, RankBoundMethod::kExactEnumeration);
  }

  // Level-wise search: a subset is only tested when every subset obtained by
  // dropping one element is simultaneously active, since activity is
  // inherited by subsets.
  std::vector<std::uint32_t> level = {0u};
  std::unordered_set<std::uint32_t> feasible = {0u};
  for (int size = 1; size <= m2 && !level.empty() && best < full_rank; ++size) {
    std::vector<std::uint32_t> candidates;
    std::unordered_set<std::uint32_t> seen;
    for (std::uint32_t base : level) {
      for (int t = 0; t < m2; ++t) {
        const std::uint32_t bit = 1u << t;
        if (base & bit) continue;
        const std::uint32_t cand = base | bit;
        if (!seen.insert(cand).second) continue;
        bool all_sub = true;
        for (int u = 0; u < m2 && all_sub; ++u) {
          const std::uint32_t ub = 1u << u;
          if (cand & ub) all_sub = feasible.count(cand & ~ub) > 0;
        }
        if (all_sub) candidates.push_back(cand);
      }
    }
    std::sort(candidates.begin(), candidates.end());
    std::vector<std::uint32_t> next;
    for (std::uint32_t cand : candidates) {
      if (SimultaneouslyActive(problem, members(cand), options.activity_tol)) {
        feasible.insert(cand);
        next.push_back(cand);
        best = std::max(best, rank_of(cand));
      }
    }
    level = std::move(next);
  }
  return finish(best, RankBoundMethod::kExactEnumeration);
}

RankBoundReport MPrimeConic(const ConicSdpProblem& problem,
                            const std::vector<std::vector<int>>& tail_ranks) {
  const BlockStructure& s = problem.structure;
  if (static_cast<int>(tail_ranks.size()) != s.tail_count()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "m' conic: expected " + std::to_string(s.tail_count()) + " rank sets");
  }
  long long m_prime = problem.num_constraints() - s.free_dim;
  for (int t = 0; t < s.tail_count(); ++t) {
    const std::vector<int>& range = tail_ranks[t];
    if (range.empty()) {
      throw Error(ErrorCode::kEmptyRange,
                  "m' conic: empty rank range for tail block " + std::to_string(t));
    }
    const int n = s.psd_sizes[s.factorized_count + t];
    for (int r : range) {
      if (r < 0 || r > n) {
        throw Error(ErrorCode::kInvalidArgument,
                    "m' conic: rank " + std::to_string(r) + " outside [0, " +
                        std::to_string(n) + "]");
      }
    }
    // tau is increasing, so the maximum uses the smallest admissible rank.
    m_prime -= Triangular(*std::min_element(range.begin(), range.end()));
  }
  RankBoundReport report;
  report.m_prime = m_prime;
  report.method = RankBoundMethod::kConicFormula;
  for (int j = 0; j < s.factorized_count; ++j) {
    report.ranks.push_back(MinimalRank(m_prime, s.psd_sizes[j]));
  }
  return report;
}

RankBoundReport DefaultRankBound(const ConicSdpProblem& problem) {
  const BlockStructure& s = problem.structure;
  if (s.num_blocks() == 1 && s.free_dim == 0) {
    std::vector<int> all(problem.num_constraints());
    for (int i = 0; i < problem.num_constraints(); ++i) all[i] = i;
    RankBoundReport report;
    report.m_prime = ConstraintRank(problem, all);
    report.method = problem.num_inequalities() == 0
                        ? RankBoundMethod::kExactEnumeration
                        : RankBoundMethod::kRankUpperBound;
    report.ranks.assign(s.factorized_count, MinimalRank(report.m_prime, s.psd_sizes[0]));
    return report;
  }
  std::vector<std::vector<int>> zero_ranks(s.tail_count(), std::vector<int>{0});
  return MPrimeConic(problem, zero_ranks);
}

}  // namespace bmsdp
