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

#ifndef BMSDP_FACTORIZATION_H_
#define BMSDP_FACTORIZATION_H_

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "bmsdp/model.h"

namespace bmsdp {

// (Y_1..Y_k, X_{k+1}..X_l, x): low-rank factors for the factorized blocks,
// explicit matrices for the tail blocks, and the free vector.
struct FactorizedPoint {
  std::vector<Eigen::MatrixXd> factors;
  std::vector<SymmetricMatrix> tail_blocks;
  Eigen::VectorXd free;

  std::vector<int> ranks() const;
};

enum class RankBoundMethod { kExactEnumeration, kRankUpperBound, kConicFormula };

const char* RankBoundMethodName(RankBoundMethod method);

struct RankBoundReport {
  long long m_prime = 0;
  std::vector<int> ranks;  // minimal p_j per factorized block
  RankBoundMethod method = RankBoundMethod::kRankUpperBound;
};

constexpr long long Triangular(long long k) { return k * (k + 1) / 2; }

// Least p with tau(p) > min(m_prime, tau(n)), capped at n.
int MinimalRank(long long m_prime, int n);

PrimalPoint Lift(const FactorizedPoint& point);

// Y with Y Y^T = x (to tolerance) and `rank` columns; columns past the
// numerical rank are zero. Throws kNotPsd / kRankTooSmall.
Eigen::MatrixXd FactorPsd(const Eigen::MatrixXd& x, int rank,
                          double tol = 1e-9);

FactorizedPoint Factor(const PrimalPoint& x, const BlockStructure& structure,
                       std::span<const int> ranks, double tol = 1e-9);

// Adds the column step * v to factor `block`.
FactorizedPoint AppendColumn(const FactorizedPoint& point, int block,
                             const Eigen::VectorXd& v, double step);

// Rank of the vectorized constraints with the given indices (all blocks and
// the free part). Off-diagonals are weighted so that the Euclidean inner
// product of the vectors equals the trace inner product.
int ConstraintRank(const ConicSdpProblem& problem,
                   std::span<const int> indices);

struct MPrimeOptions {
  int exact_enumeration_cap = 20;
  // Optimal value of the activity subproblem below this (times 1 + |b|)
  // counts as "simultaneously active".
  double activity_tol = 1e-6;
  // Try every subset instead of pruning by monotonicity (test oracle).
  bool exhaustive = false;
};

// Decides whether the inequalities in `subset` can be tight simultaneously
// at a feasible point (all equalities are always imposed).
bool SimultaneouslyActive(const ConicSdpProblem& problem,
                          std::span<const int> subset,
                          double activity_tol = 1e-6);

// Largest number of linearly independent constraints that can be active at
// once, for single-block problems without free variables.
RankBoundReport MPrimeInequality(const ConicSdpProblem& problem,
                                 const MPrimeOptions& options = {});

// max over the supplied tail ranks of m - d - sum tau(r_j). One rank set
// per tail block.
RankBoundReport MPrimeConic(const ConicSdpProblem& problem,
                            const std::vector<std::vector<int>>& tail_ranks);

// Cheap starting ranks for the staircase: rank-based m' for single-block
// problems, the conic formula with all tail ranks allowed to be zero
// otherwise.
RankBoundReport DefaultRankBound(const ConicSdpProblem& problem);

}  // namespace bmsdp

#endif  // BMSDP_FACTORIZATION_H_
