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

#ifndef BMSDP_MODEL_H_
#define BMSDP_MODEL_H_

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace bmsdp {

enum class ConstraintKind { kEquality, kInequality };

// Block layout of a conic SDP: PSD blocks of the given sizes (the first
// `factorized_count` of them are handled by low-rank factors) and a free
// vector of dimension `free_dim`.
struct BlockStructure {
  std::vector<int> psd_sizes;
  int factorized_count = 0;
  int free_dim = 0;

  int num_blocks() const { return static_cast<int>(psd_sizes.size()); }
  int tail_count() const { return num_blocks() - factorized_count; }
  bool is_factorized(int block) const { return block < factorized_count; }

  bool operator==(const BlockStructure&) const = default;
};

// Dense symmetric matrix in packed upper-triangular storage; only tau(n)
// entries exist so symmetry cannot be violated.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(int dim);

  // Reads the upper triangle of `dense`.
  static SymmetricMatrix FromDense(const Eigen::MatrixXd& dense);
  static SymmetricMatrix Identity(int dim);

  int dim() const { return dim_; }
  double operator()(int i, int j) const { return packed_[Index(i, j)]; }
  double& at(int i, int j) { return packed_[Index(i, j)]; }

  Eigen::MatrixXd ToDense() const;
  std::span<const double> packed() const { return packed_; }

  bool operator==(const SymmetricMatrix&) const = default;

 private:
  static int Index(int i, int j) {
    return i <= j ? j * (j + 1) / 2 + i : i * (i + 1) / 2 + j;
  }

  int dim_ = 0;
  std::vector<double> packed_;
};

// Trace inner product of two symmetric matrices.
double Inner(const SymmetricMatrix& a, const SymmetricMatrix& b);

struct SparseEntry {
  int row = 0;  // row <= col, 0-based
  int col = 0;
  double value = 0.0;

  bool operator==(const SparseEntry&) const = default;
};

// Sparse symmetric matrix given by its upper-triangular coordinate list.
// An off-diagonal entry (i, j, v) stands for both A(i, j) = A(j, i) = v.
class SparseSymmetric {
 public:
  SparseSymmetric() = default;
  explicit SparseSymmetric(int dim) : dim_(dim) {}

  static SparseSymmetric FromDense(const Eigen::MatrixXd& dense);

  // Accumulates into (min(i,j), max(i,j)). Call Normalize() afterwards.
  void Add(int i, int j, double value);
  // Sorts by (col, row), merges duplicates and drops exact zeros.
  void Normalize();

  int dim() const { return dim_; }
  bool empty() const { return entries_.empty(); }
  const std::vector<SparseEntry>& entries() const { return entries_; }

  double Dot(const SymmetricMatrix& x) const;
  double Dot(const Eigen::MatrixXd& x) const;  // x symmetric
  // <A, Y Y^T> without forming Y Y^T.
  double DotGram(const Eigen::MatrixXd& y) const;
  // <A, U Y^T + Y U^T>.
  double DotSymmetricProduct(const Eigen::MatrixXd& u,
                             const Eigen::MatrixXd& y) const;
  // out += scale * A
  void AddScaledTo(double scale, Eigen::MatrixXd& out) const;
  // out += scale * A * y
  void MultiplyAddTo(double scale, const Eigen::MatrixXd& y,
                     Eigen::MatrixXd& out) const;
  Eigen::MatrixXd ToDense() const;
  double SquaredFrobeniusNorm() const;

  bool operator==(const SparseSymmetric&) const = default;

 private:
  int dim_ = 0;
  std::vector<SparseEntry> entries_;
};

struct Constraint {
  std::vector<SparseSymmetric> blocks;  // one per PSD block
  Eigen::VectorXd free;                 // length free_dim
  double rhs = 0.0;
  ConstraintKind kind = ConstraintKind::kEquality;
};

struct Cost {
  std::vector<SymmetricMatrix> blocks;
  Eigen::VectorXd free;
};

// An element of S^{n_1} x ... x S^{n_l} x R^d. Used for primal points,
// adjoint images and slack matrices.
struct BlockElement {
  std::vector<SymmetricMatrix> blocks;
  Eigen::VectorXd free;
};

using PrimalPoint = BlockElement;

double Inner(const BlockElement& a, const BlockElement& b);

// min <C, X>  s.t.  A(X) - b in {0}^{m1} x R_+^{m2},  X_j PSD, x free.
// Constraints are stored equalities first; inequalities read A_i(X) >= b_i.
struct ConicSdpProblem {
  std::string name;
  BlockStructure structure;
  Cost cost;
  std::vector<Constraint> constraints;

  int num_constraints() const { return static_cast<int>(constraints.size()); }
  int num_equalities() const;
  int num_inequalities() const { return num_constraints() - num_equalities(); }
  bool is_inequality(int i) const {
    return constraints[i].kind == ConstraintKind::kInequality;
  }
  Eigen::VectorXd rhs() const;
  Eigen::MatrixXd cost_block(int j) const { return cost.blocks[j].ToDense(); }
};

bool operator==(const ConicSdpProblem& a, const ConicSdpProblem& b);

// Incremental construction. Build() returns the canonical problem:
// equalities moved before inequalities (stable) and entry lists normalized.
class ProblemBuilder {
 public:
  explicit ProblemBuilder(BlockStructure structure, std::string name = "");

  void SetCostEntry(int block, int i, int j, double value);
  void SetCostBlock(int block, const Eigen::MatrixXd& dense);
  void SetFreeCost(const Eigen::VectorXd& cost);

  int AddConstraint(ConstraintKind kind, double rhs);
  void AddEntry(int constraint, int block, int i, int j, double value);
  void SetConstraintBlock(int constraint, int block,
                          const Eigen::MatrixXd& dense);
  void SetFreeCoefficient(int constraint, int index, double value);

  ConicSdpProblem Build() const;

 private:
  void CheckBlock(int block) const;

  ConicSdpProblem problem_;
};

// Stable-partitions equalities first and normalizes all entry lists.
ConicSdpProblem Canonicalize(ConicSdpProblem problem);

struct Diagnostic {
  std::string invariant;
  int index = -1;  // offending constraint or block, -1 if global
  std::string message;
};

std::vector<Diagnostic> Validate(const ConicSdpProblem& problem);

// (A_1 . X, ..., A_m . X) including the free part.
Eigen::VectorXd ApplyMap(const ConicSdpProblem& problem, const PrimalPoint& x);

// sum_i lambda_i A_i, blockwise, including the free part.
BlockElement ApplyAdjoint(const ConicSdpProblem& problem,
                          const Eigen::VectorXd& lambda);

BlockElement ZeroElement(const BlockStructure& structure);

// Euclidean norm of the cost over all blocks and the free part.
double CostNorm(const ConicSdpProblem& problem);

}  // namespace bmsdp

#endif  // BMSDP_MODEL_H_
