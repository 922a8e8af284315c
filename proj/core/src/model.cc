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

#include "bmsdp/model.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "bmsdp/error.h"

namespace bmsdp {

SymmetricMatrix::SymmetricMatrix(int dim)
    : dim_(dim), packed_(static_cast<std::size_t>(dim) * (dim + 1) / 2, 0.0) {}

SymmetricMatrix SymmetricMatrix::FromDense(const Eigen::MatrixXd& dense) {
  if (dense.rows() != dense.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "symmetric matrix must be square");
  }
  SymmetricMatrix out(static_cast<int>(dense.rows()));
  for (int j = 0; j < out.dim_; ++j) {
    for (int i = 0; i <= j; ++i) out.at(i, j) = dense(i, j);
  }
  return out;
}

SymmetricMatrix SymmetricMatrix::Identity(int dim) {
  SymmetricMatrix out(dim);
  for (int i = 0; i < dim; ++i) out.at(i, i) = 1.0;
  return out;
}

Eigen::MatrixXd SymmetricMatrix::ToDense() const {
  Eigen::MatrixXd out(dim_, dim_);
  for (int j = 0; j < dim_; ++j) {
    for (int i = 0; i <= j; ++i) {
      out(i, j) = out(j, i) = (*this)(i, j);
    }
  }
  return out;
}

double Inner(const SymmetricMatrix& a, const SymmetricMatrix& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "inner product: dimension mismatch");
  }
  double sum = 0.0;
  for (int j = 0; j < a.dim(); ++j) {
    for (int i = 0; i < j; ++i) sum += 2.0 * a(i, j) * b(i, j);
    sum += a(j, j) * b(j, j);
  }
  return sum;
}

SparseSymmetric SparseSymmetric::FromDense(const Eigen::MatrixXd& dense) {
  SparseSymmetric out(static_cast<int>(dense.rows()));
  for (int j = 0; j < out.dim_; ++j) {
    for (int i = 0; i <= j; ++i) {
      if (dense(i, j) != 0.0) out.entries_.push_back({i, j, dense(i, j)});
    }
  }
  return out;
}

void SparseSymmetric::Add(int i, int j, double value) {
  if (i > j) std::swap(i, j);
  if (i < 0 || j >= dim_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "sparse entry (" + std::to_string(i) + "," + std::to_string(j) +
                    ") outside dimension " + std::to_string(dim_));
  }
  entries_.push_back({i, j, value});
}

void SparseSymmetric::Normalize() {
  std::stable_sort(entries_.begin(), entries_.end(),
                   [](const SparseEntry& a, const SparseEntry& b) {
                     return a.col != b.col ? a.col < b.col : a.row < b.row;
                   });
  std::vector<SparseEntry> merged;
  for (const SparseEntry& e : entries_) {
    if (!merged.empty() && merged.back().row == e.row &&
        merged.back().col == e.col) {
      merged.back().value += e.value;
    } else {
      merged.push_back(e);
    }
  }
  std::erase_if(merged, [](const SparseEntry& e) { return e.value == 0.0; });
  entries_ = std::move(merged);
}

double SparseSymmetric::Dot(const SymmetricMatrix& x) const {
  double sum = 0.0;
  for (const SparseEntry& e : entries_) {
    sum += (e.row == e.col ? 1.0 : 2.0) * e.value * x(e.row, e.col);
  }
  return sum;
}

double SparseSymmetric::Dot(const Eigen::MatrixXd& x) const {
  double sum = 0.0;
  for (const SparseEntry& e : entries_) {
    sum += e.row == e.col ? e.value * x(e.row, e.row)
                          : e.value * (x(e.row, e.col) + x(e.col, e.row));
  }
  return sum;
}

double SparseSymmetric::DotGram(const Eigen::MatrixXd& y) const {
  double sum = 0.0;
  for (const SparseEntry& e : entries_) {
    const double g = y.row(e.row).dot(y.row(e.col));
    sum += (e.row == e.col ? 1.0 : 2.0) * e.value * g;
  }
  return sum;
}

double SparseSymmetric::DotSymmetricProduct(const Eigen::MatrixXd& u,
                                            const Eigen::MatrixXd& y) const {
  double sum = 0.0;
  for (const SparseEntry& e : entries_) {
    if (e.row == e.col) {
      sum += 2.0 * e.value * u.row(e.row).dot(y.row(e.row));
    } else {
      sum += 2.0 * e.value *
             (u.row(e.row).dot(y.row(e.col)) + y.row(e.row).dot(u.row(e.col)));
    }
  }
  return sum;
}

void SparseSymmetric::AddScaledTo(double scale, Eigen::MatrixXd& out) const {
  for (const SparseEntry& e : entries_) {
    out(e.row, e.col) += scale * e.value;
    if (e.row != e.col) out(e.col, e.row) += scale * e.value;
  }
}

void SparseSymmetric::MultiplyAddTo(double scale, const Eigen::MatrixXd& y,
                                    Eigen::MatrixXd& out) const {
  for (const SparseEntry& e : entries_) {
    out.row(e.row) += (scale * e.value) * y.row(e.col);
    if (e.row != e.col) out.row(e.col) += (scale * e.value) * y.row(e.row);
  }
}

Eigen::MatrixXd SparseSymmetric::ToDense() const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim_, dim_);
  AddScaledTo(1.0, out);
  return out;
}

double SparseSymmetric::SquaredFrobeniusNorm() const {
  double sum = 0.0;
  for (const SparseEntry& e : entries_) {
    sum += (e.row == e.col ? 1.0 : 2.0) * e.value * e.value;
  }
  return sum;
}

double Inner(const BlockElement& a, const BlockElement& b) {
  if (a.blocks.size() != b.blocks.size() || a.free.size() != b.free.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "inner product: layout mismatch");
  }
  double sum = a.free.dot(b.free);
  for (std::size_t j = 0; j < a.blocks.size(); ++j) {
    sum += Inner(a.blocks[j], b.blocks[j]);
  }
  return sum;
}

int ConicSdpProblem::num_equalities() const {
  return static_cast<int>(std::count_if(
      constraints.begin(), constraints.end(),
      [](const Constraint& c) { return c.kind == ConstraintKind::kEquality; }));
}

Eigen::VectorXd ConicSdpProblem::rhs() const {
  Eigen::VectorXd b(num_constraints());
  for (int i = 0; i < num_constraints(); ++i) b(i) = constraints[i].rhs;
  return b;
}

namespace {

bool SameVector(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.size() == b.size() && (a.size() == 0 || a == b);
}

}  // namespace

bool operator==(const ConicSdpProblem& a, const ConicSdpProblem& b) {
  if (a.name != b.name || !(a.structure == b.structure) ||
      a.cost.blocks != b.cost.blocks || !SameVector(a.cost.free, b.cost.free) ||
      a.constraints.size() != b.constraints.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.constraints.size(); ++i) {
    const Constraint& ca = a.constraints[i];
    const Constraint& cb = b.constraints[i];
    if (ca.kind != cb.kind || ca.rhs != cb.rhs || ca.blocks != cb.blocks ||
        !SameVector(ca.free, cb.free)) {
      return false;
    }
  }
  return true;
}

ProblemBuilder::ProblemBuilder(BlockStructure structure, std::string name) {
  problem_.name = std::move(name);
  problem_.structure = std::move(structure);
  for (int n : problem_.structure.psd_sizes) {
    if (n <= 0) throw Error(ErrorCode::kInvalidArgument, "block sizes must be positive");
    problem_.cost.blocks.emplace_back(n);
  }
  problem_.cost.free = Eigen::VectorXd::Zero(problem_.structure.free_dim);
}

void ProblemBuilder::CheckBlock(int block) const {
  if (block < 0 || block >= problem_.structure.num_blocks()) {
    throw Error(ErrorCode::kInvalidArgument,
                "block index " + std::to_string(block) + " out of range");
  }
}

void ProblemBuilder::SetCostEntry(int block, int i, int j, double value) {
  CheckBlock(block);
  const int n = problem_.structure.psd_sizes[block];
  if (i < 0 || j < 0 || i >= n || j >= n) {
    throw Error(ErrorCode::kDimensionMismatch, "cost entry out of range");
  }
  problem_.cost.blocks[block].at(i, j) = value;
}

void ProblemBuilder::SetCostBlock(int block, const Eigen::MatrixXd& dense) {
  CheckBlock(block);
  if (dense.rows() != problem_.structure.psd_sizes[block]) {
    throw Error(ErrorCode::kDimensionMismatch, "cost block dimension mismatch");
  }
  problem_.cost.blocks[block] = SymmetricMatrix::FromDense(dense);
}

void ProblemBuilder::SetFreeCost(const Eigen::VectorXd& cost) {
  if (cost.size() != problem_.structure.free_dim) {
    throw Error(ErrorCode::kDimensionMismatch, "free cost dimension mismatch");
  }
  problem_.cost.free = cost;
}

int ProblemBuilder::AddConstraint(ConstraintKind kind, double rhs) {
  Constraint c;
  for (int n : problem_.structure.psd_sizes) c.blocks.emplace_back(n);
  c.free = Eigen::VectorXd::Zero(problem_.structure.free_dim);
  c.rhs = rhs;
  c.kind = kind;
  problem_.constraints.push_back(std::move(c));
  return problem_.num_constraints() - 1;
}

void ProblemBuilder::AddEntry(int constraint, int block, int i, int j,
                              double value) {
  CheckBlock(block);
  problem_.constraints.at(constraint).blocks[block].Add(i, j, value);
}

void ProblemBuilder::SetConstraintBlock(int constraint, int block,
                                        const Eigen::MatrixXd& dense) {
  CheckBlock(block);
  if (dense.rows() != problem_.structure.psd_sizes[block] ||
      dense.cols() != dense.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "constraint block dimension mismatch");
  }
  problem_.constraints.at(constraint).blocks[block] =
      SparseSymmetric::FromDense(dense);
}

void ProblemBuilder::SetFreeCoefficient(int constraint, int index,
                                        double value) {
  Constraint& c = problem_.constraints.at(constraint);
  if (index < 0 || index >= c.free.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "free index out of range");
  }
  c.free(index) = value;
}

ConicSdpProblem ProblemBuilder::Build() const { return Canonicalize(problem_); }

ConicSdpProblem Canonicalize(ConicSdpProblem problem) {
  std::stable_partition(
      problem.constraints.begin(), problem.constraints.end(),
      [](const Constraint& c) { return c.kind == ConstraintKind::kEquality; });
  for (Constraint& c : problem.constraints) {
    for (SparseSymmetric& block : c.blocks) block.Normalize();
  }
  return problem;
}

std::vector<Diagnostic> Validate(const ConicSdpProblem& problem) {
  std::vector<Diagnostic> out;
  const BlockStructure& s = problem.structure;
  auto report = [&](std::string invariant, int index, std::string message) {
    out.push_back({std::move(invariant), index, std::move(message)});
  };

  if (s.psd_sizes.empty() && s.free_dim <= 0) {
    report("block-structure", -1, "no PSD blocks and no free variables");
  }
  if (s.factorized_count < 0 || s.factorized_count > s.num_blocks()) {
    report("block-structure", -1, "factorized_count outside [0, #blocks]");
  }
  if (s.free_dim < 0) report("block-structure", -1, "negative free dimension");
  for (int j = 0; j < s.num_blocks(); ++j) {
    if (s.psd_sizes[j] <= 0) report("block-structure", j, "non-positive block size");
  }

  bool cost_ok = static_cast<int>(problem.cost.blocks.size()) == s.num_blocks() &&
                 problem.cost.free.size() == s.free_dim;
  for (std::size_t j = 0; cost_ok && j < problem.cost.blocks.size(); ++j) {
    cost_ok = problem.cost.blocks[j].dim() == s.psd_sizes[j];
  }
  if (!cost_ok) report("cost-dimension", -1, "cost does not match block structure");
  if (cost_ok) {
    bool finite = problem.cost.free.allFinite();
    for (const SymmetricMatrix& c : problem.cost.blocks) {
      for (double v : c.packed()) finite = finite && std::isfinite(v);
    }
    if (!finite) report("finite-entries", -1, "cost has non-finite entries");
  }

  bool seen_inequality = false;
  bool order_reported = false;
  for (int i = 0; i < problem.num_constraints(); ++i) {
    const Constraint& c = problem.constraints[i];
    bool dims_ok = static_cast<int>(c.blocks.size()) == s.num_blocks() &&
                   c.free.size() == s.free_dim;
    bool finite = std::isfinite(c.rhs) && (c.free.size() == 0 || c.free.allFinite());
    for (std::size_t j = 0; dims_ok && j < c.blocks.size(); ++j) {
      if (c.blocks[j].dim() != s.psd_sizes[j]) dims_ok = false;
      for (const SparseEntry& e : c.blocks[j].entries()) {
        if (e.row < 0 || e.row > e.col || e.col >= c.blocks[j].dim()) dims_ok = false;
        finite = finite && std::isfinite(e.value);
      }
    }
    if (!dims_ok) {
      report("constraint-dimension", i,
             "constraint " + std::to_string(i) + " does not match block structure");
    }
    if (!finite) {
      report("finite-entries", i,
             "constraint " + std::to_string(i) + " has non-finite data");
    }
    if (c.kind == ConstraintKind::kInequality) {
      seen_inequality = true;
    } else if (seen_inequality && !order_reported) {
      report("canonical-order", i,
             "equality " + std::to_string(i) + " listed after an inequality");
      order_reported = true;
    }
  }
  return out;
}

namespace {

void CheckPointLayout(const ConicSdpProblem& problem, const PrimalPoint& x) {
  const BlockStructure& s = problem.structure;
  bool ok = static_cast<int>(x.blocks.size()) == s.num_blocks() &&
            x.free.size() == s.free_dim;
  for (std::size_t j = 0; ok && j < x.blocks.size(); ++j) {
    ok = x.blocks[j].dim() == s.psd_sizes[j];
  }
  if (!ok) throw Error(ErrorCode::kDimensionMismatch, "point does not match block structure");
}

}  // namespace

Eigen::VectorXd ApplyMap(const ConicSdpProblem& problem, const PrimalPoint& x) {
  CheckPointLayout(problem, x);
  Eigen::VectorXd out(problem.num_constraints());
  for (int i = 0; i < problem.num_constraints(); ++i) {
    const Constraint& c = problem.constraints[i];
    double v = c.free.size() > 0 ? c.free.dot(x.free) : 0.0;
    for (std::size_t j = 0; j < c.blocks.size(); ++j) v += c.blocks[j].Dot(x.blocks[j]);
    out(i) = v;
  }
  return out;
}

BlockElement ZeroElement(const BlockStructure& structure) {
  BlockElement out;
  for (int n : structure.psd_sizes) out.blocks.emplace_back(n);
  out.free = Eigen::VectorXd::Zero(structure.free_dim);
  return out;
}

BlockElement ApplyAdjoint(const ConicSdpProblem& problem,
                          const Eigen::VectorXd& lambda) {
  if (lambda.size() != problem.num_constraints()) {
    throw Error(ErrorCode::kDimensionMismatch, "adjoint: multiplier length mismatch");
  }
  BlockElement out = ZeroElement(problem.structure);
  for (int i = 0; i < problem.num_constraints(); ++i) {
    const Constraint& c = problem.constraints[i];
    if (lambda(i) == 0.0) continue;
    for (std::size_t j = 0; j < c.blocks.size(); ++j) {
      for (const SparseEntry& e : c.blocks[j].entries()) {
        out.blocks[j].at(e.row, e.col) += lambda(i) * e.value;
      }
    }
    if (c.free.size() > 0) out.free += lambda(i) * c.free;
  }
  return out;
}

double CostNorm(const ConicSdpProblem& problem) {
  double sq = problem.cost.free.squaredNorm();
  for (const SymmetricMatrix& c : problem.cost.blocks) sq += Inner(c, c);
  return std::sqrt(sq);
}

}  // namespace bmsdp
