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

#include "bmsdp/apps.h"

#include <cmath>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "bmsdp/error.h"
#include "bmsdp/linalg.h"

namespace bmsdp {
namespace {

Eigen::MatrixXd Gaussian(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd g(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) g(r, c) = normal(rng);
  }
  return g;
}

Eigen::MatrixXd GaussianSymmetric(std::mt19937_64& rng, int n) {
  return Symmetrize(Gaussian(rng, n, n));
}

std::mt19937_64 Stream(std::uint64_t seed, std::uint64_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(tag >> 32)};
  return std::mt19937_64(seq);
}

// Linear functional c . x on cone coordinates as a matrix on arrow form.
Eigen::MatrixXd ArrowFunctional(const Eigen::VectorXd& c) {
  const int n = static_cast<int>(c.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  out(0, 0) = c(0);
  for (int k = 1; k < n; ++k) out(0, k) = out(k, 0) = 0.5 * c(k);
  return out;
}

// The same functional on [[x1 + x2, x3], [x3, x1 - x2]].
Eigen::MatrixXd RotatedFunctional(const Eigen::VectorXd& c) {
  Eigen::MatrixXd out(2, 2);
  out(0, 0) = 0.5 * (c(0) + c(1));
  out(1, 1) = 0.5 * (c(0) - c(1));
  out(0, 1) = out(1, 0) = 0.5 * c(2);
  return out;
}

void CheckSocInstance(const SocInstance& inst) {
  const std::size_t m = static_cast<std::size_t>(inst.rhs.size());
  if (inst.psd_coefficients.size() != m || inst.cone_coefficients.size() != m ||
      inst.psd_cost.rows() != inst.psd_dim || inst.psd_cost.cols() != inst.psd_dim ||
      inst.cone_cost.size() != inst.cone_dim) {
    throw Error(ErrorCode::kDimensionMismatch, "soc: instance dimensions disagree");
  }
}

}  // namespace

Eigen::MatrixXd IntegerQuadraticCost(const Eigen::MatrixXd& q_matrix,
                                     const Eigen::VectorXd& q_vector,
                                     double constant) {
  const Eigen::Index n = q_matrix.rows();
  if (q_matrix.cols() != n || q_vector.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "integer quadratic: Q is n x n, q has length n");
  }
  Eigen::MatrixXd c(n + 1, n + 1);
  c.topLeftCorner(n, n) = Symmetrize(q_matrix);
  c.topRightCorner(n, 1) = 0.5 * q_vector;
  c.bottomLeftCorner(1, n) = 0.5 * q_vector.transpose();
  c(n, n) = constant;
  return c;
}

IntegerQuadraticFixture BuildIntegerQuadratic(const Eigen::MatrixXd& cost) {
  if (cost.rows() != cost.cols() || cost.rows() < 2) {
    throw Error(ErrorCode::kDimensionMismatch,
                "integer quadratic: cost must be square of size n + 1 >= 2");
  }
  const int size = static_cast<int>(cost.rows());
  const int n = size - 1;
  ProblemBuilder builder({{size}, 1, 0}, "integer-quadratic-n" + std::to_string(n));
  builder.SetCostBlock(0, Symmetrize(cost));
  const int eq = builder.AddConstraint(ConstraintKind::kEquality, 1.0);
  builder.AddEntry(eq, 0, n, n, 1.0);
  for (int i = 0; i < n; ++i) {
    const int k = builder.AddConstraint(ConstraintKind::kInequality, 0.0);
    builder.AddEntry(k, 0, i, i, 1.0);
    builder.AddEntry(k, 0, i, n, -0.5);
  }
  IntegerQuadraticFixture out;
  out.problem = builder.Build();
  out.bound.m_prime = n + 1;
  out.bound.method = RankBoundMethod::kRankUpperBound;
  out.bound.ranks = {MinimalRank(n + 1, size)};
  return out;
}

Eigen::MatrixXd RandomMeasurement(int n, std::uint64_t seed, int index) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "measurement: n must be >= 1");
  std::mt19937_64 rng = Stream(seed, 0x6d00000000ull + static_cast<std::uint64_t>(index));
  const Eigen::MatrixXd a = GaussianSymmetric(rng, n);
  return a / a.norm();
}

SensingFixture BuildSensingPsd(int n, int rank, int m, std::uint64_t seed) {
  if (n < 1 || rank < 1 || rank > n || m < 0) {
    throw Error(ErrorCode::kInvalidArgument, "sensing: need 1 <= rank <= n and m >= 0");
  }
  std::mt19937_64 rng = Stream(seed, 0x7053);
  const Eigen::MatrixXd g = Gaussian(rng, n, rank);
  SensingFixture out;
  out.planted = g * g.transpose();
  out.nuclear_norm = out.planted.trace();
  ProblemBuilder builder({{n}, 1, 0}, "sensing-psd-n" + std::to_string(n) + "-m" +
                                          std::to_string(m) + "-s" + std::to_string(seed));
  builder.SetCostBlock(0, Eigen::MatrixXd::Identity(n, n));
  for (int i = 0; i < m; ++i) {
    const Eigen::MatrixXd a = RandomMeasurement(n, seed, i);
    const int k = builder.AddConstraint(ConstraintKind::kEquality, a.cwiseProduct(out.planted).sum());
    builder.SetConstraintBlock(k, 0, a);
  }
  out.problem = builder.Build();
  return out;
}

SensingFixture BuildSensingSymmetric(
    const std::vector<Eigen::MatrixXd>& measurements,
    const Eigen::MatrixXd& planted) {
  const int n = static_cast<int>(planted.rows());
  if (planted.cols() != n || n < 1) {
    throw Error(ErrorCode::kDimensionMismatch, "sensing: planted matrix must be square");
  }
  SensingFixture out;
  out.planted = Symmetrize(planted);
  out.nuclear_norm = EigenDecompose(out.planted).values.cwiseAbs().sum();
  ProblemBuilder builder({{n, n}, 2, 0}, "sensing-symmetric-n" + std::to_string(n) + "-m" +
                                             std::to_string(measurements.size()));
  builder.SetCostBlock(0, Eigen::MatrixXd::Identity(n, n));
  builder.SetCostBlock(1, Eigen::MatrixXd::Identity(n, n));
  for (const Eigen::MatrixXd& a : measurements) {
    if (a.rows() != n || a.cols() != n) {
      throw Error(ErrorCode::kDimensionMismatch, "sensing: measurement size mismatch");
    }
    const Eigen::MatrixXd sym = Symmetrize(a);
    const int k = builder.AddConstraint(ConstraintKind::kEquality, sym.cwiseProduct(out.planted).sum());
    builder.SetConstraintBlock(k, 0, sym);
    builder.SetConstraintBlock(k, 1, -sym);
  }
  out.problem = builder.Build();
  return out;
}

SensingFixture BuildSensingSymmetric(int n, int m,
                                     const Eigen::MatrixXd& planted,
                                     std::uint64_t seed) {
  std::vector<Eigen::MatrixXd> measurements;
  for (int i = 0; i < m; ++i) measurements.push_back(RandomMeasurement(n, seed, i));
  SensingFixture out = BuildSensingSymmetric(measurements, planted);
  out.problem.name += "-s" + std::to_string(seed);
  return out;
}

Eigen::MatrixXd SymmetricEstimate(const PrimalPoint& point) {
  if (point.blocks.size() < 2) {
    throw Error(ErrorCode::kDimensionMismatch, "sensing: estimate needs two blocks");
  }
  return point.blocks[0].ToDense() - point.blocks[1].ToDense();
}

Eigen::MatrixXd ArrowMatrix(const Eigen::VectorXd& x) {
  const int n = static_cast<int>(x.size());
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "arrow: empty vector");
  Eigen::MatrixXd out = x(0) * Eigen::MatrixXd::Identity(n, n);
  for (int k = 1; k < n; ++k) out(0, k) = out(k, 0) = x(k);
  return out;
}

Eigen::VectorXd ArrowToCone(const Eigen::MatrixXd& arrow) {
  if (arrow.rows() != arrow.cols() || arrow.rows() < 1) {
    throw Error(ErrorCode::kDimensionMismatch, "arrow: matrix must be square");
  }
  return arrow.row(0).transpose();
}

bool InSecondOrderCone(const Eigen::VectorXd& x, double tol) {
  if (x.size() == 0) return true;
  return x(0) >= x.tail(x.size() - 1).norm() - tol;
}

ConicSdpProblem BuildSocEmbedding(const SocInstance& instance) {
  const int n1 = instance.psd_dim;
  const int n2 = instance.cone_dim;
  if (n2 < 2) throw Error(ErrorCode::kInvalidArgument, "soc: cone dimension must be >= 2");
  CheckSocInstance(instance);
  ProblemBuilder builder({{n1, n2}, 1, 0}, "soc-arrow-n" + std::to_string(n1) + "-q" +
                                               std::to_string(n2));
  builder.SetCostBlock(0, instance.psd_cost);
  builder.SetCostBlock(1, ArrowFunctional(instance.cone_cost));
  for (int i = 0; i < instance.rhs.size(); ++i) {
    const int k = builder.AddConstraint(ConstraintKind::kEquality, instance.rhs(i));
    builder.SetConstraintBlock(k, 0, instance.psd_coefficients[i]);
    builder.SetConstraintBlock(k, 1, ArrowFunctional(instance.cone_coefficients[i]));
  }
  for (int k = 1; k < n2; ++k) {
    const int c = builder.AddConstraint(ConstraintKind::kEquality, 0.0);
    builder.AddEntry(c, 1, k, k, 1.0);
    builder.AddEntry(c, 1, 0, 0, -1.0);
  }
  for (int l = 2; l < n2; ++l) {
    for (int k = 1; k < l; ++k) {
      const int c = builder.AddConstraint(ConstraintKind::kEquality, 0.0);
      builder.AddEntry(c, 1, k, l, 1.0);
    }
  }
  return builder.Build();
}

ConicSdpProblem BuildSocRotatedEmbedding(const SocInstance& instance) {
  if (instance.cone_dim != 3) {
    throw Error(ErrorCode::kInvalidArgument, "soc: rotated embedding needs cone dimension 3");
  }
  CheckSocInstance(instance);
  ProblemBuilder builder({{instance.psd_dim, 2}, 1, 0},
                         "soc-rotated-n" + std::to_string(instance.psd_dim));
  builder.SetCostBlock(0, instance.psd_cost);
  builder.SetCostBlock(1, RotatedFunctional(instance.cone_cost));
  for (int i = 0; i < instance.rhs.size(); ++i) {
    const int k = builder.AddConstraint(ConstraintKind::kEquality, instance.rhs(i));
    builder.SetConstraintBlock(k, 0, instance.psd_coefficients[i]);
    builder.SetConstraintBlock(k, 1, RotatedFunctional(instance.cone_coefficients[i]));
  }
  return builder.Build();
}

SocInstance RandomSocInstance(int psd_dim, int cone_dim, int m1,
                              std::uint64_t seed) {
  if (psd_dim < 1 || cone_dim < 2 || m1 < 0) {
    throw Error(ErrorCode::kInvalidArgument, "soc: need psd_dim >= 1, cone_dim >= 2, m1 >= 0");
  }
  std::mt19937_64 rng = Stream(seed, 0x50c);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto interior_point = [&]() {
    Eigen::VectorXd x(cone_dim);
    for (int k = 1; k < cone_dim; ++k) x(k) = normal(rng);
    x(0) = x.tail(cone_dim - 1).norm() + 0.5 + std::abs(normal(rng));
    return x;
  };
  auto pd_matrix = [&]() {
    const Eigen::MatrixXd g = Gaussian(rng, psd_dim, psd_dim);
    return Eigen::MatrixXd(g * g.transpose() / psd_dim +
                           0.5 * Eigen::MatrixXd::Identity(psd_dim, psd_dim));
  };
  SocInstance inst;
  inst.psd_dim = psd_dim;
  inst.cone_dim = cone_dim;
  const Eigen::MatrixXd x0 = pd_matrix();
  const Eigen::VectorXd cone0 = interior_point();
  inst.rhs.resize(m1);
  Eigen::VectorXd mu(m1);
  for (int i = 0; i < m1; ++i) {
    Eigen::MatrixXd a = GaussianSymmetric(rng, psd_dim);
    Eigen::VectorXd c(cone_dim);
    for (int k = 0; k < cone_dim; ++k) c(k) = normal(rng);
    const double norm = std::sqrt(a.squaredNorm() + c.squaredNorm());
    inst.psd_coefficients.push_back(a / norm);
    inst.cone_coefficients.push_back(c / norm);
    inst.rhs(i) = inst.psd_coefficients[i].cwiseProduct(x0).sum() +
                  inst.cone_coefficients[i].dot(cone0);
    mu(i) = normal(rng);
  }
  inst.psd_cost = pd_matrix();
  inst.cone_cost = interior_point();
  for (int i = 0; i < m1; ++i) {
    inst.psd_cost += mu(i) * inst.psd_coefficients[i];
    inst.cone_cost += mu(i) * inst.cone_coefficients[i];
  }
  return inst;
}

AdversarialFixture BuildAdversarialCost(
    const std::vector<Eigen::MatrixXd>& measurements, const Eigen::MatrixXd& y,
    std::uint64_t seed, const Eigen::MatrixXd& slack_core) {
  const int n = static_cast<int>(y.rows());
  const int p = static_cast<int>(y.cols());
  if (p >= n) {
    throw Error(ErrorCode::kInvalidArgument,
                "adversarial: p >= n leaves no room for a negative slack eigenvalue");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(y);
  qr.setThreshold(kRankTolerance);
  const int r = static_cast<int>(qr.rank());
  const Eigen::MatrixXd full_q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd q = full_q.rightCols(n - r);

  std::mt19937_64 rng = Stream(seed, 0xad5);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd core;
  if (slack_core.size() > 0) {
    if (slack_core.rows() != n - r || slack_core.cols() != n - r) {
      throw Error(ErrorCode::kDimensionMismatch, "adversarial: slack core must be (n-r)x(n-r)");
    }
    core = Symmetrize(slack_core);
  } else {
    const Eigen::MatrixXd basis =
        Eigen::HouseholderQR<Eigen::MatrixXd>(Gaussian(rng, n - r, n - r)).householderQ();
    Eigen::VectorXd eig(n - r);
    for (int k = 0; k < n - r; ++k) eig(k) = normal(rng);
    eig(0) = -(0.5 + std::abs(eig(0)));
    core = Symmetrize(basis * eig.asDiagonal() * basis.transpose());
  }
  const Eigen::MatrixXd slack = Symmetrize(q * core * q.transpose());

  const int m = static_cast<int>(measurements.size());
  Eigen::VectorXd lambda(m);
  for (int i = 0; i < m; ++i) lambda(i) = normal(rng);
  Eigen::MatrixXd cost = slack;
  const Eigen::MatrixXd x = y * y.transpose();
  ProblemBuilder builder({{n}, 1, 0}, "adversarial-n" + std::to_string(n) + "-p" +
                                          std::to_string(p) + "-s" + std::to_string(seed));
  for (int i = 0; i < m; ++i) {
    const Eigen::MatrixXd a = Symmetrize(measurements[i]);
    if (a.rows() != n) throw Error(ErrorCode::kDimensionMismatch, "adversarial: measurement size");
    cost += lambda(i) * a;
    const int k = builder.AddConstraint(ConstraintKind::kEquality, a.cwiseProduct(x).sum());
    builder.SetConstraintBlock(k, 0, a);
  }
  builder.SetCostBlock(0, cost);
  AdversarialFixture out;
  out.problem = builder.Build();
  out.planted.factors = {y};
  out.planted.free = Eigen::VectorXd();
  out.planted_lambda = lambda;
  out.planted_slack = slack;
  out.planted_objective = out.problem.cost_block(0).cwiseProduct(x).sum();
  return out;
}

AdversarialFixture RandomAdversarialFixture(int n, int p, int m,
                                            std::uint64_t seed) {
  if (n < 1 || p < 1 || m < 1) {
    throw Error(ErrorCode::kInvalidArgument, "adversarial: need n, p, m >= 1");
  }
  std::vector<Eigen::MatrixXd> measurements;
  measurements.push_back(Eigen::MatrixXd::Identity(n, n) / std::sqrt(static_cast<double>(n)));
  for (int i = 1; i < m; ++i) measurements.push_back(RandomMeasurement(n, seed, i));
  std::mt19937_64 rng = Stream(seed, 0xadf);
  const Eigen::MatrixXd y = Gaussian(rng, n, p);
  return BuildAdversarialCost(measurements, y, seed);
}

ConicSdpProblem GenerateRandom(const BlockStructure& structure, int m,
                               const std::string& kinds, std::uint64_t seed) {
  if (m < 0) throw Error(ErrorCode::kInvalidArgument, "generate: m must be >= 0");
  if (!kinds.empty() && static_cast<int>(kinds.size()) != m) {
    throw Error(ErrorCode::kInvalidArgument, "generate: kinds must have one letter per constraint");
  }
  for (char k : kinds) {
    if (k != 'E' && k != 'I') {
      throw Error(ErrorCode::kInvalidArgument, "generate: kinds letters must be E or I");
    }
  }
  if (structure.factorized_count < 0 || structure.factorized_count > structure.num_blocks() ||
      structure.free_dim < 0) {
    throw Error(ErrorCode::kInvalidArgument, "generate: invalid block structure");
  }
  for (int n : structure.psd_sizes) {
    if (n < 1) throw Error(ErrorCode::kInvalidArgument, "generate: block sizes must be >= 1");
  }
  std::mt19937_64 rng = Stream(seed, 0x9e7);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.1, 1.0);
  const int nb = structure.num_blocks();
  const int d = structure.free_dim;

  std::vector<Eigen::MatrixXd> x0;
  for (int n : structure.psd_sizes) {
    const Eigen::MatrixXd g = Gaussian(rng, n, n);
    x0.push_back(g * g.transpose() / n + 0.5 * Eigen::MatrixXd::Identity(n, n));
  }
  Eigen::VectorXd free0(d);
  for (int i = 0; i < d; ++i) free0(i) = normal(rng);

  std::string name = "random";
  for (int n : structure.psd_sizes) name += "-" + std::to_string(n);
  name += "-d" + std::to_string(d) + "-m" + std::to_string(m) + "-s" + std::to_string(seed);
  ProblemBuilder builder(structure, name);
  std::vector<Eigen::MatrixXd> cost(nb);
  for (int j = 0; j < nb; ++j) {
    const int n = structure.psd_sizes[j];
    const Eigen::MatrixXd h = Gaussian(rng, n, n);
    cost[j] = h * h.transpose() / n + 0.1 * Eigen::MatrixXd::Identity(n, n);
  }
  Eigen::VectorXd free_cost = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < m; ++i) {
    const bool inequality = !kinds.empty() && kinds[i] == 'I';
    std::vector<Eigen::MatrixXd> blocks;
    Eigen::VectorXd free(d);
    double value = 0.0;
    // Redraw until A_i(X0) is safely away from zero.
    for (int attempt = 0; attempt < 100; ++attempt) {
      blocks.clear();
      double norm2 = 0.0;
      for (int n : structure.psd_sizes) {
        blocks.push_back(GaussianSymmetric(rng, n));
        norm2 += blocks.back().squaredNorm();
      }
      for (int k = 0; k < d; ++k) free(k) = normal(rng);
      norm2 += free.squaredNorm();
      const double norm = std::sqrt(norm2);
      value = 0.0;
      for (int j = 0; j < nb; ++j) {
        blocks[j] /= norm;
        value += blocks[j].cwiseProduct(x0[j]).sum();
      }
      free /= norm;
      if (d > 0) value += free.dot(free0);
      if (inequality) value -= uniform(rng);
      if (std::abs(value) >= 0.05) break;
    }
    const double mu = inequality ? 0.1 + std::abs(normal(rng)) : normal(rng);
    const int k = builder.AddConstraint(
        inequality ? ConstraintKind::kInequality : ConstraintKind::kEquality, value);
    for (int j = 0; j < nb; ++j) {
      builder.SetConstraintBlock(k, j, blocks[j]);
      cost[j] += mu * blocks[j];
    }
    for (int t = 0; t < d; ++t) builder.SetFreeCoefficient(k, t, free(t));
    if (d > 0) free_cost += mu * free;
  }
  for (int j = 0; j < nb; ++j) builder.SetCostBlock(j, cost[j]);
  if (d > 0) builder.SetFreeCost(free_cost);
  return builder.Build();
}

}  // namespace bmsdp
