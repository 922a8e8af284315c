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

#include "bmsdp/oracle.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "bmsdp/error.h"
#include "bmsdp/linalg.h"

namespace bmsdp {
namespace {

struct DenseBlock {
  int n = 0;
  Eigen::MatrixXd cost;
  std::vector<std::pair<int, Eigen::MatrixXd>> coeffs;
};

// Standard form over PSD blocks only: the original blocks followed by one
// 1x1 slack block per inequality (coefficient -1).
struct StandardForm {
  std::vector<DenseBlock> blocks;
  Eigen::MatrixXd free_coeffs;  // m x d
  Eigen::VectorXd free_cost;
  Eigen::VectorXd b;
  int original_blocks = 0;
  int total_dim = 0;
};

StandardForm ToStandardForm(const ConicSdpProblem& problem) {
  StandardForm sf;
  const BlockStructure& s = problem.structure;
  const int m = problem.num_constraints();
  sf.original_blocks = s.num_blocks();
  for (int j = 0; j < s.num_blocks(); ++j) {
    DenseBlock block;
    block.n = s.psd_sizes[j];
    block.cost = problem.cost_block(j);
    for (int i = 0; i < m; ++i) {
      const SparseSymmetric& a = problem.constraints[i].blocks[j];
      if (!a.empty()) block.coeffs.emplace_back(i, a.ToDense());
    }
    sf.blocks.push_back(std::move(block));
  }
  for (int i = 0; i < m; ++i) {
    if (!problem.is_inequality(i)) continue;
    DenseBlock slack;
    slack.n = 1;
    slack.cost = Eigen::MatrixXd::Zero(1, 1);
    slack.coeffs.emplace_back(i, Eigen::MatrixXd::Constant(1, 1, -1.0));
    sf.blocks.push_back(std::move(slack));
  }
  sf.free_coeffs = Eigen::MatrixXd::Zero(m, s.free_dim);
  for (int i = 0; i < m; ++i) {
    if (s.free_dim > 0) sf.free_coeffs.row(i) = problem.constraints[i].free.transpose();
  }
  sf.free_cost = s.free_dim > 0 ? problem.cost.free : Eigen::VectorXd();
  if (sf.free_cost.size() != s.free_dim) sf.free_cost = Eigen::VectorXd::Zero(s.free_dim);
  sf.b = problem.rhs();
  for (const DenseBlock& block : sf.blocks) sf.total_dim += block.n;
  return sf;
}

using Blocks = std::vector<Eigen::MatrixXd>;

// A applied to (possibly nonsymmetric) block matrices: trace(A_i W).
Eigen::VectorXd Apply(const StandardForm& sf, const Blocks& w) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(sf.b.size());
  for (std::size_t j = 0; j < sf.blocks.size(); ++j) {
    for (const auto& [i, a] : sf.blocks[j].coeffs) out(i) += a.cwiseProduct(w[j]).sum();
  }
  return out;
}

Blocks Adjoint(const StandardForm& sf, const Eigen::VectorXd& y) {
  Blocks out;
  for (const DenseBlock& block : sf.blocks) {
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(block.n, block.n);
    for (const auto& [i, a] : block.coeffs) acc += y(i) * a;
    out.push_back(std::move(acc));
  }
  return out;
}

double Dot(const Blocks& a, const Blocks& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j].cwiseProduct(b[j]).sum();
  return s;
}

struct Direction {
  Blocks dx;
  Blocks dz;
  Eigen::VectorXd dy;
  Eigen::VectorXd dfree;
};

class NewtonSystem {
 public:
  NewtonSystem(const StandardForm& sf, const Blocks& x, const Blocks& z)
      : sf_(sf), x_(x) {
    const int m = static_cast<int>(sf.b.size());
    for (const Eigen::MatrixXd& zj : z) {
      Eigen::LLT<Eigen::MatrixXd> llt(zj);
      if (llt.info() != Eigen::Success) {
        throw Error(ErrorCode::kNumericalFailure, "oracle: dual iterate lost definiteness");
      }
      zinv_.push_back(llt.solve(Eigen::MatrixXd::Identity(zj.rows(), zj.cols())));
    }
    Eigen::MatrixXd schur = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t j = 0; j < sf.blocks.size(); ++j) {
      const auto& coeffs = sf.blocks[j].coeffs;
      for (const auto& [l, al] : coeffs) {
        const Eigen::MatrixXd g = (x[j] * al * zinv_[j]).transpose();
        for (const auto& [i, ai] : coeffs) schur(i, l) += ai.cwiseProduct(g).sum();
      }
    }
    schur = Symmetrize(schur);
    const double diag = m > 0 ? schur.diagonal().cwiseAbs().maxCoeff() : 0.0;
    ldlt_.compute(schur);
    if (ldlt_.info() != Eigen::Success ||
        ldlt_.vectorD().cwiseAbs().minCoeff() <= 1e-15 * std::max(1.0, diag)) {
      schur.diagonal().array() += 1e-13 * std::max(1.0, diag);
      ldlt_.compute(schur);
    }
    const int d = static_cast<int>(sf.free_coeffs.cols());
    if (d > 0) {
      m_inv_f_ = ldlt_.solve(sf.free_coeffs);
      reduced_.compute(sf.free_coeffs.transpose() * m_inv_f_);
    }
  }

  // Solves for the HKM direction with complementarity target r_c
  // (X dZ + dX Z = r_c).
  Direction Solve(const Eigen::VectorXd& r_p, const Blocks& r_d,
                  const Eigen::VectorXd& r_f, const Blocks& r_c) const {
    Blocks w;
    for (std::size_t j = 0; j < x_.size(); ++j) {
      w.push_back((r_c[j] - x_[j] * r_d[j]) * zinv_[j]);
    }
    const Eigen::VectorXd rhs = r_p - Apply(sf_, w);
    Direction dir;
    const int d = static_cast<int>(sf_.free_coeffs.cols());
    if (d > 0) {
      const Eigen::VectorXd m_inv_rhs = ldlt_.solve(rhs);
      dir.dfree = reduced_.solve(sf_.free_coeffs.transpose() * m_inv_rhs - r_f);
      dir.dy = ldlt_.solve(rhs - sf_.free_coeffs * dir.dfree);
    } else {
      dir.dfree = Eigen::VectorXd();
      dir.dy = ldlt_.solve(rhs);
    }
    const Blocks ady = Adjoint(sf_, dir.dy);
    for (std::size_t j = 0; j < x_.size(); ++j) {
      dir.dz.push_back(r_d[j] - ady[j]);
      dir.dx.push_back(Symmetrize((r_c[j] - x_[j] * dir.dz[j]) * zinv_[j]));
    }
    return dir;
  }

 private:
  const StandardForm& sf_;
  const Blocks& x_;
  Blocks zinv_;
  Eigen::LDLT<Eigen::MatrixXd> ldlt_;
  Eigen::MatrixXd m_inv_f_;
  Eigen::LDLT<Eigen::MatrixXd> reduced_;
};

double MaxStep(const Blocks& x, const Blocks& dx) {
  double step = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < x.size(); ++j) step = std::min(step, MaxPsdStep(x[j], dx[j]));
  return step;
}

struct Iterate {
  Blocks x;
  Blocks z;
  Eigen::VectorXd y;
  Eigen::VectorXd free;
};

// One Mehrotra predictor-corrector step. Returns false when the iterate
// cannot be advanced (lost definiteness or a vanishing step).
bool Step(const StandardForm& sf, double mu, const Eigen::VectorXd& r_p,
          const Blocks& r_d, const Eigen::VectorXd& r_f, Iterate& it) {
  try {
    const NewtonSystem system(sf, it.x, it.z);
    const int d = static_cast<int>(sf.free_cost.size());
    Blocks r_c;
    for (std::size_t j = 0; j < it.x.size(); ++j) r_c.push_back(-it.x[j] * it.z[j]);
    const Direction pred = system.Solve(r_p, r_d, r_f, r_c);
    const double ap = std::min(1.0, MaxStep(it.x, pred.dx));
    const double ad = std::min(1.0, MaxStep(it.z, pred.dz));
    Blocks xa;
    Blocks za;
    for (std::size_t j = 0; j < it.x.size(); ++j) {
      xa.push_back(it.x[j] + ap * pred.dx[j]);
      za.push_back(it.z[j] + ad * pred.dz[j]);
    }
    const double mu_aff = Dot(xa, za) / sf.total_dim;
    const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);
    for (std::size_t j = 0; j < it.x.size(); ++j) {
      const int n = static_cast<int>(it.x[j].rows());
      r_c[j] = sigma * mu * Eigen::MatrixXd::Identity(n, n) - it.x[j] * it.z[j] -
               pred.dx[j] * pred.dz[j];
    }
    const Direction corr = system.Solve(r_p, r_d, r_f, r_c);
    const double step_p = std::min(1.0, 0.99 * MaxStep(it.x, corr.dx));
    const double step_d = std::min(1.0, 0.99 * MaxStep(it.z, corr.dz));
    if (std::max(step_p, step_d) < 1e-10) return false;
    Iterate next = it;
    for (std::size_t j = 0; j < it.x.size(); ++j) {
      next.x[j] = Symmetrize(it.x[j] + step_p * corr.dx[j]);
      next.z[j] = Symmetrize(it.z[j] + step_d * corr.dz[j]);
      if (Eigen::LLT<Eigen::MatrixXd>(next.x[j]).info() != Eigen::Success ||
          Eigen::LLT<Eigen::MatrixXd>(next.z[j]).info() != Eigen::Success) {
        return false;
      }
    }
    next.y += step_d * corr.dy;
    if (d > 0) next.free += step_p * corr.dfree;
    it = std::move(next);
    return true;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

OracleSolution OracleSolve(const ConicSdpProblem& problem,
                           const OracleOptions& options) {
  const StandardForm sf = ToStandardForm(problem);
  const int m = static_cast<int>(sf.b.size());
  const int d = static_cast<int>(sf.free_cost.size());
  const double b_scale = 1.0 + sf.b.norm();
  const double c_scale = 1.0 + CostNorm(problem);

  Iterate it;
  it.y = Eigen::VectorXd::Zero(m);
  it.free = Eigen::VectorXd::Zero(d);
  for (const DenseBlock& block : sf.blocks) {
    const double n = block.n;
    double xi = std::max(10.0, std::sqrt(n));
    double eta = std::max({10.0, std::sqrt(n), block.cost.norm()});
    for (const auto& [i, a] : block.coeffs) {
      xi = std::max(xi, n * (1.0 + std::abs(sf.b(i))) / (1.0 + a.norm()));
      eta = std::max(eta, a.norm());
    }
    it.x.push_back(xi * Eigen::MatrixXd::Identity(block.n, block.n));
    it.z.push_back(eta * Eigen::MatrixXd::Identity(block.n, block.n));
  }
  Blocks cost;
  for (const DenseBlock& block : sf.blocks) cost.push_back(block.cost);

  OracleSolution best;
  double best_measure = std::numeric_limits<double>::infinity();
  Iterate best_it = it;

  for (int iter = 0;; ++iter) {
    const Eigen::VectorXd r_p =
        sf.b - Apply(sf, it.x) - (d > 0 ? Eigen::VectorXd(sf.free_coeffs * it.free)
                                        : Eigen::VectorXd::Zero(m));
    const Blocks aty = Adjoint(sf, it.y);
    Blocks r_d;
    for (std::size_t j = 0; j < sf.blocks.size(); ++j) {
      r_d.push_back(cost[j] - it.z[j] - aty[j]);
    }
    const Eigen::VectorXd r_f =
        d > 0 ? Eigen::VectorXd(sf.free_cost - sf.free_coeffs.transpose() * it.y)
              : Eigen::VectorXd();
    const double pobj = Dot(cost, it.x) + (d > 0 ? sf.free_cost.dot(it.free) : 0.0);
    const double dobj = sf.b.dot(it.y);
    const double xz = Dot(it.x, it.z);
    const double pinf = r_p.norm() / b_scale;
    const double dinf =
        std::sqrt(Dot(r_d, r_d) + (d > 0 ? r_f.squaredNorm() : 0.0)) / c_scale;
    const double rgap =
        std::max(std::abs(pobj - dobj), std::abs(xz)) / (1.0 + std::abs(pobj) + std::abs(dobj));
    best.history.push_back({pobj, dobj, pinf, dinf});

    const double measure = std::max({pinf, dinf, rgap});
    if (measure < best_measure) {
      best_measure = measure;
      best_it = it;
      best.objective = pobj;
      best.dual_objective = dobj;
      best.primal_infeasibility = pinf;
      best.dual_infeasibility = dinf;
      best.relative_gap = rgap;
      best.iterations = iter;
    }
    if (measure <= options.tol || iter >= options.max_iterations) break;

    double biggest = it.y.norm();
    for (std::size_t j = 0; j < it.x.size(); ++j) {
      biggest = std::max({biggest, it.x[j].norm(), it.z[j].norm()});
    }
    if (!std::isfinite(biggest) || biggest > options.divergence_norm) {
      throw Error(ErrorCode::kNotStrictlyFeasible,
                  "oracle: iterates diverged; no strictly feasible point");
    }

    const double mu = xz / sf.total_dim;
    if (!Step(sf, mu, r_p, r_d, r_f, it)) break;
  }

  best.converged = best_measure <= options.tol;
  if (!best.converged && !(best_measure <= std::sqrt(options.tol))) {
    throw Error(ErrorCode::kMaxIterations,
                "oracle: accuracy " + std::to_string(best_measure) +
                    " after " + std::to_string(best.history.size()) + " iterations");
  }
  best.gap = best.objective - best.dual_objective;
  best.lambda = best_it.y;
  for (int j = 0; j < sf.original_blocks; ++j) {
    best.x.blocks.push_back(SymmetricMatrix::FromDense(best_it.x[j]));
  }
  best.x.free = d > 0 ? best_it.free : Eigen::VectorXd();
  return best;
}

double BruteForce2x2(const ConicSdpProblem& problem) {
  const BlockStructure& s = problem.structure;
  if (s.num_blocks() != 1 || s.psd_sizes[0] != 2 || s.free_dim != 0) {
    throw Error(ErrorCode::kUnsupportedStructure,
                "brute force: needs a single 2x2 block and no free variables");
  }
  // v = (x11, x12, x22); A . X = a . v with a = (A11, 2 A12, A22).
  auto to_vec = [](const Eigen::MatrixXd& a) {
    return Eigen::Vector3d(a(0, 0), 2.0 * a(0, 1), a(1, 1));
  };
  const int m = problem.num_constraints();
  const int m1 = problem.num_equalities();
  const Eigen::Vector3d c = to_vec(problem.cost_block(0));
  Eigen::MatrixXd rows(m, 3);
  for (int i = 0; i < m; ++i) {
    rows.row(i) = to_vec(problem.constraints[i].blocks[0].ToDense()).transpose();
  }
  const Eigen::VectorXd b = problem.rhs();
  Eigen::Vector3d particular = Eigen::Vector3d::Zero();
  Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(3, 3);
  if (m1 > 0) {
    const Eigen::MatrixXd e = rows.topRows(m1);
    const Eigen::VectorXd be = b.head(m1);
    particular = e.completeOrthogonalDecomposition().solve(be);
    if ((e * particular - be).norm() > 1e-9 * (1.0 + be.norm())) {
      throw Error(ErrorCode::kInfeasible, "brute force: inconsistent equalities");
    }
    basis = NullSpace(e);
  }
  const int k = static_cast<int>(basis.cols());
  const double b_inf = m > 0 ? b.cwiseAbs().maxCoeff() : 0.0;
  const double slack = 1e-12 * (1.0 + b_inf);

  auto value_at = [&](const Eigen::VectorXd& t, double* out) {
    const Eigen::Vector3d v = particular + (k > 0 ? Eigen::Vector3d(basis * t)
                                                  : Eigen::Vector3d::Zero());
    const double mean = 0.5 * (v(0) + v(2));
    if (mean - std::hypot(0.5 * (v(0) - v(2)), v(1)) < -slack) return false;
    for (int i = m1; i < m; ++i) {
      if (rows.row(i).dot(v) < b(i) - slack) return false;
    }
    *out = c.dot(v);
    return true;
  };

  if (k == 0) {
    double value = 0.0;
    if (!value_at(Eigen::VectorXd(), &value)) {
      throw Error(ErrorCode::kInfeasible, "brute force: no feasible point");
    }
    return value;
  }

  const int coarse = k == 1 ? 10001 : (k == 2 ? 101 : 22);
  const int fine = 21;
  // Scans the grid of points^k points over center +- half_width; returns
  // false if nothing feasible was found.
  auto scan = [&](const Eigen::VectorXd& center, double half_width, int points,
                  Eigen::VectorXd* best_t, double* best_value, bool* on_edge) {
    bool found = false;
    std::vector<int> idx(k, 0);
    const double h = 2.0 * half_width / (points - 1);
    while (true) {
      Eigen::VectorXd t(k);
      for (int a = 0; a < k; ++a) t(a) = center(a) - half_width + h * idx[a];
      double value = 0.0;
      if (value_at(t, &value) && (!found || value < *best_value)) {
        found = true;
        *best_value = value;
        *best_t = t;
        *on_edge = false;
        for (int a = 0; a < k; ++a) {
          if (idx[a] == 0 || idx[a] == points - 1) *on_edge = true;
        }
      }
      int a = 0;
      while (a < k && ++idx[a] == points) idx[a++] = 0;
      if (a == k) break;
    }
    return found;
  };

  double radius = 10.0 * (1.0 + particular.norm() + b_inf);
  Eigen::VectorXd best_t;
  double best_value = 0.0;
  bool on_edge = false;
  bool found = false;
  for (int attempt = 0; attempt < 12; ++attempt) {
    found = scan(Eigen::VectorXd::Zero(k), radius, coarse, &best_t, &best_value, &on_edge);
    if (found && !on_edge) break;
    radius *= 4.0;
  }
  if (!found) throw Error(ErrorCode::kInfeasible, "brute force: no feasible point");

  // Central-cut ellipsoid method on the slice, started from a ball holding
  // the whole search box. Every query point yields a cut: a violated
  // inequality, the PSD eigenvector cut, or the objective.
  Eigen::VectorXd center = Eigen::VectorXd::Zero(k);
  Eigen::MatrixXd shape =
      Eigen::MatrixXd::Identity(k, k) * (4.0 * radius * radius * k);
  double lo = -2.0 * radius * std::sqrt(static_cast<double>(k));
  double hi = -lo;
  const Eigen::VectorXd c_t = basis.transpose() * c;
  for (int it = 0; it < 20000; ++it) {
    if (k == 1) center(0) = 0.5 * (lo + hi);
    const Eigen::Vector3d v = particular + Eigen::Vector3d(basis * center);
    Eigen::VectorXd cut = c_t;
    double value = 0.0;
    if (value_at(center, &value)) {
      if (value < best_value) {
        best_value = value;
        best_t = center;
      }
    } else {
      Eigen::Matrix2d x;
      x << v(0), v(1), v(1), v(2);
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(x);
      if (eig.eigenvalues()(0) < -slack) {
        const Eigen::Vector2d u = eig.eigenvectors().col(0);
        cut = -basis.transpose() * Eigen::Vector3d(u(0) * u(0), 2.0 * u(0) * u(1), u(1) * u(1));
      } else {
        for (int i = m1; i < m; ++i) {
          if (rows.row(i).dot(v) < b(i) - slack) {
            cut = -basis.transpose() * rows.row(i).transpose();
            break;
          }
        }
      }
    }
    if (k == 1) {
      if (cut(0) > 0) {
        hi = center(0);
      } else {
        lo = center(0);
      }
      if (hi - lo <= 1e-15 * (1.0 + radius)) break;
      continue;
    }
    const double width = std::sqrt(cut.dot(shape * cut));
    const double objective_width = std::sqrt(c_t.dot(shape * c_t));
    if (!(width > 0.0) || objective_width <= 1e-13 * (1.0 + std::abs(best_value))) break;
    const Eigen::VectorXd step = shape * cut / width;
    const double kk = static_cast<double>(k);
    center -= step / (kk + 1.0);
    shape = kk * kk / (kk * kk - 1.0) * (shape - 2.0 / (kk + 1.0) * step * step.transpose());
    shape = Symmetrize(shape);
  }
  return best_value;
}

}  // namespace bmsdp
