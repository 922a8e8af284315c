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

#include "bmsdp/local_solver.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "bmsdp/error.h"
#include "bmsdp/linalg.h"

namespace bmsdp {

void ValidateConfig(const SolverConfig& config) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::kInvalidArgument, std::string("config: ") + what);
  };
  require(config.outer_tol > 0.0, "outer_tol must be positive");
  require(config.feas_tol > 0.0, "feas_tol must be positive");
  require(config.max_outer >= 1, "max_outer must be >= 1");
  require(config.max_inner >= 1, "max_inner must be >= 1");
  require(config.penalty_init > 0.0, "penalty_init must be positive");
  require(config.penalty_growth > 1.0, "penalty_growth must exceed 1");
  require(config.tr_radius_init > 0.0, "tr_radius_init must be positive");
  require(config.init_scale > 0.0, "init_scale must be positive");
}

int FactorVariables::size() const {
  long long total = free.size();
  for (const Eigen::MatrixXd& y : factors) total += y.size();
  return static_cast<int>(total);
}

Eigen::VectorXd FactorVariables::Flatten() const {
  Eigen::VectorXd out(size());
  Eigen::Index offset = 0;
  for (const Eigen::MatrixXd& y : factors) {
    out.segment(offset, y.size()) = y.reshaped();
    offset += y.size();
  }
  out.tail(free.size()) = free;
  return out;
}

void FactorVariables::Unflatten(const Eigen::VectorXd& flat) {
  if (flat.size() != size()) {
    throw Error(ErrorCode::kDimensionMismatch, "unflatten: length mismatch");
  }
  Eigen::Index offset = 0;
  for (Eigen::MatrixXd& y : factors) {
    y.reshaped() = flat.segment(offset, y.size());
    offset += y.size();
  }
  free = flat.tail(free.size());
}

FactorVariables FactorVariables::ZerosLike() const {
  FactorVariables out;
  for (const Eigen::MatrixXd& y : factors) {
    out.factors.push_back(Eigen::MatrixXd::Zero(y.rows(), y.cols()));
  }
  out.free = Eigen::VectorXd::Zero(free.size());
  return out;
}

FactorVariables ToVariables(const FactorizedPoint& point,
                            const BlockStructure& structure) {
  if (static_cast<int>(point.factors.size()) != structure.factorized_count ||
      static_cast<int>(point.tail_blocks.size()) != structure.tail_count()) {
    throw Error(ErrorCode::kDimensionMismatch, "variables: layout mismatch");
  }
  FactorVariables vars;
  vars.factors = point.factors;
  for (const SymmetricMatrix& x : point.tail_blocks) {
    const SymmetricEigen eig = EigenDecompose(x.ToDense());
    const Eigen::VectorXd roots = eig.values.cwiseMax(0.0).cwiseSqrt();
    vars.factors.push_back(eig.vectors * roots.asDiagonal());
  }
  vars.free = point.free.size() == structure.free_dim
                  ? point.free
                  : Eigen::VectorXd::Zero(structure.free_dim);
  return vars;
}

FactorizedPoint ToFactorizedPoint(const FactorVariables& vars,
                                  const BlockStructure& structure) {
  FactorizedPoint point;
  for (int j = 0; j < structure.num_blocks(); ++j) {
    const Eigen::MatrixXd& y = vars.factors.at(j);
    if (structure.is_factorized(j)) {
      point.factors.push_back(y);
    } else {
      point.tail_blocks.push_back(SymmetricMatrix::FromDense(y * y.transpose()));
    }
  }
  point.free = vars.free;
  return point;
}

Eigen::VectorXd ConstraintResiduals(const ConicSdpProblem& problem,
                                    const FactorVariables& vars) {
  const int m = problem.num_constraints();
  Eigen::VectorXd c(m);
  for (int i = 0; i < m; ++i) {
    const Constraint& con = problem.constraints[i];
    double value = -con.rhs;
    for (std::size_t j = 0; j < con.blocks.size(); ++j) {
      if (!con.blocks[j].empty()) value += con.blocks[j].DotGram(vars.factors[j]);
    }
    if (vars.free.size() > 0) value += con.free.dot(vars.free);
    c(i) = value;
  }
  return c;
}

double Objective(const ConicSdpProblem& problem, const FactorVariables& vars) {
  double value = 0.0;
  for (std::size_t j = 0; j < vars.factors.size(); ++j) {
    const Eigen::MatrixXd& y = vars.factors[j];
    value += y.cwiseProduct(problem.cost_block(static_cast<int>(j)) * y).sum();
  }
  if (vars.free.size() > 0) value += problem.cost.free.dot(vars.free);
  return value;
}

double Infeasibility(const ConicSdpProblem& problem,
                     const Eigen::VectorXd& residuals) {
  double sum = 0.0;
  for (int i = 0; i < residuals.size(); ++i) {
    const double v = problem.is_inequality(i) ? std::min(0.0, residuals(i)) : residuals(i);
    sum += v * v;
  }
  return std::sqrt(sum);
}

namespace {

Eigen::VectorXd ShiftedMultipliers(const ConicSdpProblem& problem,
                                   const Eigen::VectorXd& lambda,
                                   const Eigen::VectorXd& c, double penalty) {
  Eigen::VectorXd shifted = lambda - penalty * c;
  for (int i = 0; i < shifted.size(); ++i) {
    if (problem.is_inequality(i)) shifted(i) = std::max(0.0, shifted(i));
  }
  return shifted;
}

// out_j = scale * (C_j - sum_i w_i A_ij) Y_j for every block.
void SlackTimesFactors(const ConicSdpProblem& problem, const Eigen::VectorXd& w,
                       const FactorVariables& y, double scale,
                       FactorVariables& out) {
  for (std::size_t j = 0; j < y.factors.size(); ++j) {
    out.factors[j] = scale * (problem.cost_block(static_cast<int>(j)) * y.factors[j]);
  }
  for (int i = 0; i < problem.num_constraints(); ++i) {
    if (w(i) == 0.0) continue;
    const Constraint& con = problem.constraints[i];
    for (std::size_t j = 0; j < y.factors.size(); ++j) {
      if (!con.blocks[j].empty()) {
        con.blocks[j].MultiplyAddTo(-scale * w(i), y.factors[j], out.factors[j]);
      }
    }
  }
}

}  // namespace

AlEvaluation AlValueGrad(const ConicSdpProblem& problem,
                         const FactorVariables& vars,
                         const Eigen::VectorXd& lambda, double penalty) {
  AlEvaluation eval;
  eval.residuals = ConstraintResiduals(problem, vars);
  eval.objective = Objective(problem, vars);
  eval.shifted_lambda = ShiftedMultipliers(problem, lambda, eval.residuals, penalty);
  double value = eval.objective;
  for (int i = 0; i < eval.residuals.size(); ++i) {
    const double c = eval.residuals(i);
    if (!problem.is_inequality(i)) {
      value += -lambda(i) * c + 0.5 * penalty * c * c;
    } else if (penalty > 0.0) {
      const double s = eval.shifted_lambda(i);
      value += (s * s - lambda(i) * lambda(i)) / (2.0 * penalty);
    } else {
      value += -lambda(i) * c;
    }
  }
  eval.value = value;
  eval.gradient = vars.ZerosLike();
  SlackTimesFactors(problem, eval.shifted_lambda, vars, 2.0, eval.gradient);
  if (vars.free.size() > 0) {
    eval.gradient.free = problem.cost.free;
    for (int i = 0; i < problem.num_constraints(); ++i) {
      eval.gradient.free -= eval.shifted_lambda(i) * problem.constraints[i].free;
    }
  }
  return eval;
}

FactorVariables AlHessianVector(const ConicSdpProblem& problem,
                                const FactorVariables& vars,
                                const Eigen::VectorXd& lambda, double penalty,
                                const FactorVariables& direction) {
  const Eigen::VectorXd c = ConstraintResiduals(problem, vars);
  const Eigen::VectorXd shifted = ShiftedMultipliers(problem, lambda, c, penalty);
  FactorVariables out = vars.ZerosLike();
  SlackTimesFactors(problem, shifted, direction, 2.0, out);
  if (penalty == 0.0) return out;
  for (int i = 0; i < problem.num_constraints(); ++i) {
    if (problem.is_inequality(i) && lambda(i) - penalty * c(i) <= 0.0) continue;
    const Constraint& con = problem.constraints[i];
    double dc = 0.0;
    for (std::size_t j = 0; j < con.blocks.size(); ++j) {
      if (!con.blocks[j].empty()) {
        dc += con.blocks[j].DotSymmetricProduct(direction.factors[j], vars.factors[j]);
      }
    }
    if (direction.free.size() > 0) dc += con.free.dot(direction.free);
    if (dc == 0.0) continue;
    for (std::size_t j = 0; j < con.blocks.size(); ++j) {
      if (!con.blocks[j].empty()) {
        con.blocks[j].MultiplyAddTo(2.0 * penalty * dc, vars.factors[j], out.factors[j]);
      }
    }
    if (out.free.size() > 0) out.free += penalty * dc * con.free;
  }
  return out;
}

LagrangianState MakeState(const ConicSdpProblem& problem,
                          FactorVariables point, Eigen::VectorXd lambda,
                          double penalty) {
  LagrangianState state;
  const AlEvaluation eval = AlValueGrad(problem, point, lambda, penalty);
  state.point = std::move(point);
  state.lambda = std::move(lambda);
  state.penalty = penalty;
  state.objective = eval.objective;
  state.al_value = eval.value;
  state.infeasibility = Infeasibility(problem, eval.residuals);
  state.stationarity = eval.gradient.Flatten().norm();
  return state;
}

namespace {

constexpr int kDenseCurvatureLimit = 800;

class AlModel {
 public:
  AlModel(const ConicSdpProblem& problem, const LagrangianState& state)
      : problem_(problem), lambda_(state.lambda), penalty_(state.penalty) {}

  AlEvaluation Evaluate(const FactorVariables& x) const {
    return AlValueGrad(problem_, x, lambda_, penalty_);
  }
  double Value(const FactorVariables& x) const { return Evaluate(x).value; }

  Eigen::VectorXd Hv(const FactorVariables& x, const Eigen::VectorXd& v) const {
    FactorVariables dir = x.ZerosLike();
    dir.Unflatten(v);
    return AlHessianVector(problem_, x, lambda_, penalty_, dir).Flatten();
  }

  // Most negative Hessian eigenpair from the dense Hessian, if small enough.
  bool NegativeCurvature(const FactorVariables& x, Eigen::VectorXd* direction) const {
    const int size = x.size();
    if (size == 0 || size > kDenseCurvatureLimit) return false;
    Eigen::MatrixXd h(size, size);
    for (int k = 0; k < size; ++k) h.col(k) = Hv(x, Eigen::VectorXd::Unit(size, k));
    h = Symmetrize(h);
    const SymmetricEigen eig = EigenDecompose(h);
    const double scale = std::max(std::abs(eig.values(0)), std::abs(eig.values(size - 1)));
    if (eig.values(0) >= -1e-8 * (1.0 + scale)) return false;
    *direction = eig.vectors.col(0);
    return true;
  }

 private:
  const ConicSdpProblem& problem_;
  const Eigen::VectorXd& lambda_;
  double penalty_;
};

// Steihaug-Toint truncated CG for min g.s + s.Hs/2 with ||s|| <= radius.
Eigen::VectorXd TruncatedCg(const AlModel& model, const FactorVariables& x,
                            const Eigen::VectorXd& g, double radius) {
  const int n = static_cast<int>(g.size());
  Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd r = g;
  Eigen::VectorXd d = -r;
  const double gnorm = g.norm();
  const double stop = gnorm * std::min(0.5, std::sqrt(gnorm));
  auto to_boundary = [&](const Eigen::VectorXd& s0, const Eigen::VectorXd& dir) {
    const double a = dir.squaredNorm();
    const double b = 2.0 * s0.dot(dir);
    const double c = s0.squaredNorm() - radius * radius;
    const double tau = (-b + std::sqrt(std::max(0.0, b * b - 4.0 * a * c))) / (2.0 * a);
    return Eigen::VectorXd(s0 + tau * dir);
  };
  for (int k = 0; k < std::max(n, 1) + 5; ++k) {
    const Eigen::VectorXd hd = model.Hv(x, d);
    const double dhd = d.dot(hd);
    if (dhd <= 1e-300 * d.squaredNorm()) return to_boundary(s, d);
    const double alpha = r.squaredNorm() / dhd;
    const Eigen::VectorXd next = s + alpha * d;
    if (next.norm() >= radius) return to_boundary(s, d);
    s = next;
    const Eigen::VectorXd r_next = r + alpha * hd;
    if (r_next.norm() <= stop) break;
    const double beta = r_next.squaredNorm() / r.squaredNorm();
    r = r_next;
    d = -r + beta * d;
  }
  return s;
}

}  // namespace

LagrangianState InnerMinimize(const ConicSdpProblem& problem,
                              LagrangianState state,
                              const SolverConfig& config) {
  const AlModel model(problem, state);
  double radius = config.tr_radius_init;
  FactorVariables x = state.point;
  AlEvaluation eval = model.Evaluate(x);
  Eigen::VectorXd g = eval.gradient.Flatten();
  int iterations = 0;
  int accepted = 0;
  bool limit = false;
  while (true) {
    const double infeas = Infeasibility(problem, eval.residuals);
    const double target = std::max(config.outer_tol, 0.1 * infeas);
    if (g.norm() <= target) {
      Eigen::VectorXd v;
      if (!model.NegativeCurvature(x, &v)) break;
      if (v.dot(g) > 0.0) v = -v;
      bool moved = false;
      for (double step = std::max(radius, 1.0); step > 1e-12; step *= 0.5) {
        FactorVariables trial = x;
        trial.Unflatten(x.Flatten() + step * v);
        AlEvaluation trial_eval = model.Evaluate(trial);
        if (trial_eval.value < eval.value) {
          x = std::move(trial);
          eval = std::move(trial_eval);
          moved = true;
          break;
        }
      }
      if (!moved) break;
      g = eval.gradient.Flatten();
      ++accepted;
      ++iterations;
      if (iterations >= config.max_inner) {
        limit = true;
        break;
      }
      continue;
    }
    if (iterations >= config.max_inner) {
      limit = true;
      break;
    }
    ++iterations;
    const Eigen::VectorXd s = TruncatedCg(model, x, g, radius);
    const double predicted = -(g.dot(s) + 0.5 * s.dot(model.Hv(x, s)));
    FactorVariables trial = x;
    trial.Unflatten(x.Flatten() + s);
    AlEvaluation trial_eval = model.Evaluate(trial);
    const double actual = eval.value - trial_eval.value;
    const double noise = 1e-14 * (1.0 + std::abs(eval.value));
    double ratio;
    if (std::abs(predicted) <= noise && actual >= -noise) {
      ratio = 1.0;
    } else {
      ratio = predicted > 0.0 ? actual / predicted : -1.0;
    }
    if (ratio >= 0.1 && std::isfinite(trial_eval.value)) {
      x = std::move(trial);
      eval = std::move(trial_eval);
      g = eval.gradient.Flatten();
      ++accepted;
    }
    if (ratio >= 0.75) {
      radius = std::min(2.0 * radius, 1e8);
    } else if (ratio < 0.1) {
      radius *= 0.25;
    }
    if (radius < 1e-14 * (1.0 + x.Flatten().norm())) break;
  }
  state.point = std::move(x);
  state.objective = eval.objective;
  state.al_value = eval.value;
  state.infeasibility = Infeasibility(problem, eval.residuals);
  state.stationarity = g.norm();
  state.accepted_steps += accepted;
  state.inner_iterations += iterations;
  state.hit_iteration_limit = limit;
  return state;
}

FactorVariables RandomStart(const ConicSdpProblem& problem,
                            std::span<const int> ranks,
                            const SolverConfig& config) {
  const BlockStructure& s = problem.structure;
  if (static_cast<int>(ranks.size()) != s.factorized_count) {
    throw Error(ErrorCode::kDimensionMismatch, "random start: one rank per factorized block");
  }
  double trace = 1.0;
  for (const Constraint& con : problem.constraints) {
    double norm2 = con.free.squaredNorm();
    for (const SparseSymmetric& a : con.blocks) norm2 += a.SquaredFrobeniusNorm();
    if (norm2 > 0.0) trace = std::max(trace, 1.0 + std::abs(con.rhs) / std::sqrt(norm2));
  }
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  FactorVariables vars;
  for (int j = 0; j < s.num_blocks(); ++j) {
    const int n = s.psd_sizes[j];
    const int p = s.is_factorized(j) ? ranks[j] : n;
    if (p < 1 || p > n) {
      throw Error(ErrorCode::kInvalidArgument, "random start: rank " + std::to_string(p) +
                                                   " outside [1, " + std::to_string(n) + "]");
    }
    const double sigma = config.init_scale * std::sqrt(trace / (static_cast<double>(n) * p));
    Eigen::MatrixXd y(n, p);
    for (int c = 0; c < p; ++c) {
      for (int r = 0; r < n; ++r) y(r, c) = sigma * normal(rng);
    }
    vars.factors.push_back(std::move(y));
  }
  vars.free.resize(s.free_dim);
  for (int i = 0; i < s.free_dim; ++i) {
    vars.free(i) = config.init_scale * std::sqrt(trace / s.free_dim) * normal(rng);
  }
  return vars;
}

AlResult AlSolve(const ConicSdpProblem& problem, std::span<const int> ranks,
                 const SolverConfig& config) {
  ValidateConfig(config);
  return AlSolveFrom(problem, RandomStart(problem, ranks, config),
                     Eigen::VectorXd::Zero(problem.num_constraints()),
                     config.penalty_init, config);
}

AlResult AlSolveFrom(const ConicSdpProblem& problem, FactorVariables start,
                     Eigen::VectorXd lambda, double penalty,
                     const SolverConfig& config) {
  ValidateConfig(config);
  if (lambda.size() != problem.num_constraints()) {
    throw Error(ErrorCode::kDimensionMismatch, "al_solve: multiplier length mismatch");
  }
  const Eigen::VectorXd b = problem.rhs();
  const double scale = 1.0 + (b.size() > 0 ? b.cwiseAbs().maxCoeff() : 0.0);
  AlResult result;
  LagrangianState state = MakeState(problem, std::move(start), std::move(lambda), penalty);
  double previous_v = std::numeric_limits<double>::infinity();
  double best_infeas = std::numeric_limits<double>::infinity();
  int stalls_at_cap = 0;
  for (int outer = 0; outer < config.max_outer; ++outer) {
    state = InnerMinimize(problem, std::move(state), config);
    const Eigen::VectorXd c = ConstraintResiduals(problem, state.point);
    double v2 = 0.0;
    for (int i = 0; i < c.size(); ++i) {
      const double term = problem.is_inequality(i)
                              ? std::min(c(i), state.lambda(i) / state.penalty)
                              : c(i);
      v2 += term * term;
    }
    const double v = std::sqrt(v2);
    result.trace.push_back({outer, state.objective, state.infeasibility,
                            state.stationarity, state.penalty, state.inner_iterations});

    state.lambda = ShiftedMultipliers(problem, state.lambda, c, state.penalty)
                       .cwiseMax(-kMultiplierCap)
                       .cwiseMin(kMultiplierCap);
    // The inner gradient is the Lagrangian gradient at the updated
    // multipliers, so state.stationarity stays as computed.
    state.al_value = AlValueGrad(problem, state.point, state.lambda, state.penalty).value;

    if (v <= config.feas_tol * scale && state.stationarity <= config.outer_tol * scale) {
      result.converged = true;
      break;
    }
    if (state.penalty >= kPenaltyCap) {
      stalls_at_cap = state.infeasibility < 0.9 * best_infeas ? 0 : stalls_at_cap + 1;
      if (stalls_at_cap >= 5 && state.infeasibility > config.feas_tol * scale) {
        throw Error(ErrorCode::kInfeasible,
                    "al_solve: infeasibility stalled at " +
                        std::to_string(state.infeasibility) + " with maximal penalty");
      }
    }
    best_infeas = std::min(best_infeas, state.infeasibility);
    if (v > 0.25 * previous_v) {
      state.penalty = std::min(state.penalty * config.penalty_growth, kPenaltyCap);
    }
    previous_v = v;
  }
  result.state = std::move(state);
  return result;
}

}  // namespace bmsdp
