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

#include <cstdint>
#include <vector>

#include <benchmark/benchmark.h>

#include "bmsdp/apps.h"
#include "bmsdp/certification.h"
#include "bmsdp/factorization.h"
#include "bmsdp/local_solver.h"
#include "bmsdp/oracle.h"
#include "bmsdp/staircase.h"

namespace bmsdp {
namespace {

ConicSdpProblem Generic(int n) {
  const int m = n / 2 + 2;
  return GenerateRandom({{n}, 1, 0}, m, "", 1);
}

void BM_AlValueGrad(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ConicSdpProblem p = Generic(n);
  const std::vector<int> ranks = DefaultRankBound(p).ranks;
  const FactorVariables v = RandomStart(p, ranks, SolverConfig{});
  const Eigen::VectorXd lambda = Eigen::VectorXd::Ones(p.num_constraints());
  for (auto _ : state) {
    benchmark::DoNotOptimize(AlValueGrad(p, v, lambda, 10.0));
  }
}
BENCHMARK(BM_AlValueGrad)->Arg(20)->Arg(50)->Arg(100);

void BM_AlHessianVector(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ConicSdpProblem p = Generic(n);
  const std::vector<int> ranks = DefaultRankBound(p).ranks;
  SolverConfig config;
  const FactorVariables v = RandomStart(p, ranks, config);
  config.seed = 1;
  const FactorVariables u = RandomStart(p, ranks, config);
  const Eigen::VectorXd lambda = Eigen::VectorXd::Ones(p.num_constraints());
  for (auto _ : state) {
    benchmark::DoNotOptimize(AlHessianVector(p, v, lambda, 10.0, u));
  }
}
BENCHMARK(BM_AlHessianVector)->Arg(20)->Arg(50)->Arg(100);

void BM_StaircaseGeneric(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ConicSdpProblem p = Generic(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(StaircaseSolve(p));
  }
}
BENCHMARK(BM_StaircaseGeneric)->Arg(12)->Arg(24)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_OracleGeneric(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ConicSdpProblem p = Generic(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(OracleSolve(p));
  }
}
BENCHMARK(BM_OracleGeneric)->Arg(12)->Arg(24)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_Certify(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ConicSdpProblem p = Generic(n);
  const SolveReport r = StaircaseSolve(p);
  for (auto _ : state) {
    const Multipliers mult = EstimateMultipliers(p, r.point);
    benchmark::DoNotOptimize(Certify(p, r.point, mult));
  }
}
BENCHMARK(BM_Certify)->Arg(12)->Arg(24)->Arg(40);

void BM_MPrimeEnumeration(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const ConicSdpProblem p = GenerateRandom({{4}, 1, 0}, m, std::string(m, 'I'), 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(MPrimeInequality(p));
  }
}
BENCHMARK(BM_MPrimeEnumeration)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_SensingSymmetric(benchmark::State& state) {
  const SensingFixture f = BuildSensingSymmetric(8, 12, Eigen::MatrixXd::Identity(8, 8), 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(StaircaseSolve(f.problem));
  }
}
BENCHMARK(BM_SensingSymmetric)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace bmsdp

BENCHMARK_MAIN();
