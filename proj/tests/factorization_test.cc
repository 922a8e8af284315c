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

#include <random>
#include <vector>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "bmsdp/apps.h"
#include "bmsdp/error.h"
#include "bmsdp/factorization.h"
#include "bmsdp/linalg.h"
#include "test_fixtures.h"

namespace bmsdp {
namespace {

using testing::RandomMatrix;

FactorizedPoint Single(const Eigen::MatrixXd& y) {
  FactorizedPoint p;
  p.factors = {y};
  p.free = Eigen::VectorXd(0);
  return p;
}

TEST(TriangularTest, SmallValues) {
  EXPECT_EQ(Triangular(0), 0);
  EXPECT_EQ(Triangular(2), 3);
  EXPECT_EQ(Triangular(3), 6);
  const long long expected[] = {0, 1, 3, 6, 10, 15, 21, 28, 36, 45, 55};
  for (int k = 0; k <= 10; ++k) EXPECT_EQ(Triangular(k), expected[k]);
}

TEST(MinimalRankTest, LeastRankAboveBound) {
  EXPECT_EQ(MinimalRank(8, 12), 4);
  EXPECT_EQ(MinimalRank(4, 12), 3);
  EXPECT_EQ(MinimalRank(6, 6), 4);
  EXPECT_EQ(MinimalRank(10, 6), 5);
  EXPECT_EQ(MinimalRank(0, 5), 1);
  EXPECT_EQ(MinimalRank(1000, 5), 5);
}

TEST(LiftTest, Examples) {
  const PrimalPoint e = Lift(Single(Eigen::Vector2d(1, 0)));
  Eigen::MatrixXd e11 = Eigen::MatrixXd::Zero(2, 2);
  e11(0, 0) = 1;
  EXPECT_EQ(e.blocks[0].ToDense(), e11);
  EXPECT_EQ(Lift(Single(Eigen::MatrixXd::Identity(2, 2))).blocks[0].ToDense(),
            Eigen::MatrixXd::Identity(2, 2));
  std::mt19937_64 rng(1);
  for (int t = 0; t < 10; ++t) {
    const PrimalPoint x = Lift(Single(RandomMatrix(rng, 6, 3)));
    EXPECT_GE(MinEigenvalue(x.blocks[0].ToDense()), -1e-12);
  }
}

TEST(FactorPsdTest, Examples) {
  Eigen::MatrixXd e11 = Eigen::MatrixXd::Zero(2, 2);
  e11(0, 0) = 1;
  const Eigen::MatrixXd y = FactorPsd(e11, 1);
  EXPECT_NEAR(std::abs(y(0, 0)), 1.0, 1e-12);
  EXPECT_NEAR(y(1, 0), 0.0, 1e-12);

  try {
    FactorPsd(Eigen::MatrixXd::Identity(2, 2), 1);
    FAIL() << "expected kRankTooSmall";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRankTooSmall);
  }
  try {
    FactorPsd(Eigen::Vector2d(1, -1).asDiagonal(), 2);
    FAIL() << "expected kNotPsd";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotPsd);
  }

  std::mt19937_64 rng(2);
  const Eigen::MatrixXd g = RandomMatrix(rng, 5, 2);
  const Eigen::MatrixXd x = g * g.transpose();
  const Eigen::MatrixXd f = FactorPsd(x, 3);
  EXPECT_EQ(f.cols(), 3);
  EXPECT_LE((f * f.transpose() - x).norm(), 1e-8);
}

TEST(FactorTest, RoundTripsThroughLift) {
  const BlockStructure s{{4, 2}, 1, 1};
  PrimalPoint x = testing::RandomPsdPoint(s, 5);
  const std::vector<int> ranks = {4};
  const FactorizedPoint f = Factor(x, s, ranks);
  const PrimalPoint back = Lift(f);
  EXPECT_LE((back.blocks[0].ToDense() - x.blocks[0].ToDense()).norm(), 1e-8);
  EXPECT_EQ(back.blocks[1], x.blocks[1]);
  EXPECT_EQ(back.free, x.free);
}

TEST(AppendColumnTest, Examples) {
  const FactorizedPoint e1 = Single(Eigen::Vector2d(1, 0));
  EXPECT_EQ(Lift(AppendColumn(e1, 0, Eigen::Vector2d(0, 1), 0.0)).blocks[0],
            Lift(e1).blocks[0]);
  EXPECT_EQ(Lift(AppendColumn(e1, 0, Eigen::Vector2d(0, 1), 1.0)).blocks[0].ToDense(),
            Eigen::MatrixXd::Identity(2, 2));

  std::mt19937_64 rng(4);
  const FactorizedPoint y = Single(RandomMatrix(rng, 5, 2));
  const Eigen::VectorXd v = RandomMatrix(rng, 5, 1).col(0);
  const double alpha = 0.37;
  const Eigen::MatrixXd diff = Lift(AppendColumn(y, 0, v, alpha)).blocks[0].ToDense() -
                               Lift(y).blocks[0].ToDense() - alpha * alpha * v * v.transpose();
  EXPECT_LE(diff.norm(), 1e-12);
}

TEST(ConstraintRankTest, DuplicatesDoNotCount) {
  ProblemBuilder b({{2}, 1, 0});
  for (int i = 0; i < 2; ++i) {
    const int k = b.AddConstraint(ConstraintKind::kEquality, 1.0);
    b.AddEntry(k, 0, 0, 0, 1.0);
  }
  const ConicSdpProblem p = b.Build();
  const std::vector<int> all = {0, 1};
  EXPECT_EQ(ConstraintRank(p, all), 1);
}

TEST(MPrimeInequalityTest, EqualityOnlyIsRank) {
  ProblemBuilder b({{2}, 1, 0});
  for (int i = 0; i < 2; ++i) {
    const int k = b.AddConstraint(ConstraintKind::kEquality, 1.0);
    b.AddEntry(k, 0, 0, 0, 1.0);
  }
  const RankBoundReport r = MPrimeInequality(b.Build());
  EXPECT_EQ(r.m_prime, 1);
  EXPECT_EQ(r.method, RankBoundMethod::kExactEnumeration);
}

TEST(MPrimeInequalityTest, NoConstraints) {
  const RankBoundReport r = MPrimeInequality(testing::Unconstrained(Eigen::MatrixXd::Identity(3, 3)));
  EXPECT_EQ(r.m_prime, 0);
  EXPECT_EQ(r.ranks, std::vector<int>{1});
}

TEST(MPrimeInequalityTest, ActiveInequalityCounts) {
  ProblemBuilder b({{3}, 1, 0});
  for (int i = 0; i < 2; ++i) {
    const int k = b.AddConstraint(ConstraintKind::kEquality, 1.0);
    b.AddEntry(k, 0, i, i, 1.0);
  }
  const int k = b.AddConstraint(ConstraintKind::kInequality, 0.0);
  b.AddEntry(k, 0, 2, 2, 1.0);
  const ConicSdpProblem p = b.Build();
  const std::vector<int> subset = {2};
  EXPECT_TRUE(SimultaneouslyActive(p, subset));
  EXPECT_EQ(MPrimeInequality(p).m_prime, 3);
}

TEST(MPrimeInequalityTest, IncompatibleInequalitiesAreNotSimultaneouslyActive) {
  // X_11 >= 1 and -X_11 >= -2 cannot both be tight.
  ProblemBuilder b({{2}, 1, 0});
  const int lo = b.AddConstraint(ConstraintKind::kInequality, 1.0);
  b.AddEntry(lo, 0, 0, 0, 1.0);
  const int hi = b.AddConstraint(ConstraintKind::kInequality, -2.0);
  b.AddEntry(hi, 0, 0, 0, -1.0);
  const ConicSdpProblem p = b.Build();
  const std::vector<int> both = {0, 1};
  EXPECT_FALSE(SimultaneouslyActive(p, both));
  EXPECT_EQ(MPrimeInequality(p).m_prime, 1);
}

TEST(MPrimeInequalityTest, PrunedSearchMatchesExhaustive) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const ConicSdpProblem p = GenerateRandom({{3}, 1, 0}, 5, "EIIII", seed);
    MPrimeOptions exhaustive;
    exhaustive.exhaustive = true;
    EXPECT_EQ(MPrimeInequality(p).m_prime, MPrimeInequality(p, exhaustive).m_prime)
        << "seed " << seed;
  }
}

TEST(MPrimeInequalityTest, LargeProblemFallsBackToRank) {
  const ConicSdpProblem p = GenerateRandom({{4}, 1, 0}, 6, "EEIIII", 1);
  MPrimeOptions options;
  options.exact_enumeration_cap = 3;
  const RankBoundReport r = MPrimeInequality(p, options);
  EXPECT_EQ(r.method, RankBoundMethod::kRankUpperBound);
  EXPECT_EQ(r.m_prime, 6);
}

TEST(MPrimeConicTest, TailRankRange) {
  const ConicSdpProblem p = GenerateRandom({{2, 1}, 1, 0}, 3, "", 7);
  const RankBoundReport r = MPrimeConic(p, {{0, 1}});
  EXPECT_EQ(r.m_prime, 3);
  EXPECT_EQ(r.method, RankBoundMethod::kConicFormula);
  EXPECT_EQ(r.ranks, std::vector<int>{2});
}

TEST(MPrimeConicTest, InequalitiesAsScalarBlocks) {
  // Two equalities on the factorized block plus three inequalities written
  // as A_i . X - s_i = b_i with s_i a 1x1 PSD block.
  ProblemBuilder b({{3, 1, 1, 1}, 1, 0});
  for (int i = 0; i < 5; ++i) {
    const int k = b.AddConstraint(ConstraintKind::kEquality, 1.0);
    b.AddEntry(k, 0, i % 3, (i + 1) % 3, 1.0);
    if (i >= 2) b.AddEntry(k, i - 1, 0, 0, -1.0);
  }
  const ConicSdpProblem p = b.Build();
  // First inequality active (r = 0), the other two inactive (r = 1).
  EXPECT_EQ(MPrimeConic(p, {{0}, {1}, {1}}).m_prime, 3);
  EXPECT_EQ(MPrimeConic(p, {{0}, {0}, {1}}).m_prime, 4);
}

TEST(MPrimeConicTest, SecondOrderConeBoundaryRank) {
  const SocInstance inst = RandomSocInstance(3, 3, 2, 11);
  const ConicSdpProblem p = BuildSocEmbedding(inst);
  ASSERT_EQ(p.num_constraints(), 2 + 3);
  // m' = m1 + tau(n2 - 1) - tau(r2) with the arrow-form equalities counted
  // in m; the boundary rank is n2 - 1 = 2.
  EXPECT_EQ(MPrimeConic(p, {{2}}).m_prime, 2 + Triangular(2) - Triangular(2));
  EXPECT_EQ(MPrimeConic(p, {{1, 2}}).m_prime, 2 + Triangular(2) - Triangular(1));
}

TEST(MPrimeConicTest, Errors) {
  const ConicSdpProblem p = GenerateRandom({{2, 1}, 1, 0}, 3, "", 7);
  EXPECT_THROW(MPrimeConic(p, {{}}), Error);
  EXPECT_THROW(MPrimeConic(p, {{0}, {0}}), Error);
  EXPECT_THROW(MPrimeConic(p, {{2}}), Error);
}

}  // namespace
}  // namespace bmsdp
