// Copyright 2026 The isamp Authors
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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "isamp/numeric.hpp"
#include "isamp/rng.hpp"

namespace isamp {
namespace {

TEST(RngStream, PhiloxKnownAnswerForZeroKeyAndCounter) {
  RngStream rng(0, 0);
  EXPECT_EQ(rng(), 0x6627e8d5e169c58dULL);
  EXPECT_EQ(rng(), 0xbc57ac4c9b00dbd8ULL);
}

TEST(RngStream, SameSeedAndStreamReproduce) {
  RngStream a(42, 7);
  RngStream b(42, 7);
  for (int i = 0; i < 1000; ++i) {
    ASSERT_EQ(a(), b());
  }
}

TEST(RngStream, StreamsAndSeedsDiffer) {
  RngStream a(42, 7);
  RngStream b(42, 8);
  RngStream c(43, 7);
  int equal_ab = 0;
  int equal_ac = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a();
    equal_ab += x == b();
    equal_ac += x == c();
  }
  EXPECT_EQ(equal_ab, 0);
  EXPECT_EQ(equal_ac, 0);
}

TEST(RngStream, UniformMomentsAndRange) {
  RngStream rng(1, 1);
  const int n = 200000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double v = rng.uniform_open();
    ASSERT_GT(v, 0.0);
    ASSERT_LT(v, 1.0);
    sum += u;
    sum_sq += u * u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);
  EXPECT_NEAR(sum_sq / n - 0.25, 1.0 / 12.0, 0.002);
}

TEST(RngStream, NormalMoments) {
  RngStream rng(2, 1);
  const int n = 200000;
  double m1 = 0.0;
  double m2 = 0.0;
  double m4 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    m1 += z;
    m2 += z * z;
    m4 += z * z * z * z;
  }
  EXPECT_NEAR(m1 / n, 0.0, 0.01);
  EXPECT_NEAR(m2 / n, 1.0, 0.015);
  EXPECT_NEAR(m4 / n, 3.0, 0.1);
}

TEST(RngStream, GammaAndChiSquaredMoments) {
  RngStream rng(3, 1);
  const int n = 200000;
  for (double shape : {0.5, 1.5, 4.0}) {
    double m1 = 0.0;
    double m2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double g = rng.gamma(shape);
      ASSERT_GT(g, 0.0);
      m1 += g;
      m2 += g * g;
    }
    m1 /= n;
    EXPECT_NEAR(m1, shape, 0.02 * shape + 0.01) << "shape " << shape;
    EXPECT_NEAR(m2 / n - m1 * m1, shape, 0.05 * shape + 0.01) << "shape " << shape;
  }
  double mean = 0.0;
  for (int i = 0; i < n; ++i) {
    mean += rng.chi_squared(3.0);
  }
  EXPECT_NEAR(mean / n, 3.0, 0.03);
}

TEST(CompensatedSum, RecoversSmallTermsLostByNaiveSummation) {
  CompensatedSum<double> acc;
  double naive = 0.0;
  acc.add(1.0);
  naive += 1.0;
  for (int i = 0; i < 1000000; ++i) {
    acc.add(1e-16);
    naive += 1e-16;
  }
  EXPECT_EQ(naive, 1.0);
  EXPECT_NEAR(acc.value(), 1.0 + 1e-10, 1e-15);
}

TEST(CompensatedSum, WorksOnEigenVectors) {
  CompensatedSum<Vector> acc(Vector::Zero(2));
  for (int i = 0; i < 10; ++i) {
    acc.add(Vector::Constant(2, 0.1));
  }
  EXPECT_NEAR(acc.value()(0), 1.0, 1e-15);
  EXPECT_NEAR(acc.value()(1), 1.0, 1e-15);
}

TEST(Logsumexp, StableForLargeMagnitudes) {
  Vector x(3);
  x << 1000.0, 1000.0, -std::numeric_limits<double>::infinity();
  EXPECT_NEAR(logsumexp(x), 1000.0 + std::log(2.0), 1e-12);
  x << -1000.0, -1000.0, -1000.0;
  EXPECT_NEAR(logsumexp(x), -1000.0 + std::log(3.0), 1e-12);
}

TEST(Logsumexp, AllNegativeInfinityGivesNegativeInfinity) {
  const Vector x = Vector::Constant(4, -std::numeric_limits<double>::infinity());
  EXPECT_EQ(logsumexp(x), -std::numeric_limits<double>::infinity());
}

TEST(RepairSpd, LeavesPositiveDefiniteMatrixUntouched) {
  Matrix m(2, 2);
  m << 2.0, 0.5, 0.5, 1.0;
  EXPECT_EQ(repair_spd(m), m);
}

TEST(RepairSpd, SemidefiniteGetsTraceScaledJitter) {
  Matrix m(2, 2);
  m << 1.0, 0.0, 0.0, 0.0;
  const Matrix r = repair_spd(m);
  // trace/n = 0.5, first jitter 1e-8
  EXPECT_DOUBLE_EQ(r(0, 0), 1.0 + 0.5e-8);
  EXPECT_DOUBLE_EQ(r(1, 1), 0.5e-8);
  EXPECT_EQ(r(0, 1), 0.0);
  EXPECT_EQ(Eigen::LLT<Matrix>(r).info(), Eigen::Success);
}

TEST(RepairSpd, SymmetrizesInput) {
  Matrix m(2, 2);
  m << 2.0, 1.0, 0.0, 2.0;
  const Matrix r = repair_spd(m);
  EXPECT_EQ(r(0, 1), 0.5);
  EXPECT_EQ(r(1, 0), 0.5);
}

TEST(RepairSpd, CovarianceKindRejectsZeroMatrix) {
  EXPECT_THROW(repair_spd(Matrix(Matrix::Zero(2, 2)), SpdKind::Covariance), DegenerateEnsemble);
}

TEST(RepairSpd, HessianKindRepairsZeroAndIndefinite) {
  const Matrix zero = repair_spd(Matrix(Matrix::Zero(2, 2)), SpdKind::Hessian);
  EXPECT_NEAR(zero(0, 0), 1e-8, 1e-20);
  EXPECT_EQ(Eigen::LLT<Matrix>(zero).info(), Eigen::Success);
  Matrix indefinite(2, 2);
  indefinite << 1.0, 0.0, 0.0, -3.0;
  const Matrix r = repair_spd(indefinite, SpdKind::Hessian);
  EXPECT_EQ(Eigen::LLT<Matrix>(r).info(), Eigen::Success);
}

TEST(RepairSpd, FloatInstantiation) {
  Eigen::MatrixXf m(2, 2);
  m << 1.0f, 0.0f, 0.0f, 0.0f;
  const Eigen::MatrixXf r = repair_spd<float>(m);
  EXPECT_EQ(Eigen::LLT<Eigen::MatrixXf>(r).info(), Eigen::Success);
}

}  // namespace
}  // namespace isamp
