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
#include <numbers>

#include "isamp/ensemble.hpp"
#include "isamp/proposals.hpp"
#include "isamp/rng.hpp"

namespace isamp {
namespace {

Matrix spd3() {
  Matrix c(3, 3);
  c << 2.0, 0.3, 0.1, 0.3, 1.0, -0.2, 0.1, -0.2, 0.5;
  return c;
}

Vector v2(double a, double b) {
  Vector out(2);
  out << a, b;
  return out;
}

TEST(GaussianProposal, CholeskyReproducesCovariance) {
  const GaussianProposal g(Vector::Zero(3), spd3());
  EXPECT_LT((g.chol() * g.chol().transpose() - spd3()).norm() / spd3().norm(), 1e-10);
}

TEST(GaussianProposal, RejectsNonSpdAndMismatch) {
  Matrix bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;
  EXPECT_THROW(GaussianProposal(Vector::Zero(2), bad), DomainError);
  EXPECT_THROW(GaussianProposal(Vector::Zero(3), Matrix::Identity(2, 2)), DomainError);
}

TEST(GaussianProposal, StandardNormalDensityAtOrigin) {
  const GaussianProposal g(Vector::Zero(2), Matrix::Identity(2, 2));
  EXPECT_NEAR(g.log_density(Vector::Zero(2)), -std::log(2.0 * std::numbers::pi), 1e-12);
  EXPECT_NEAR(g.log_density(Vector::Zero(2)), -1.837877, 1e-6);
}

TEST(GaussianProposal, NearPointMassDrawsCollapseOnMean) {
  const GaussianProposal g(v2(5.0, 5.0), 1e-30 * Matrix::Identity(2, 2));
  RngStream rng(1, 0);
  const Matrix s = sample(Proposal(g), rng, 100);
  EXPECT_LT((s.colwise() - v2(5.0, 5.0)).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(GaussianProposal, SampleMeanWithinCltBound) {
  const Proposal g = GaussianProposal(Vector::Zero(2), Matrix::Identity(2, 2));
  RngStream rng(2, 0);
  const Matrix s = sample(g, rng, 100000);
  EXPECT_LT(s.rowwise().mean().cwiseAbs().maxCoeff(), 0.02);
}

TEST(GaussianProposal, MahalanobisMeanMatchesDimension) {
  const GaussianProposal g(Vector::Constant(3, 1.0), spd3());
  RngStream rng(3, 0);
  const Matrix prec = spd3().inverse();
  double acc = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const Vector d = g.draw(rng) - g.mean();
    acc += d.dot(prec * d);
  }
  EXPECT_NEAR(acc / n / 3.0, 1.0, 0.03);
}

TEST(Sampling, DeterministicGivenStream) {
  const Proposal g = GaussianProposal(Vector::Zero(3), spd3());
  RngStream a(9, 4);
  RngStream b(9, 4);
  EXPECT_EQ(sample(g, a, 50), sample(g, b, 50));
}

TEST(StudentTProposal, LargeNuApproachesGaussian) {
  const StudentTProposal t(Vector::Zero(3), spd3(), 1e6);
  const GaussianProposal g(Vector::Zero(3), spd3());
  RngStream rng(4, 0);
  for (int i = 0; i < 20; ++i) {
    Vector x(3);
    x << 2.0 * rng.normal(), rng.normal(), rng.normal();
    EXPECT_NEAR(t.log_density(x), g.log_density(x), 1e-3);
  }
}

TEST(StudentTProposal, UnivariateDensityMatchesClosedForm) {
  // nu = 3, unit scale: p(0) = Gamma(2) / (Gamma(1.5) sqrt(3 pi))
  const StudentTProposal t(Vector::Zero(1), Matrix::Identity(1, 1), 3.0);
  const double expected = std::lgamma(2.0) - std::lgamma(1.5) - 0.5 * std::log(3.0 * std::numbers::pi);
  EXPECT_NEAR(t.log_density(Vector::Zero(1)), expected, 1e-12);
  Vector x(1);
  x << 1.7;
  EXPECT_NEAR(t.log_density(x), expected - 2.0 * std::log1p(1.7 * 1.7 / 3.0), 1e-12);
}

TEST(StudentTProposal, RequiresNuAboveTwo) {
  EXPECT_THROW(StudentTProposal(Vector::Zero(2), Matrix::Identity(2, 2), 2.0), DomainError);
}

TEST(StudentTProposal, MomentMatchingWithinThreePercent) {
  const StudentTProposal t(Vector::Zero(3), spd3() / 3.0, 3.0);
  RngStream rng(5, 0);
  const Matrix s = sample(Proposal(t), rng, 1000000);
  const Matrix cov = weighted_covariance(WeightedEnsemble::uniform(s));
  EXPECT_LT((cov - spd3()).norm() / spd3().norm(), 0.03);
}

TEST(GaussianMixture, DegenerateWeightsDrawOnlyFromFirstComponent) {
  std::vector<GaussianProposal> comps{GaussianProposal(v2(0.0, 0.0), Matrix::Identity(2, 2)),
                                      GaussianProposal(v2(100.0, 100.0), Matrix::Identity(2, 2))};
  const GaussianMixtureProposal m(comps, v2(1.0, 0.0));
  RngStream rng(6, 0);
  const Matrix s = sample(Proposal(m), rng, 5000);
  EXPECT_LT(s.cwiseAbs().maxCoeff(), 20.0);
}

TEST(GaussianMixture, IdenticalComponentsEqualSingleLaw) {
  const GaussianProposal g(Vector::Constant(3, 0.5), spd3());
  const GaussianMixtureProposal m({g, g}, v2(0.5, 0.5));
  RngStream rng(7, 0);
  for (int i = 0; i < 10; ++i) {
    const Vector x = g.draw(rng);
    EXPECT_NEAR(m.log_density(x), g.log_density(x), 1e-12);
  }
}

TEST(GaussianMixture, PermutationInvariantAndMoments) {
  const GaussianProposal a(v2(0.0, 0.0), Matrix::Identity(2, 2));
  const GaussianProposal b(v2(3.0, -1.0), 0.5 * Matrix::Identity(2, 2));
  const GaussianMixtureProposal ab({a, b}, v2(0.3, 0.7));
  const GaussianMixtureProposal ba({b, a}, v2(0.7, 0.3));
  const Vector x = v2(1.2, 0.4);
  EXPECT_NEAR(ab.log_density(x), ba.log_density(x), 1e-14);
  const Vector mu = 0.3 * a.mean() + 0.7 * b.mean();
  EXPECT_LT((ab.mean() - mu).norm(), 1e-14);
  const Matrix second = 0.3 * (a.covariance() + a.mean() * a.mean().transpose()) +
                        0.7 * (b.covariance() + b.mean() * b.mean().transpose());
  EXPECT_LT((ab.covariance() - (second - mu * mu.transpose())).norm(), 1e-12);
}

TEST(GaussianMixture, RejectsBadWeights) {
  const GaussianProposal a(v2(0.0, 0.0), Matrix::Identity(2, 2));
  EXPECT_ANY_THROW(GaussianMixtureProposal({a, a}, v2(0.5, 0.6)));
  EXPECT_ANY_THROW(GaussianMixtureProposal({a, a}, v2(-0.5, 1.5)));
  EXPECT_ANY_THROW(GaussianMixtureProposal({}, Vector(0)));
}

TEST(SelfConsistency, TargetEqualToProposalGivesUnitR) {
  const GaussianProposal g(Vector::Constant(3, 1.0), spd3());
  const std::vector<Proposal> families{
      g, StudentTProposal(Vector::Zero(3), spd3(), 4.0),
      GaussianMixtureProposal({g, GaussianProposal(Vector::Zero(3), Matrix::Identity(3, 3))}, v2(0.4, 0.6))};
  for (const Proposal& q : families) {
    RngStream rng(8, 0);
    const Matrix s = sample(q, rng, 2000);
    Vector l(s.cols());
    for (Eigen::Index i = 0; i < s.cols(); ++i) l(i) = log_density(q, s.col(i)) - log_density(q, s.col(i));
    EXPECT_NEAR(estimate_r(self_normalize(l)).r, 1.0, 1e-10);
  }
}

TEST(FitGaussian, RecoversStandardNormal) {
  RngStream rng(9, 0);
  const Matrix s = sample(Proposal(GaussianProposal(Vector::Zero(2), Matrix::Identity(2, 2))), rng, 100000);
  const GaussianProposal g = fit_gaussian(WeightedEnsemble::uniform(s));
  EXPECT_LT(g.mean().cwiseAbs().maxCoeff(), 0.02);
  EXPECT_LT((g.covariance() - Matrix::Identity(2, 2)).norm(), 0.05);
  const GaussianProposal g2 = fit_gaussian(WeightedEnsemble::uniform(s), 2.0);
  EXPECT_LT((g2.covariance() - 2.0 * g.covariance()).norm(), 1e-14);
}

TEST(FitGaussian, TwoSamplesInTwoDimensionsAreDegenerate) {
  Matrix s(2, 2);
  s << 0.0, 1.0, 0.0, 1.0;
  EXPECT_THROW(fit_gaussian(WeightedEnsemble::uniform(s)), DegenerateEnsemble);
}

TEST(FitGaussian, IdempotentUnderResampling) {
  const GaussianProposal g0(Vector::Constant(3, 2.0), spd3());
  RngStream rng(10, 0);
  const GaussianProposal g1 = fit_gaussian(WeightedEnsemble::uniform(sample(Proposal(g0), rng, 1000000)));
  EXPECT_LT((g1.mean() - g0.mean()).norm() / g0.mean().norm(), 0.01);
  EXPECT_LT((g1.covariance() - g0.covariance()).norm() / g0.covariance().norm(), 0.01);
}

TEST(FitStudentT, ScaleFactors) {
  RngStream rng(11, 0);
  const Matrix s = sample(Proposal(GaussianProposal(Vector::Zero(3), spd3())), rng, 500);
  const WeightedEnsemble ens = WeightedEnsemble::uniform(s);
  const Matrix cov = weighted_covariance(ens);
  const StudentTProposal t3 = fit_student_t(ens, 3.0);
  const StudentTProposal t4 = fit_student_t(ens, 4.0);
  EXPECT_LT((t3.scale() - cov / 3.0).norm(), 1e-14);
  EXPECT_LT((t3.covariance() - cov).norm(), 1e-13);
  EXPECT_LT((t3.scale() - t4.scale() * (2.0 / 3.0)).norm(), 1e-14);
  EXPECT_LT((fit_student_t(ens, 1e8).scale() - cov).norm(), 1e-7);
  EXPECT_THROW(fit_student_t(ens, 2.0), DomainError);
  EXPECT_LT((t3.location() - weighted_mean(ens)).norm(), 1e-15);
}

TEST(GmmWeights, Examples) {
  Vector w = gmm_weights(v2(0.0, 0.0));
  EXPECT_DOUBLE_EQ(w(0), 0.5);
  w = gmm_weights(v2(0.0, std::log(3.0)));
  EXPECT_NEAR(w(0), 0.75, 1e-15);
  EXPECT_NEAR(w(1), 0.25, 1e-15);
  w = gmm_weights(v2(1e4, 1e4 + 1.0));
  const double e = std::numbers::e;
  EXPECT_NEAR(w(0), e / (1.0 + e), 1e-14);
  EXPECT_NEAR(w(1), 1.0 / (1.0 + e), 1e-14);
  EXPECT_THROW(gmm_weights(v2(0.0, std::nan(""))), DomainError);
}

TEST(Proposals, FloatInstantiation) {
  const GaussianProposalT<float> g(Eigen::VectorXf::Zero(2), Eigen::MatrixXf::Identity(2, 2));
  EXPECT_NEAR(g.log_density(Eigen::VectorXf::Zero(2)), -std::log(2.0f * std::numbers::pi_v<float>), 1e-5f);
  RngStream rng(12, 0);
  const Eigen::MatrixXf s = sample(ProposalT<float>(g), rng, 10);
  EXPECT_EQ(s.cols(), 10);
}

}  // namespace
}  // namespace isamp
