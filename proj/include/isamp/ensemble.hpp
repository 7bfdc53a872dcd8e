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

#ifndef ISAMP_ENSEMBLE_HPP
#define ISAMP_ENSEMBLE_HPP

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "isamp/numeric.hpp"
#include "isamp/types.hpp"

/**
 * \file
 * \brief Weighted sample sets and the weight-variance quality measure.
 *
 * For self-normalized weights w_i the quality measure is estimated as
 * R = N * sum(w_i^2); the effective sample size is N / R. R is 1 for equal
 * weights and N when a single sample carries all the weight.
 */

namespace isamp {

/// Quality of a set of importance weights.
struct QualityReport {
  double r = 1.0;
  double n_eff = 0.0;
  Eigen::Index n = 0;
};

/// w_i = exp(l_i - logsumexp(l)). Entries equal to -inf give exactly zero.
template <typename Derived>
VectorT<typename Derived::Scalar> self_normalize(const Eigen::MatrixBase<Derived>& log_weights) {
  using Scalar = typename Derived::Scalar;
  if (log_weights.size() == 0) {
    throw EmptyInput("self_normalize: no weights");
  }
  if (log_weights.hasNaN() || (log_weights.array() == std::numeric_limits<Scalar>::infinity()).any()) {
    throw DomainError("self_normalize: log-weights must be finite or -inf");
  }
  const Scalar lse = logsumexp(log_weights);
  if (lse == -std::numeric_limits<Scalar>::infinity()) {
    throw AllWeightsZero("self_normalize: every log-weight is -inf");
  }
  // element-wise std::exp keeps exp(-inf) exactly 0
  VectorT<Scalar> w(log_weights.size());
  CompensatedSum<Scalar> total;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    w(i) = std::exp(log_weights(i) - lse);
    total.add(w(i));
  }
  return w / total.value();
}

template <typename Derived>
QualityReport estimate_r(const Eigen::MatrixBase<Derived>& weights) {
  using Scalar = typename Derived::Scalar;
  CompensatedSum<Scalar> sum_sq;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    sum_sq.add(weights(i) * weights(i));
  }
  QualityReport report;
  report.n = weights.size();
  report.r = static_cast<double>(weights.size()) * static_cast<double>(sum_sq.value());
  report.n_eff = static_cast<double>(weights.size()) / report.r;
  return report;
}

/// Exact R for a Gaussian proposal with covariance (1+eps)*Sigma against a
/// Gaussian target with covariance Sigma and the same mean.
inline double gaussian_mismatch_r(double epsilon, int n_theta) {
  if (!(1.0 + 2.0 * epsilon > 0.0)) {
    throw DomainError("gaussian_mismatch_r: requires 1 + 2*epsilon > 0");
  }
  if (n_theta < 1) {
    throw DomainError("gaussian_mismatch_r: n_theta must be positive");
  }
  return std::pow((1.0 + epsilon) / std::sqrt(1.0 + 2.0 * epsilon), n_theta);
}

/// Parameter samples (one per column) with self-normalized importance weights.
template <typename Scalar>
class WeightedEnsembleT {
 public:
  using MatrixType = MatrixT<Scalar>;
  using VectorType = VectorT<Scalar>;

  WeightedEnsembleT(MatrixType samples, VectorType log_weights_raw)
      : samples_(std::move(samples)), log_weights_raw_(std::move(log_weights_raw)) {
    if (samples_.cols() != log_weights_raw_.size() || samples_.cols() == 0 || samples_.rows() == 0) {
      throw DomainError("WeightedEnsemble: need >= 1 sample and one log-weight per sample");
    }
    if (!samples_.allFinite()) {
      throw DomainError("WeightedEnsemble: samples must be finite");
    }
    weights_ = self_normalize(log_weights_raw_);
    quality_ = estimate_r(weights_);
  }

  static WeightedEnsembleT uniform(MatrixType samples) {
    const Eigen::Index n = samples.cols();
    return WeightedEnsembleT(std::move(samples), VectorType::Zero(n));
  }

  /// Builds from already-normalized weights (e.g. read back from disk).
  static WeightedEnsembleT from_weights(MatrixType samples, const VectorType& weights) {
    if ((weights.array() < Scalar(0)).any()) {
      throw DomainError("WeightedEnsemble: weights must be nonnegative");
    }
    VectorType log_w = weights.array().log().matrix();
    return WeightedEnsembleT(std::move(samples), std::move(log_w));
  }

  [[nodiscard]] Eigen::Index dimension() const { return samples_.rows(); }
  [[nodiscard]] Eigen::Index size() const { return samples_.cols(); }
  [[nodiscard]] const MatrixType& samples() const { return samples_; }
  [[nodiscard]] const VectorType& log_weights_raw() const { return log_weights_raw_; }
  [[nodiscard]] const VectorType& weights() const { return weights_; }
  [[nodiscard]] const QualityReport& quality() const { return quality_; }

 private:
  MatrixType samples_;
  VectorType log_weights_raw_;
  VectorType weights_;
  QualityReport quality_;
};

using WeightedEnsemble = WeightedEnsembleT<double>;

/// Throws DegenerateEnsemble unless n_eff > n_theta + 1.
template <typename Scalar>
void require_effective_size(const WeightedEnsembleT<Scalar>& ensemble) {
  const double needed = static_cast<double>(ensemble.dimension()) + 1.0;
  if (!(ensemble.quality().n_eff > needed * (1.0 + 1e-9))) {
    throw DegenerateEnsemble("ensemble collapsed: n_eff = " + std::to_string(ensemble.quality().n_eff) +
                             ", need > " + std::to_string(needed));
  }
}

template <typename Scalar>
VectorT<Scalar> weighted_mean(const WeightedEnsembleT<Scalar>& ensemble) {
  const auto& x = ensemble.samples();
  const auto& w = ensemble.weights();
  CompensatedSum<VectorT<Scalar>> acc(VectorT<Scalar>::Zero(x.rows()));
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    if (w(i) != Scalar(0)) {
      acc.add(w(i) * x.col(i));
    }
  }
  return acc.value();
}

/// sum_i w_i (x_i - mean)(x_i - mean)^T, without inflation or repair.
template <typename Scalar>
MatrixT<Scalar> weighted_scatter(const WeightedEnsembleT<Scalar>& ensemble) {
  const auto& x = ensemble.samples();
  const auto& w = ensemble.weights();
  const VectorT<Scalar> mu = weighted_mean(ensemble);
  const Eigen::Index n = x.rows();
  CompensatedSum<MatrixT<Scalar>> acc(MatrixT<Scalar>::Zero(n, n));
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    if (w(i) != Scalar(0)) {
      const VectorT<Scalar> d = x.col(i) - mu;
      acc.add(w(i) * (d * d.transpose()));
    }
  }
  MatrixT<Scalar> s = acc.value();
  return (s + s.transpose()) / Scalar(2);
}

/// Inflated weighted covariance, repaired to admit a Cholesky factor.
template <typename Scalar>
MatrixT<Scalar> weighted_covariance(const WeightedEnsembleT<Scalar>& ensemble, Scalar inflation = Scalar(1)) {
  if (!(inflation >= Scalar(1))) {
    throw DomainError("weighted_covariance: inflation must be >= 1");
  }
  return repair_spd<Scalar>(inflation * weighted_scatter(ensemble), SpdKind::Covariance);
}

}  // namespace isamp

#endif  // ISAMP_ENSEMBLE_HPP
