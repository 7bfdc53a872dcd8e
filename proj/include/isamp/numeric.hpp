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

#ifndef ISAMP_NUMERIC_HPP
#define ISAMP_NUMERIC_HPP

#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "isamp/types.hpp"

namespace isamp {

/// Kahan-compensated accumulator. Works with scalars and fixed-shape Eigen
/// objects; the result depends only on the order values are added.
template <typename T>
class CompensatedSum {
 public:
  CompensatedSum() = default;
  explicit CompensatedSum(T zero) : sum_(zero), carry_(zero) {}

  void add(const T& value) {
    T adjusted = value - carry_;
    T next = sum_ + adjusted;
    carry_ = (next - sum_) - adjusted;
    sum_ = next;
  }

  [[nodiscard]] const T& value() const { return sum_; }

 private:
  T sum_{};
  T carry_{};
};

/// log(sum(exp(x))) with the usual max shift. Returns -inf when every entry
/// is -inf.
template <typename Derived>
typename Derived::Scalar logsumexp(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  constexpr Scalar neg_inf = -std::numeric_limits<Scalar>::infinity();
  if (x.size() == 0) {
    return neg_inf;
  }
  const Scalar shift = x.maxCoeff();
  if (shift == neg_inf) {
    return neg_inf;
  }
  CompensatedSum<Scalar> acc;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    acc.add(std::exp(x(i) - shift));
  }
  return shift + std::log(acc.value());
}

/// What a failed Cholesky means to the caller.
enum class SpdKind {
  Covariance,  // zero spread is an error: throws DegenerateEnsemble
  Hessian      // always repaired; zero matrices become a small multiple of I
};

inline constexpr double kInitialJitter = 1e-8;
inline constexpr double kMaxJitter = 1e-2;

/// Symmetrizes `m` and, if it is not positive definite, adds
/// delta * trace(m)/n * I for delta = 1e-8, 2e-8, ... up to 1e-2.
template <typename Scalar>
MatrixT<Scalar> repair_spd(const MatrixT<Scalar>& m, SpdKind kind = SpdKind::Covariance) {
  const Eigen::Index n = m.rows();
  if (n == 0 || m.cols() != n) {
    throw DomainError("repair_spd: matrix must be square and non-empty");
  }
  MatrixT<Scalar> sym = (m + m.transpose()) / Scalar(2);
  if (!sym.allFinite()) {
    throw DegenerateEnsemble("repair_spd: matrix has non-finite entries");
  }
  Eigen::LLT<MatrixT<Scalar>> llt(sym);
  if (llt.info() == Eigen::Success) {
    return sym;
  }

  Scalar scale = sym.trace() / Scalar(n);
  if (!(scale > Scalar(0))) {
    if (kind == SpdKind::Covariance) {
      throw DegenerateEnsemble("repair_spd: covariance has no spread");
    }
    scale = Scalar(1);
  }
  const MatrixT<Scalar> identity = MatrixT<Scalar>::Identity(n, n);
  for (double delta = kInitialJitter; delta <= kMaxJitter; delta *= 2.0) {
    MatrixT<Scalar> candidate = sym + Scalar(delta) * scale * identity;
    llt.compute(candidate);
    if (llt.info() == Eigen::Success) {
      return candidate;
    }
  }
  if (kind == SpdKind::Covariance) {
    throw DegenerateEnsemble("repair_spd: covariance not positive definite after jitter");
  }

  // Strongly indefinite Hessian: floor the spectrum.
  Eigen::SelfAdjointEigenSolver<MatrixT<Scalar>> eig(sym);
  VectorT<Scalar> values = eig.eigenvalues();
  const Scalar floor = Scalar(kInitialJitter) * std::max(Scalar(1), values.cwiseAbs().maxCoeff());
  values = values.cwiseMax(floor);
  MatrixT<Scalar> floored = eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
  return (floored + floored.transpose()) / Scalar(2);
}

}  // namespace isamp

#endif  // ISAMP_NUMERIC_HPP
