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

#ifndef ISAMP_TYPES_HPP
#define ISAMP_TYPES_HPP

#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace isamp {

template <typename Scalar>
using VectorT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using MatrixT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vector = VectorT<double>;
using Matrix = MatrixT<double>;

/// Samples are stored column-wise: one column per parameter vector.
using SampleMatrix = Matrix;

/// Value of an unnormalized log-density. An empty optional is a model failure,
/// interpreted as a density of exactly zero.
using LogDensity = std::optional<double>;

inline constexpr std::nullopt_t Failure = std::nullopt;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every log-weight is -inf: no sample landed in the support of the target.
class AllWeightsZero : public Error {
 public:
  using Error::Error;
};

/// Weighted samples carry too little spread to define a covariance.
class DegenerateEnsemble : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class EvaluationFailed : public Error {
 public:
  using Error::Error;
};

class InitializationFailed : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class ChainTooShort : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace isamp

#endif  // ISAMP_TYPES_HPP
