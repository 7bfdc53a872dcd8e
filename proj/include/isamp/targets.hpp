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

#ifndef ISAMP_TARGETS_HPP
#define ISAMP_TARGETS_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "isamp/proposals.hpp"
#include "isamp/rng.hpp"
#include "isamp/types.hpp"

namespace isamp {

/// Draws one parameter vector from a prior; used to seed walkers and
/// optimizer starts.
using PriorSampler = std::function<Vector(RngStream&)>;

/// Forward model M(theta); an empty optional marks a failed evaluation.
using ModelFunction = std::function<std::optional<Vector>(const Vector&)>;

/// F(theta) = 1/2 sum_k ((z_k - M_k)/sigma_k)^2 + 1/2 sum_j ((theta_j - m_j)/s_j)^2.
struct LeastSquaresForm {
  ModelFunction model;
  Vector data;
  Vector noise_sd;
  Vector prior_mean;
  Vector prior_sd;

  [[nodiscard]] Eigen::Index dimension() const { return prior_mean.size(); }
  [[nodiscard]] Eigen::Index observation_count() const { return data.size(); }

  /// Stacked whitened residuals r with F = 1/2 |r|^2.
  [[nodiscard]] std::optional<Vector> residuals(const Vector& theta) const;
};

/// Unnormalized log-posterior. Implementations must be safe to call
/// concurrently and must never return NaN; failures are returned as empty.
class TargetDensity {
 public:
  virtual ~TargetDensity() = default;

  [[nodiscard]] virtual Eigen::Index dimension() const = 0;
  [[nodiscard]] virtual LogDensity log_density(const Vector& theta) const = 0;

  /// Analytic gradient of log_density, when available.
  [[nodiscard]] virtual std::optional<Vector> gradient(const Vector& /*theta*/) const { return std::nullopt; }

  /// Residual structure for Gauss-Newton style solvers, when available.
  [[nodiscard]] virtual const LeastSquaresForm* least_squares() const { return nullptr; }

  [[nodiscard]] virtual PriorSampler prior_sampler() const = 0;

  [[nodiscard]] virtual std::string name() const = 0;
};

// ---------------------------------------------------------------------------
// 2-D toy problem: uniform prior on [0, 11]^2 and
// F(theta) = 1e-2 |theta - (5, 5)|^4 + 0.2 sin(5 |theta|).

inline constexpr double kToyLower = 0.0;
inline constexpr double kToyUpper = 11.0;

/// F without the support check.
double toy2d_objective(const Vector& theta);

/// Gradient of toy2d_objective.
Vector toy2d_objective_gradient(const Vector& theta);

/// -F(theta) inside the prior cube, Failure outside.
LogDensity toy2d_log_density(const Vector& theta);

class Toy2dTarget final : public TargetDensity {
 public:
  [[nodiscard]] Eigen::Index dimension() const override { return 2; }
  [[nodiscard]] LogDensity log_density(const Vector& theta) const override { return toy2d_log_density(theta); }
  [[nodiscard]] std::optional<Vector> gradient(const Vector& theta) const override;
  [[nodiscard]] PriorSampler prior_sampler() const override;
  [[nodiscard]] std::string name() const override { return "toy2d"; }
};

// ---------------------------------------------------------------------------

/// Exact normalized multivariate normal.
class GaussianTarget final : public TargetDensity {
 public:
  GaussianTarget(Vector mean, const Matrix& covariance);

  [[nodiscard]] Eigen::Index dimension() const override { return law_.dimension(); }
  [[nodiscard]] LogDensity log_density(const Vector& theta) const override;
  [[nodiscard]] std::optional<Vector> gradient(const Vector& theta) const override;

  /// Uniform on mean +/- 5 marginal standard deviations.
  [[nodiscard]] PriorSampler prior_sampler() const override;
  [[nodiscard]] std::string name() const override { return "gaussian"; }

  [[nodiscard]] const GaussianProposal& law() const { return law_; }

 private:
  GaussianProposal law_;
};

std::unique_ptr<GaussianTarget> gaussian_target(const Vector& mean, const Matrix& covariance);

// ---------------------------------------------------------------------------

LogDensity regression_log_density(const LeastSquaresForm& form, const Vector& theta);

/// Built-in smooth forward model
/// M_k(theta) = sum_j theta_j sin(k j / n_theta) + theta_j^2 / 10, k = 1..n_z, j = 1..n_theta.
ModelFunction builtin_regression_model(Eigen::Index n_theta, Eigen::Index n_z);

/// Jacobian of builtin_regression_model, n_z x n_theta.
Matrix builtin_regression_jacobian(const Vector& theta, Eigen::Index n_z);

class SyntheticRegressionTarget final : public TargetDensity {
 public:
  explicit SyntheticRegressionTarget(LeastSquaresForm form);

  [[nodiscard]] Eigen::Index dimension() const override { return form_.dimension(); }
  [[nodiscard]] LogDensity log_density(const Vector& theta) const override {
    return regression_log_density(form_, theta);
  }
  [[nodiscard]] const LeastSquaresForm* least_squares() const override { return &form_; }

  /// Draws from the diagonal Gaussian prior.
  [[nodiscard]] PriorSampler prior_sampler() const override;
  [[nodiscard]] std::string name() const override { return "regression"; }

  [[nodiscard]] const LeastSquaresForm& form() const { return form_; }

 private:
  LeastSquaresForm form_;
};

struct RegressionSetup {
  Eigen::Index n_theta = 3;
  Eigen::Index n_z = 12;
  Vector noise_sd;    // length n_z, or length 1 broadcast
  Vector prior_mean;  // length n_theta
  Vector prior_sd;    // length n_theta, or length 1 broadcast
  Vector theta_ref;   // length n_theta
  std::uint64_t data_seed = 0;
  bool add_noise = true;
};

/// Builtin model with data z = M(theta_ref) + eps, eps ~ N(0, diag(noise_sd^2))
/// drawn once from stream (data_seed, 0).
std::unique_ptr<SyntheticRegressionTarget> make_synthetic_regression(const RegressionSetup& setup);

}  // namespace isamp

#endif  // ISAMP_TARGETS_HPP
