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

#ifndef ISAMP_OPTIMIZE_HPP
#define ISAMP_OPTIMIZE_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "isamp/targets.hpp"
#include "isamp/types.hpp"

namespace isamp {

/// Scalar objective that may fail (empty result).
using ObjectiveFunction = std::function<std::optional<double>(const Vector&)>;
using GradientFunction = std::function<std::optional<Vector>(const Vector&)>;
using VectorFunction = std::function<std::optional<Vector>(const Vector&)>;

struct OptimizerSettings {
  double rel_step = 1e-6;      // first-derivative step, relative to 1 + |theta_j|
  double hessian_step = 1e-3;  // second-derivative step, same convention
  double f_tol = 1e-10;
  double grad_tol = 1e-6;
  int max_iter = 200;
};

enum class OptimizationStatus { Converged, MaxIterations, Failed };

std::string to_string(OptimizationStatus status);

struct OptimizationResult {
  Vector minimizer;
  double f_min = 0.0;
  Matrix hessian_approx;
  OptimizationStatus status = OptimizationStatus::Failed;
  int iterations = 0;
  double gradient_norm = 0.0;
  std::vector<double> f_history;  // F at the start, then after each accepted step
};

/// Central differences with h_j = rel_step * (1 + |theta_j|); falls back to a
/// one-sided stencil where one side fails.
Vector finite_diff_gradient(const ObjectiveFunction& f, const Vector& theta, double rel_step);

/// Column j holds dF/dtheta_j for a vector-valued F.
Matrix finite_diff_jacobian(const VectorFunction& f, const Vector& theta, double rel_step);

/// Symmetric central second differences, without repair.
Matrix fd_hessian_raw(const ObjectiveFunction& f, const Vector& theta, double rel_step);

/// fd_hessian_raw followed by SPD repair, for use as a covariance inverse.
Matrix fd_hessian(const ObjectiveFunction& f, const Vector& theta, double rel_step);

/// J^T diag(noise_precision) J + prior_precision, SPD-repaired. This is the
/// Hessian of F = 1/2 r^T C^{-1} r + 1/2 prior term with second-derivative
/// residual terms dropped (twice that of the unscaled sum of squares).
Matrix gauss_newton_hessian(const Matrix& jacobian, const Vector& noise_precision, const Matrix& prior_precision);

/// BFGS with Armijo backtracking. Failed evaluations reject the trial step.
OptimizationResult minimize_bfgs(const ObjectiveFunction& f, const GradientFunction& gradient, const Vector& start,
                                 const OptimizerSettings& settings = {});

/// Levenberg-Marquardt on the stacked whitened residuals of `form`.
OptimizationResult minimize_least_squares(const LeastSquaresForm& form, const Vector& start,
                                          const OptimizerSettings& settings = {});

/// Minimizes F = -log_density. Uses Levenberg-Marquardt when the target has
/// residual structure, BFGS otherwise.
OptimizationResult minimize(const TargetDensity& target, const Vector& start, const OptimizerSettings& settings = {});

/// F = -log_density as an objective.
ObjectiveFunction negative_log_density(const TargetDensity& target);

}  // namespace isamp

#endif  // ISAMP_OPTIMIZE_HPP
