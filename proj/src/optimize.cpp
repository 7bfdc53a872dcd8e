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

#include "isamp/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include <Eigen/Cholesky>

#include "isamp/numeric.hpp"

namespace isamp {

namespace {

// Consecutive accepted steps with |dF| < f_tol (1 + |F|) before stopping.
constexpr int kFlatStepsToStop = 3;

inline double step_for(double theta_j, double rel_step) {
  const double h = rel_step * (1.0 + std::abs(theta_j));
  // Use the representable step so the divisor matches the stencil.
  volatile double shifted = theta_j + h;
  return shifted - theta_j;
}

bool decreased_enough(double f_new, double f_old, double f_tol) {
  return std::abs(f_old - f_new) < f_tol * (1.0 + std::abs(f_old));
}

Matrix hessian_at_minimum(const ObjectiveFunction& f, const Vector& x, const OptimizerSettings& settings,
                          const Matrix& fallback) {
  try {
    return fd_hessian(f, x, settings.hessian_step);
  } catch (const EvaluationFailed&) {
    return repair_spd<double>(fallback, SpdKind::Hessian);
  }
}

}  // namespace

std::string to_string(OptimizationStatus status) {
  switch (status) {
    case OptimizationStatus::Converged:
      return "Converged";
    case OptimizationStatus::MaxIterations:
      return "MaxIterations";
    case OptimizationStatus::Failed:
      return "Failed";
  }
  return "Failed";
}

Vector finite_diff_gradient(const ObjectiveFunction& f, const Vector& theta, double rel_step) {
  std::optional<double> f0;
  bool have_f0 = false;
  Vector grad(theta.size());
  Vector x = theta;
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    const double h = step_for(theta(j), rel_step);
    x(j) = theta(j) + h;
    const std::optional<double> plus = f(x);
    x(j) = theta(j) - h;
    const std::optional<double> minus = f(x);
    x(j) = theta(j);
    if (plus && minus) {
      grad(j) = (*plus - *minus) / (2.0 * h);
      continue;
    }
    if (!have_f0) {
      f0 = f(theta);
      have_f0 = true;
    }
    if (f0 && plus) {
      grad(j) = (*plus - *f0) / h;
    } else if (f0 && minus) {
      grad(j) = (*f0 - *minus) / h;
    } else {
      throw EvaluationFailed("finite_diff_gradient: both stencils failed for coordinate " + std::to_string(j));
    }
  }
  return grad;
}

Matrix finite_diff_jacobian(const VectorFunction& f, const Vector& theta, double rel_step) {
  std::optional<Vector> f0;
  bool have_f0 = false;
  Matrix jac;
  Vector x = theta;
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    const double h = step_for(theta(j), rel_step);
    x(j) = theta(j) + h;
    const std::optional<Vector> plus = f(x);
    x(j) = theta(j) - h;
    const std::optional<Vector> minus = f(x);
    x(j) = theta(j);
    Vector column;
    if (plus && minus) {
      column = (*plus - *minus) / (2.0 * h);
    } else {
      if (!have_f0) {
        f0 = f(theta);
        have_f0 = true;
      }
      if (f0 && plus) {
        column = (*plus - *f0) / h;
      } else if (f0 && minus) {
        column = (*f0 - *minus) / h;
      } else {
        throw EvaluationFailed("finite_diff_jacobian: both stencils failed for coordinate " + std::to_string(j));
      }
    }
    if (jac.size() == 0) {
      jac.resize(column.size(), theta.size());
    }
    jac.col(j) = column;
  }
  return jac;
}

Matrix fd_hessian_raw(const ObjectiveFunction& f, const Vector& theta, double rel_step) {
  const Eigen::Index n = theta.size();
  auto eval = [&](const Vector& x) {
    const std::optional<double> v = f(x);
    if (!v) {
      throw EvaluationFailed("fd_hessian: objective failed on the stencil");
    }
    return *v;
  };
  Vector h(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    h(i) = step_for(theta(i), rel_step);
  }
  const double f0 = eval(theta);
  Matrix hess(n, n);
  Vector x = theta;
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i) = theta(i) + h(i);
    const double fp = eval(x);
    x(i) = theta(i) - h(i);
    const double fm = eval(x);
    x(i) = theta(i);
    hess(i, i) = (fp - 2.0 * f0 + fm) / (h(i) * h(i));
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double corners[4];
      int k = 0;
      for (double si : {1.0, -1.0}) {
        for (double sj : {1.0, -1.0}) {
          x(i) = theta(i) + si * h(i);
          x(j) = theta(j) + sj * h(j);
          corners[k++] = eval(x);
        }
      }
      x(i) = theta(i);
      x(j) = theta(j);
      const double v = (corners[0] - corners[1] - corners[2] + corners[3]) / (4.0 * h(i) * h(j));
      hess(i, j) = v;
      hess(j, i) = v;
    }
  }
  return hess;
}

Matrix fd_hessian(const ObjectiveFunction& f, const Vector& theta, double rel_step) {
  return repair_spd<double>(fd_hessian_raw(f, theta, rel_step), SpdKind::Hessian);
}

Matrix gauss_newton_hessian(const Matrix& jacobian, const Vector& noise_precision, const Matrix& prior_precision) {
  if (noise_precision.size() != jacobian.rows() || prior_precision.rows() != jacobian.cols() ||
      prior_precision.cols() != jacobian.cols()) {
    throw DomainError("gauss_newton_hessian: dimension mismatch");
  }
  if (!jacobian.allFinite()) {
    throw DomainError("gauss_newton_hessian: Jacobian must be finite");
  }
  const Matrix h = jacobian.transpose() * noise_precision.asDiagonal() * jacobian + prior_precision;
  return repair_spd<double>(h, SpdKind::Hessian);
}

OptimizationResult minimize_bfgs(const ObjectiveFunction& f, const GradientFunction& gradient, const Vector& start,
                                 const OptimizerSettings& settings) {
  OptimizationResult result;
  result.minimizer = start;
  const Eigen::Index n = start.size();
  result.hessian_approx = Matrix::Identity(n, n);

  std::optional<double> fx = start.allFinite() ? f(start) : std::nullopt;
  if (!fx) {
    result.f_min = std::numeric_limits<double>::infinity();
    return result;
  }
  auto grad_at = [&](const Vector& x) -> std::optional<Vector> {
    if (gradient) {
      return gradient(x);
    }
    try {
      return finite_diff_gradient(f, x, settings.rel_step);
    } catch (const EvaluationFailed&) {
      return std::nullopt;
    }
  };

  result.f_history.push_back(*fx);
  Vector x = start;
  std::optional<Vector> g = grad_at(x);
  if (!g) {
    result.f_min = *fx;
    return result;
  }
  Matrix inv_h = Matrix::Identity(n, n);
  bool fresh = true;
  int flat_steps = 0;
  result.status = OptimizationStatus::MaxIterations;

  for (int iter = 0; iter < settings.max_iter; ++iter) {
    if (g->norm() <= settings.grad_tol) {
      result.status = OptimizationStatus::Converged;
      break;
    }
    Vector p = -inv_h * *g;
    double slope = g->dot(p);
    if (!(slope < 0.0)) {
      inv_h.setIdentity();
      fresh = true;
      p = -*g;
      slope = -g->squaredNorm();
    }

    double alpha = 1.0;
    std::optional<double> f_trial;
    Vector x_trial;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      x_trial = x + alpha * p;
      f_trial = f(x_trial);
      if (f_trial && *f_trial < *fx && *f_trial <= *fx + 1e-4 * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      if (!fresh) {
        inv_h.setIdentity();
        fresh = true;
        continue;
      }
      result.status = OptimizationStatus::Failed;
      break;
    }

    std::optional<Vector> g_new = grad_at(x_trial);
    if (!g_new) {
      result.status = OptimizationStatus::Failed;
      break;
    }
    const Vector s = x_trial - x;
    const Vector y = *g_new - *g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (fresh) {
        inv_h *= sy / y.squaredNorm();
      }
      const double rho = 1.0 / sy;
      const Matrix eye = Matrix::Identity(n, n);
      inv_h = (eye - rho * s * y.transpose()) * inv_h * (eye - rho * y * s.transpose()) + rho * s * s.transpose();
      fresh = false;
    }

    const double f_old = *fx;
    x = x_trial;
    fx = f_trial;
    result.f_history.push_back(*fx);
    g = g_new;
    result.iterations = iter + 1;
    flat_steps = decreased_enough(*fx, f_old, settings.f_tol) ? flat_steps + 1 : 0;
    if (flat_steps >= kFlatStepsToStop) {
      result.status = g->norm() <= settings.grad_tol ? OptimizationStatus::Converged : OptimizationStatus::Failed;
      break;
    }
  }

  result.minimizer = x;
  result.f_min = *fx;
  result.gradient_norm = g->norm();
  if (result.status == OptimizationStatus::Converged) {
    Matrix fallback = inv_h.inverse();
    result.hessian_approx = hessian_at_minimum(f, x, settings, fallback);
  }
  return result;
}

OptimizationResult minimize_least_squares(const LeastSquaresForm& form, const Vector& start,
                                          const OptimizerSettings& settings) {
  OptimizationResult result;
  result.minimizer = start;
  const Eigen::Index n = start.size();
  result.hessian_approx = Matrix::Identity(n, n);

  auto residuals = [&form](const Vector& x) { return form.residuals(x); };
  std::optional<Vector> r = start.allFinite() ? residuals(start) : std::nullopt;
  if (!r) {
    result.f_min = std::numeric_limits<double>::infinity();
    return result;
  }

  Vector x = start;
  double fx = 0.5 * r->squaredNorm();
  result.f_history.push_back(fx);
  double lambda = 1e-3;
  int flat_steps = 0;
  Vector grad = Vector::Zero(n);
  result.status = OptimizationStatus::MaxIterations;

  for (int iter = 0; iter < settings.max_iter; ++iter) {
    Matrix jac;
    try {
      jac = finite_diff_jacobian(residuals, x, settings.rel_step);
    } catch (const EvaluationFailed&) {
      result.status = OptimizationStatus::Failed;
      break;
    }
    grad = jac.transpose() * *r;
    if (grad.norm() <= settings.grad_tol) {
      result.status = OptimizationStatus::Converged;
      break;
    }
    const Matrix normal = jac.transpose() * jac;
    const Vector damping = normal.diagonal().cwiseMax(1e-12);

    bool accepted = false;
    double f_new = fx;
    while (lambda < 1e16) {
      Matrix system = normal;
      system.diagonal() += lambda * damping;
      const Vector step = system.ldlt().solve(-grad);
      const Vector x_trial = x + step;
      std::optional<Vector> r_trial = step.allFinite() ? residuals(x_trial) : std::nullopt;
      if (r_trial) {
        f_new = 0.5 * r_trial->squaredNorm();
        if (f_new < fx) {
          x = x_trial;
          r = std::move(r_trial);
          lambda = std::max(lambda / 10.0, 1e-12);
          accepted = true;
          break;
        }
      }
      lambda *= 10.0;
    }
    result.iterations = iter + 1;
    if (!accepted) {
      result.status = grad.norm() <= settings.grad_tol ? OptimizationStatus::Converged : OptimizationStatus::Failed;
      break;
    }
    const double f_old = fx;
    fx = f_new;
    result.f_history.push_back(fx);
    flat_steps = decreased_enough(fx, f_old, settings.f_tol) ? flat_steps + 1 : 0;
    if (flat_steps >= kFlatStepsToStop) {
      try {
        grad = finite_diff_jacobian(residuals, x, settings.rel_step).transpose() * *r;
      } catch (const EvaluationFailed&) {
        result.status = OptimizationStatus::Failed;
        break;
      }
      result.status = grad.norm() <= settings.grad_tol ? OptimizationStatus::Converged : OptimizationStatus::Failed;
      break;
    }
  }

  result.minimizer = x;
  result.f_min = fx;
  result.gradient_norm = grad.norm();
  if (result.status == OptimizationStatus::Converged) {
    try {
      const Matrix model_jac = finite_diff_jacobian(form.model, x, settings.rel_step);
      const Vector noise_precision = form.noise_sd.array().square().inverse().matrix();
      const Matrix prior_precision = form.prior_sd.array().square().inverse().matrix().asDiagonal();
      result.hessian_approx = gauss_newton_hessian(model_jac, noise_precision, prior_precision);
    } catch (const EvaluationFailed&) {
      result.status = OptimizationStatus::Failed;
    }
  }
  return result;
}

ObjectiveFunction negative_log_density(const TargetDensity& target) {
  return [&target](const Vector& x) -> std::optional<double> {
    const LogDensity v = target.log_density(x);
    if (!v || !std::isfinite(*v)) {
      return std::nullopt;
    }
    return -*v;
  };
}

OptimizationResult minimize(const TargetDensity& target, const Vector& start, const OptimizerSettings& settings) {
  if (start.size() != target.dimension()) {
    throw DomainError("minimize: start has the wrong dimension");
  }
  if (const LeastSquaresForm* form = target.least_squares()) {
    return minimize_least_squares(*form, start, settings);
  }
  GradientFunction gradient;
  if (target.gradient(start)) {
    gradient = [&target](const Vector& x) -> std::optional<Vector> {
      if (!target.log_density(x)) {
        return std::nullopt;
      }
      std::optional<Vector> g = target.gradient(x);
      if (!g) {
        return std::nullopt;
      }
      return Vector(-*g);
    };
  }
  return minimize_bfgs(negative_log_density(target), gradient, start, settings);
}

}  // namespace isamp
