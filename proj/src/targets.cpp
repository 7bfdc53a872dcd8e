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

#include "isamp/targets.hpp"

#include <cmath>
#include <utility>

namespace isamp {

namespace {

const Vector& toy_center() {
  static const Vector c = Vector::Constant(2, 5.0);
  return c;
}

Vector broadcast(const Vector& v, Eigen::Index n, const char* what) {
  if (v.size() == n) {
    return v;
  }
  if (v.size() == 1) {
    return Vector::Constant(n, v(0));
  }
  throw DomainError(std::string(what) + ": length does not match");
}

}  // namespace

double toy2d_objective(const Vector& theta) {
  const double r2 = (theta - toy_center()).squaredNorm();
  return 1e-2 * r2 * r2 + 0.2 * std::sin(5.0 * theta.norm());
}

Vector toy2d_objective_gradient(const Vector& theta) {
  const Vector d = theta - toy_center();
  Vector g = 0.04 * d.squaredNorm() * d;
  const double rho = theta.norm();
  if (rho > 0.0) {
    g += (std::cos(5.0 * rho) / rho) * theta;
  }
  return g;
}

LogDensity toy2d_log_density(const Vector& theta) {
  if (theta.size() != 2) {
    throw DomainError("toy2d: theta must have length 2");
  }
  if (!theta.allFinite() || (theta.array() < kToyLower).any() || (theta.array() > kToyUpper).any()) {
    return Failure;
  }
  return -toy2d_objective(theta);
}

std::optional<Vector> Toy2dTarget::gradient(const Vector& theta) const {
  return Vector(-toy2d_objective_gradient(theta));
}

PriorSampler Toy2dTarget::prior_sampler() const {
  return [](RngStream& rng) {
    Vector theta(2);
    for (Eigen::Index i = 0; i < 2; ++i) {
      theta(i) = kToyLower + (kToyUpper - kToyLower) * rng.uniform();
    }
    return theta;
  };
}

GaussianTarget::GaussianTarget(Vector mean, const Matrix& covariance) : law_(std::move(mean), covariance) {}

LogDensity GaussianTarget::log_density(const Vector& theta) const {
  if (theta.size() != dimension()) {
    throw DomainError("gaussian target: dimension mismatch");
  }
  return law_.log_density(theta);
}

std::optional<Vector> GaussianTarget::gradient(const Vector& theta) const {
  const Matrix& lower = law_.chol();
  const Vector y = lower.triangularView<Eigen::Lower>().solve(Vector(theta - law_.mean()));
  return Vector(-(lower.transpose().triangularView<Eigen::Upper>().solve(y)));
}

PriorSampler GaussianTarget::prior_sampler() const {
  const Vector lo = law_.mean() - 5.0 * law_.covariance().diagonal().cwiseSqrt();
  const Vector width = 10.0 * law_.covariance().diagonal().cwiseSqrt();
  return [lo, width](RngStream& rng) {
    Vector theta(lo.size());
    for (Eigen::Index i = 0; i < lo.size(); ++i) {
      theta(i) = lo(i) + width(i) * rng.uniform();
    }
    return theta;
  };
}

std::unique_ptr<GaussianTarget> gaussian_target(const Vector& mean, const Matrix& covariance) {
  try {
    return std::make_unique<GaussianTarget>(mean, covariance);
  } catch (const DomainError& e) {
    throw DomainError(std::string("gaussian_target: ") + e.what());
  }
}

std::optional<Vector> LeastSquaresForm::residuals(const Vector& theta) const {
  const std::optional<Vector> out = model(theta);
  if (!out || out->size() != data.size() || !out->allFinite()) {
    return std::nullopt;
  }
  Vector r(data.size() + theta.size());
  r.head(data.size()) = ((data - *out).array() / noise_sd.array()).matrix();
  r.tail(theta.size()) = ((theta - prior_mean).array() / prior_sd.array()).matrix();
  return r;
}

LogDensity regression_log_density(const LeastSquaresForm& form, const Vector& theta) {
  if (theta.size() != form.dimension()) {
    throw DomainError("regression: dimension mismatch");
  }
  const std::optional<Vector> r = form.residuals(theta);
  if (!r) {
    return Failure;
  }
  return -0.5 * r->squaredNorm();
}

ModelFunction builtin_regression_model(Eigen::Index n_theta, Eigen::Index n_z) {
  return [n_theta, n_z](const Vector& theta) -> std::optional<Vector> {
    if (theta.size() != n_theta) {
      return std::nullopt;
    }
    Vector out = Vector::Zero(n_z);
    const double n = static_cast<double>(n_theta);
    for (Eigen::Index k = 1; k <= n_z; ++k) {
      double acc = 0.0;
      for (Eigen::Index j = 1; j <= n_theta; ++j) {
        const double t = theta(j - 1);
        acc += t * std::sin(static_cast<double>(k * j) / n) + t * t / 10.0;
      }
      out(k - 1) = acc;
    }
    return out;
  };
}

Matrix builtin_regression_jacobian(const Vector& theta, Eigen::Index n_z) {
  const Eigen::Index n_theta = theta.size();
  const double n = static_cast<double>(n_theta);
  Matrix jac(n_z, n_theta);
  for (Eigen::Index k = 1; k <= n_z; ++k) {
    for (Eigen::Index j = 1; j <= n_theta; ++j) {
      jac(k - 1, j - 1) = std::sin(static_cast<double>(k * j) / n) + theta(j - 1) / 5.0;
    }
  }
  return jac;
}

SyntheticRegressionTarget::SyntheticRegressionTarget(LeastSquaresForm form) : form_(std::move(form)) {
  const Eigen::Index n = form_.prior_mean.size();
  if (n < 1 || form_.prior_sd.size() != n) {
    throw DomainError("regression: prior mean and sd must have the same positive length");
  }
  if (form_.noise_sd.size() != form_.data.size() || form_.data.size() < 1) {
    throw DomainError("regression: data and noise_sd must have the same positive length");
  }
  if ((form_.noise_sd.array() <= 0.0).any() || (form_.prior_sd.array() <= 0.0).any()) {
    throw DomainError("regression: standard deviations must be positive");
  }
  if (!form_.model) {
    throw DomainError("regression: missing model");
  }
}

PriorSampler SyntheticRegressionTarget::prior_sampler() const {
  const Vector mean = form_.prior_mean;
  const Vector sd = form_.prior_sd;
  return [mean, sd](RngStream& rng) {
    Vector theta(mean.size());
    for (Eigen::Index i = 0; i < mean.size(); ++i) {
      theta(i) = mean(i) + sd(i) * rng.normal();
    }
    return theta;
  };
}

std::unique_ptr<SyntheticRegressionTarget> make_synthetic_regression(const RegressionSetup& setup) {
  if (setup.n_theta < 1 || setup.n_z < 1) {
    throw DomainError("regression: n_theta and n_z must be positive");
  }
  if (setup.theta_ref.size() != setup.n_theta) {
    throw DomainError("regression: theta_ref length must equal n_theta");
  }
  LeastSquaresForm form;
  form.model = builtin_regression_model(setup.n_theta, setup.n_z);
  form.noise_sd = broadcast(setup.noise_sd, setup.n_z, "regression noise_sd");
  form.prior_mean = broadcast(setup.prior_mean, setup.n_theta, "regression prior_mean");
  form.prior_sd = broadcast(setup.prior_sd, setup.n_theta, "regression prior_sd");
  form.data = *form.model(setup.theta_ref);
  if (setup.add_noise) {
    RngStream rng(setup.data_seed, 0);
    for (Eigen::Index k = 0; k < setup.n_z; ++k) {
      form.data(k) += form.noise_sd(k) * rng.normal();
    }
  }
  return std::make_unique<SyntheticRegressionTarget>(std::move(form));
}

}  // namespace isamp
