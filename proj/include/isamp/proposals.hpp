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

#ifndef ISAMP_PROPOSALS_HPP
#define ISAMP_PROPOSALS_HPP

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Cholesky>

#include "isamp/ensemble.hpp"
#include "isamp/numeric.hpp"
#include "isamp/rng.hpp"
#include "isamp/types.hpp"

namespace isamp {

namespace detail {

template <typename Scalar>
Eigen::LLT<MatrixT<Scalar>> checked_cholesky(const MatrixT<Scalar>& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DomainError(std::string(what) + ": matrix must be square and non-empty");
  }
  Eigen::LLT<MatrixT<Scalar>> llt(m);
  if (llt.info() != Eigen::Success || !m.allFinite()) {
    throw DomainError(std::string(what) + ": matrix is not positive definite");
  }
  return llt;
}

template <typename Scalar>
Scalar log_det_from_cholesky(const MatrixT<Scalar>& lower) {
  return Scalar(2) * lower.diagonal().array().log().sum();
}

/// (x - mu)^T S^{-1} (x - mu) given the lower Cholesky factor of S.
template <typename Scalar, typename Derived>
Scalar mahalanobis_sq(const MatrixT<Scalar>& lower, const VectorT<Scalar>& mu, const Eigen::MatrixBase<Derived>& x) {
  const VectorT<Scalar> y = lower.template triangularView<Eigen::Lower>().solve(VectorT<Scalar>(x - mu));
  return y.squaredNorm();
}

}  // namespace detail

/// Multivariate normal N(mean, covariance).
template <typename Scalar>
class GaussianProposalT {
 public:
  using VectorType = VectorT<Scalar>;
  using MatrixType = MatrixT<Scalar>;

  GaussianProposalT(VectorType mean, const MatrixType& covariance)
      : mean_(std::move(mean)), covariance_((covariance + covariance.transpose()) / Scalar(2)) {
    if (covariance_.rows() != mean_.size()) {
      throw DomainError("GaussianProposal: mean and covariance dimensions differ");
    }
    chol_ = detail::checked_cholesky(covariance_, "GaussianProposal").matrixL();
    log_norm_ = -Scalar(0.5) * (Scalar(mean_.size()) * std::log(Scalar(2) * std::numbers::pi_v<Scalar>) +
                                detail::log_det_from_cholesky(chol_));
  }

  [[nodiscard]] Eigen::Index dimension() const { return mean_.size(); }
  [[nodiscard]] const VectorType& mean() const { return mean_; }
  [[nodiscard]] const MatrixType& covariance() const { return covariance_; }
  [[nodiscard]] const MatrixType& chol() const { return chol_; }

  template <typename Derived>
  Scalar log_density(const Eigen::MatrixBase<Derived>& theta) const {
    return log_norm_ - Scalar(0.5) * detail::mahalanobis_sq(chol_, mean_, theta);
  }

  /// One draw mean + L z; consumes dimension() normals.
  VectorType draw(RngStream& rng) const {
    VectorType z(dimension());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      z(i) = static_cast<Scalar>(rng.normal());
    }
    return mean_ + chol_.template triangularView<Eigen::Lower>() * z;
  }

 private:
  VectorType mean_;
  MatrixType covariance_;
  MatrixType chol_;
  Scalar log_norm_{};
};

/// Multivariate t with location, scale matrix and nu > 2 degrees of freedom;
/// its covariance is nu / (nu - 2) * scale.
template <typename Scalar>
class StudentTProposalT {
 public:
  using VectorType = VectorT<Scalar>;
  using MatrixType = MatrixT<Scalar>;

  StudentTProposalT(VectorType location, const MatrixType& scale, Scalar nu)
      : location_(std::move(location)), scale_((scale + scale.transpose()) / Scalar(2)), nu_(nu) {
    if (!(nu_ > Scalar(2)) || !std::isfinite(nu_)) {
      throw DomainError("StudentTProposal: nu must be finite and > 2");
    }
    if (scale_.rows() != location_.size()) {
      throw DomainError("StudentTProposal: location and scale dimensions differ");
    }
    chol_ = detail::checked_cholesky(scale_, "StudentTProposal").matrixL();
    const Scalar n = Scalar(location_.size());
    log_norm_ = std::lgamma((nu_ + n) / Scalar(2)) - std::lgamma(nu_ / Scalar(2)) -
                Scalar(0.5) * n * std::log(nu_ * std::numbers::pi_v<Scalar>) -
                Scalar(0.5) * detail::log_det_from_cholesky(chol_);
  }

  [[nodiscard]] Eigen::Index dimension() const { return location_.size(); }
  [[nodiscard]] const VectorType& location() const { return location_; }
  [[nodiscard]] const MatrixType& scale() const { return scale_; }
  [[nodiscard]] const MatrixType& chol() const { return chol_; }
  [[nodiscard]] Scalar nu() const { return nu_; }
  [[nodiscard]] MatrixType covariance() const { return nu_ / (nu_ - Scalar(2)) * scale_; }

  template <typename Derived>
  Scalar log_density(const Eigen::MatrixBase<Derived>& theta) const {
    const Scalar n = Scalar(location_.size());
    const Scalar m = detail::mahalanobis_sq(chol_, location_, theta);
    return log_norm_ - Scalar(0.5) * (nu_ + n) * std::log1p(m / nu_);
  }

  /// location + L z sqrt(nu / g) with g ~ chi-square(nu).
  VectorType draw(RngStream& rng) const {
    VectorType z(dimension());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      z(i) = static_cast<Scalar>(rng.normal());
    }
    const Scalar g = static_cast<Scalar>(rng.chi_squared(static_cast<double>(nu_)));
    const VectorType spread = chol_.template triangularView<Eigen::Lower>() * z;
    return location_ + std::sqrt(nu_ / g) * spread;
  }

 private:
  VectorType location_;
  MatrixType scale_;
  MatrixType chol_;
  Scalar nu_;
  Scalar log_norm_{};
};

/// sum_j psi_j N(mean_j, cov_j).
template <typename Scalar>
class GaussianMixtureProposalT {
 public:
  using VectorType = VectorT<Scalar>;
  using MatrixType = MatrixT<Scalar>;
  using Component = GaussianProposalT<Scalar>;

  GaussianMixtureProposalT(std::vector<Component> components, VectorType psi)
      : components_(std::move(components)), psi_(std::move(psi)) {
    if (components_.empty() || static_cast<Eigen::Index>(components_.size()) != psi_.size()) {
      throw DomainError("GaussianMixtureProposal: need >= 1 component and one weight per component");
    }
    for (const auto& c : components_) {
      if (c.dimension() != components_.front().dimension()) {
        throw DomainError("GaussianMixtureProposal: components differ in dimension");
      }
    }
    if (!psi_.allFinite() || (psi_.array() < Scalar(0)).any() || std::abs(psi_.sum() - Scalar(1)) > Scalar(1e-12)) {
      throw DomainError("GaussianMixtureProposal: psi must be nonnegative and sum to 1");
    }
    log_psi_ = psi_.array().log().matrix();
    cumulative_.resize(psi_.size());
    Scalar running{0};
    for (Eigen::Index j = 0; j < psi_.size(); ++j) {
      running += psi_(j);
      cumulative_(j) = running;
    }
  }

  [[nodiscard]] Eigen::Index dimension() const { return components_.front().dimension(); }
  [[nodiscard]] const std::vector<Component>& components() const { return components_; }
  [[nodiscard]] const VectorType& psi() const { return psi_; }

  [[nodiscard]] VectorType mean() const {
    VectorType mu = VectorType::Zero(dimension());
    for (std::size_t j = 0; j < components_.size(); ++j) {
      mu += psi_(static_cast<Eigen::Index>(j)) * components_[j].mean();
    }
    return mu;
  }

  [[nodiscard]] MatrixType covariance() const {
    const VectorType mu = mean();
    MatrixType second = MatrixType::Zero(dimension(), dimension());
    for (std::size_t j = 0; j < components_.size(); ++j) {
      const auto& c = components_[j];
      second += psi_(static_cast<Eigen::Index>(j)) * (c.covariance() + c.mean() * c.mean().transpose());
    }
    return second - mu * mu.transpose();
  }

  template <typename Derived>
  Scalar log_density(const Eigen::MatrixBase<Derived>& theta) const {
    VectorType terms(psi_.size());
    for (std::size_t j = 0; j < components_.size(); ++j) {
      const auto idx = static_cast<Eigen::Index>(j);
      terms(idx) = psi_(idx) > Scalar(0) ? log_psi_(idx) + components_[j].log_density(theta)
                                         : -std::numeric_limits<Scalar>::infinity();
    }
    return logsumexp(terms);
  }

  /// Picks a component by one uniform, then draws from it.
  VectorType draw(RngStream& rng) const {
    const Scalar u = static_cast<Scalar>(rng.uniform());
    Eigen::Index j = 0;
    const Eigen::Index last = psi_.size() - 1;
    while (j < last && !(u < cumulative_(j))) {
      ++j;
    }
    while (psi_(j) == Scalar(0) && j > 0) {
      --j;  // rounding in the cumulative sum must never select an empty component
    }
    return components_[static_cast<std::size_t>(j)].draw(rng);
  }

 private:
  std::vector<Component> components_;
  VectorType psi_;
  VectorType log_psi_;
  VectorType cumulative_;
};

template <typename Scalar>
using ProposalT = std::variant<GaussianProposalT<Scalar>, StudentTProposalT<Scalar>, GaussianMixtureProposalT<Scalar>>;

using GaussianProposal = GaussianProposalT<double>;
using StudentTProposal = StudentTProposalT<double>;
using GaussianMixtureProposal = GaussianMixtureProposalT<double>;
using Proposal = ProposalT<double>;

template <typename Scalar>
Eigen::Index dimension(const ProposalT<Scalar>& proposal) {
  return std::visit([](const auto& p) { return p.dimension(); }, proposal);
}

template <typename Scalar, typename Derived>
Scalar log_density(const ProposalT<Scalar>& proposal, const Eigen::MatrixBase<Derived>& theta) {
  if (theta.size() != dimension(proposal)) {
    throw DomainError("log_density: dimension mismatch");
  }
  return std::visit([&](const auto& p) { return p.log_density(theta); }, proposal);
}

/// `count` draws, one per column, in draw order.
template <typename Scalar>
MatrixT<Scalar> sample(const ProposalT<Scalar>& proposal, RngStream& rng, Eigen::Index count) {
  if (count < 1) {
    throw DomainError("sample: count must be >= 1");
  }
  MatrixT<Scalar> out(dimension(proposal), count);
  std::visit(
      [&](const auto& p) {
        for (Eigen::Index i = 0; i < count; ++i) {
          out.col(i) = p.draw(rng);
        }
      },
      proposal);
  return out;
}

template <typename Scalar>
VectorT<Scalar> proposal_mean(const ProposalT<Scalar>& proposal) {
  return std::visit(
      [](const auto& p) -> VectorT<Scalar> {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, StudentTProposalT<Scalar>>) {
          return p.location();
        } else {
          return p.mean();
        }
      },
      proposal);
}

template <typename Scalar>
MatrixT<Scalar> proposal_covariance(const ProposalT<Scalar>& proposal) {
  return std::visit([](const auto& p) -> MatrixT<Scalar> { return p.covariance(); }, proposal);
}

template <typename Scalar>
GaussianProposalT<Scalar> fit_gaussian(const WeightedEnsembleT<Scalar>& ensemble, Scalar inflation = Scalar(1)) {
  require_effective_size(ensemble);
  return GaussianProposalT<Scalar>(weighted_mean(ensemble), weighted_covariance(ensemble, inflation));
}

/// Moment-matched t: scale = (nu - 2) / nu times the inflated covariance, so
/// the proposal covariance equals the inflated ensemble covariance.
template <typename Scalar>
StudentTProposalT<Scalar> fit_student_t(const WeightedEnsembleT<Scalar>& ensemble, Scalar nu,
                                        Scalar inflation = Scalar(1)) {
  if (!(nu > Scalar(2))) {
    throw DomainError("fit_student_t: nu must be > 2");
  }
  require_effective_size(ensemble);
  const MatrixT<Scalar> cov = weighted_covariance(ensemble, inflation);
  return StudentTProposalT<Scalar>(weighted_mean(ensemble), (nu - Scalar(2)) / nu * cov, nu);
}

/// psi_j = exp(-phi_j) / sum_i exp(-phi_i) for minimum values phi.
template <typename Derived>
VectorT<typename Derived::Scalar> gmm_weights(const Eigen::MatrixBase<Derived>& phi) {
  if (phi.size() == 0 || !phi.allFinite()) {
    throw DomainError("gmm_weights: minimum values must be finite and non-empty");
  }
  return self_normalize(VectorT<typename Derived::Scalar>(-phi));
}

}  // namespace isamp

#endif  // ISAMP_PROPOSALS_HPP
