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

#ifndef ISAMP_INIT_HPP
#define ISAMP_INIT_HPP

#include <cstdint>
#include <vector>

#include "isamp/ensemble.hpp"
#include "isamp/optimize.hpp"
#include "isamp/proposals.hpp"
#include "isamp/rng.hpp"
#include "isamp/targets.hpp"

namespace isamp {

// ---------------------------------------------------------------------------
// Affine-invariant ensemble MCMC (stretch move).

/// Stored positions after each step, walker-major within a step: column
/// step * walkers + w.
struct McmcChain {
  Eigen::Index walkers = 0;
  Eigen::Index steps = 0;
  SampleMatrix samples;
  Vector log_densities;
  std::uint64_t accepted = 0;
  double acceptance_rate = 0.0;

  [[nodiscard]] Eigen::Index dimension() const { return samples.rows(); }

  /// walkers x steps trace of one coordinate.
  [[nodiscard]] Matrix walker_series(Eigen::Index coordinate) const;
};

struct StretchMoveSettings {
  Eigen::Index walkers = 4;
  Eigen::Index steps = 1000;
  double a = 2.0;
  int workers = 1;
  int max_prior_draws = 10000;  // per walker
};

/// Smallest walker count accepted for a problem of dimension n.
Eigen::Index minimum_walkers(Eigen::Index n_theta);

/// Default walker count for initialization runs: max(2 n + 2, 4).
Eigen::Index default_init_walkers(Eigen::Index n_theta);

/// z with density proportional to 1/sqrt(z) on [1/a, a].
double draw_stretch_factor(RngStream& rng, double a);

/// log of the acceptance probability min(1, z^(n-1) p(Y) / p(X)).
double stretch_log_acceptance(double z, Eigen::Index n_theta, double log_p_proposed, double log_p_current);

/// Runs the sampler; walkers start at feasible prior draws. Walker updates
/// alternate between the two half-ensembles, each half moving against the
/// current positions of the other. Density evaluations within a half run in
/// parallel; random draws stay on the calling thread.
McmcChain stretch_move_run(const TargetDensity& target, const PriorSampler& prior, const StretchMoveSettings& settings,
                           RngStream& rng);

/// First n_keep stored samples with uniform weights.
WeightedEnsemble mcmc_init_ensemble(const McmcChain& chain, Eigen::Index n_keep);

// ---------------------------------------------------------------------------
// Gaussian mixture initialization from multistart optimization.

struct Mode {
  Vector minimizer;
  double f_min = 0.0;
  Matrix hessian;
};

struct ModeSet {
  std::vector<Mode> modes;
  std::size_t candidates = 0;
  std::size_t converged = 0;
  std::size_t max_iterations = 0;
  std::size_t failed = 0;
};

/// Chi-square quantile with `dof` degrees of freedom.
double chi_square_quantile(double probability, double dof);

/// (mu_i - mu_j)^T H_i (mu_i - mu_j): squared distance of mu_j from mode i in
/// the metric of the Gaussian N(mu_i, H_i^{-1}).
double mode_distance(const Mode& from, const Vector& to);

/// Greedy deduplication in ascending f_min order (ties by lexicographic
/// minimizer). A candidate is kept when, for every mode already kept, the
/// larger of the two directed distances exceeds the chi-square quantile at
/// `confidence` with n_theta degrees of freedom. Non-converged candidates are
/// counted but ignored.
ModeSet dedup_modes(const std::vector<OptimizationResult>& candidates, double confidence = 0.95);

/// Same rule applied to an existing set of modes.
ModeSet dedup_modes(const std::vector<Mode>& modes, double confidence = 0.95);

/// One component per mode with covariance H^{-1}; psi from the mode values.
GaussianMixtureProposal build_gmm(const ModeSet& modes);

struct MultistartSettings {
  std::size_t n_starts = 100;
  OptimizerSettings optimizer;
  int workers = 1;
};

/// Minimizes from n_starts prior draws. Starts are drawn on the calling
/// thread in order; results are returned in start order.
std::vector<OptimizationResult> multistart(const TargetDensity& target, const PriorSampler& prior,
                                           const MultistartSettings& settings, RngStream& rng);

}  // namespace isamp

#endif  // ISAMP_INIT_HPP
