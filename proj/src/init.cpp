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

#include "isamp/init.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <boost/math/distributions/chi_squared.hpp>

#include "isamp/numeric.hpp"
#include "isamp/parallel.hpp"

namespace isamp {

Matrix McmcChain::walker_series(Eigen::Index coordinate) const {
  if (coordinate < 0 || coordinate >= dimension()) {
    throw DomainError("walker_series: coordinate out of range");
  }
  Matrix series(walkers, steps);
  for (Eigen::Index s = 0; s < steps; ++s) {
    for (Eigen::Index w = 0; w < walkers; ++w) {
      series(w, s) = samples(coordinate, s * walkers + w);
    }
  }
  return series;
}

Eigen::Index minimum_walkers(Eigen::Index n_theta) { return std::max<Eigen::Index>(2 * n_theta, 4); }

Eigen::Index default_init_walkers(Eigen::Index n_theta) { return std::max<Eigen::Index>(2 * n_theta + 2, 4); }

double draw_stretch_factor(RngStream& rng, double a) {
  const double u = rng.uniform();
  const double root = (a - 1.0) * u + 1.0;
  return root * root / a;
}

double stretch_log_acceptance(double z, Eigen::Index n_theta, double log_p_proposed, double log_p_current) {
  const double log_ratio = static_cast<double>(n_theta - 1) * std::log(z) + log_p_proposed - log_p_current;
  return std::min(0.0, log_ratio);
}

McmcChain stretch_move_run(const TargetDensity& target, const PriorSampler& prior, const StretchMoveSettings& settings,
                           RngStream& rng) {
  const Eigen::Index n = target.dimension();
  const Eigen::Index walkers = settings.walkers;
  if (walkers < minimum_walkers(n)) {
    throw DomainError("stretch_move_run: need at least " + std::to_string(minimum_walkers(n)) + " walkers, got " +
                      std::to_string(walkers));
  }
  if (settings.steps < 1) {
    throw DomainError("stretch_move_run: steps must be >= 1");
  }
  if (!(settings.a > 1.0)) {
    throw DomainError("stretch_move_run: stretch parameter a must be > 1");
  }

  Matrix position(n, walkers);
  Vector log_p(walkers);
  for (Eigen::Index w = 0; w < walkers; ++w) {
    bool found = false;
    for (int attempt = 0; attempt < settings.max_prior_draws; ++attempt) {
      const Vector candidate = prior(rng);
      const LogDensity value = target.log_density(candidate);
      if (value && std::isfinite(*value)) {
        position.col(w) = candidate;
        log_p(w) = *value;
        found = true;
        break;
      }
    }
    if (!found) {
      throw InitializationFailed("stretch_move_run: no feasible prior draw for walker " + std::to_string(w));
    }
  }

  McmcChain chain;
  chain.walkers = walkers;
  chain.steps = settings.steps;
  chain.samples.resize(n, walkers * settings.steps);
  chain.log_densities.resize(walkers * settings.steps);

  const Eigen::Index half = walkers / 2;
  const Eigen::Index begin[2] = {0, half};
  const Eigen::Index end[2] = {half, walkers};

  for (Eigen::Index step = 0; step < settings.steps; ++step) {
    for (int h = 0; h < 2; ++h) {
      const Eigen::Index count = end[h] - begin[h];
      const Eigen::Index other_begin = begin[1 - h];
      const Eigen::Index other_count = end[1 - h] - other_begin;
      Matrix proposals(n, count);
      Vector z(count);
      Vector log_u(count);
      for (Eigen::Index i = 0; i < count; ++i) {
        const Eigen::Index j = begin[h] + i;
        const auto pick = static_cast<Eigen::Index>(rng.uniform() * static_cast<double>(other_count));
        const Eigen::Index k = other_begin + std::min(pick, other_count - 1);
        z(i) = draw_stretch_factor(rng, settings.a);
        log_u(i) = std::log(rng.uniform_open());
        proposals.col(i) = position.col(k) + z(i) * (position.col(j) - position.col(k));
      }
      const DensityBatch batch = parallel_map_density(target, proposals, settings.workers);
      for (Eigen::Index i = 0; i < count; ++i) {
        const LogDensity& value = batch.values[static_cast<std::size_t>(i)];
        if (!value) {
          continue;
        }
        const Eigen::Index j = begin[h] + i;
        if (log_u(i) < stretch_log_acceptance(z(i), n, *value, log_p(j))) {
          position.col(j) = proposals.col(i);
          log_p(j) = *value;
          ++chain.accepted;
        }
      }
    }
    chain.samples.middleCols(step * walkers, walkers) = position;
    chain.log_densities.segment(step * walkers, walkers) = log_p;
  }
  chain.acceptance_rate =
      static_cast<double>(chain.accepted) / static_cast<double>(walkers * settings.steps);
  return chain;
}

WeightedEnsemble mcmc_init_ensemble(const McmcChain& chain, Eigen::Index n_keep) {
  if (n_keep < 1 || n_keep > chain.samples.cols()) {
    throw DomainError("mcmc_init_ensemble: n_keep must be in [1, chain length]");
  }
  return WeightedEnsemble::uniform(chain.samples.leftCols(n_keep));
}

double chi_square_quantile(double probability, double dof) {
  if (!(probability > 0.0 && probability < 1.0) || !(dof > 0.0)) {
    throw DomainError("chi_square_quantile: need 0 < p < 1 and dof > 0");
  }
  return boost::math::quantile(boost::math::chi_squared_distribution<double>(dof), probability);
}

double mode_distance(const Mode& from, const Vector& to) {
  const Vector d = to - from.minimizer;
  return d.dot(from.hessian * d);
}

namespace {

bool mode_order(const Mode& a, const Mode& b) {
  if (a.f_min != b.f_min) {
    return a.f_min < b.f_min;
  }
  return std::lexicographical_compare(a.minimizer.data(), a.minimizer.data() + a.minimizer.size(),
                                      b.minimizer.data(), b.minimizer.data() + b.minimizer.size());
}

void dedup_into(std::vector<Mode> sorted, double confidence, ModeSet& out) {
  if (sorted.empty()) {
    throw EmptyInput("dedup_modes: no converged candidates");
  }
  std::stable_sort(sorted.begin(), sorted.end(), mode_order);
  const double threshold = chi_square_quantile(confidence, static_cast<double>(sorted.front().minimizer.size()));
  for (Mode& candidate : sorted) {
    bool distinct = true;
    for (const Mode& kept : out.modes) {
      const double d = std::max(mode_distance(kept, candidate.minimizer), mode_distance(candidate, kept.minimizer));
      if (!(d > threshold)) {
        distinct = false;
        break;
      }
    }
    if (distinct) {
      out.modes.push_back(std::move(candidate));
    }
  }
}

}  // namespace

ModeSet dedup_modes(const std::vector<OptimizationResult>& candidates, double confidence) {
  ModeSet out;
  out.candidates = candidates.size();
  std::vector<Mode> converged;
  for (const auto& c : candidates) {
    switch (c.status) {
      case OptimizationStatus::Converged:
        ++out.converged;
        converged.push_back(Mode{c.minimizer, c.f_min, c.hessian_approx});
        break;
      case OptimizationStatus::MaxIterations:
        ++out.max_iterations;
        break;
      case OptimizationStatus::Failed:
        ++out.failed;
        break;
    }
  }
  dedup_into(std::move(converged), confidence, out);
  return out;
}

ModeSet dedup_modes(const std::vector<Mode>& modes, double confidence) {
  ModeSet out;
  out.candidates = modes.size();
  out.converged = modes.size();
  dedup_into(modes, confidence, out);
  return out;
}

GaussianMixtureProposal build_gmm(const ModeSet& modes) {
  if (modes.modes.empty()) {
    throw EmptyInput("build_gmm: no modes");
  }
  std::vector<GaussianProposal> components;
  Vector phi(static_cast<Eigen::Index>(modes.modes.size()));
  for (std::size_t j = 0; j < modes.modes.size(); ++j) {
    const Mode& m = modes.modes[j];
    const Matrix precision = repair_spd<double>(m.hessian, SpdKind::Hessian);
    const Matrix covariance = repair_spd<double>(precision.llt().solve(Matrix::Identity(precision.rows(), precision.cols())),
                                                 SpdKind::Hessian);
    components.emplace_back(m.minimizer, covariance);
    phi(static_cast<Eigen::Index>(j)) = m.f_min;
  }
  return GaussianMixtureProposal(std::move(components), gmm_weights(phi));
}

std::vector<OptimizationResult> multistart(const TargetDensity& target, const PriorSampler& prior,
                                           const MultistartSettings& settings, RngStream& rng) {
  if (settings.n_starts < 1) {
    throw DomainError("multistart: n_starts must be >= 1");
  }
  std::vector<Vector> starts;
  starts.reserve(settings.n_starts);
  for (std::size_t i = 0; i < settings.n_starts; ++i) {
    starts.push_back(prior(rng));
  }
  std::vector<OptimizationResult> results(settings.n_starts);
  parallel_for(settings.n_starts, settings.workers,
               [&](std::size_t i) { results[i] = minimize(target, starts[i], settings.optimizer); });
  return results;
}

}  // namespace isamp
