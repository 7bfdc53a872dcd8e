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

#include "isamp/isa.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "isamp/parallel.hpp"

namespace isamp {

std::string to_string(ProposalFamily family) {
  return family == ProposalFamily::Gaussian ? "gaussian" : "student_t";
}

ProposalFamily proposal_family_from_string(const std::string& name) {
  if (name == "gaussian") {
    return ProposalFamily::Gaussian;
  }
  if (name == "student_t") {
    return ProposalFamily::StudentT;
  }
  throw DomainError("unknown proposal family '" + name + "'");
}

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::Converged:
      return "Converged";
    case StopReason::MaxIterations:
      return "MaxIterations";
    case StopReason::Collapsed:
      return "Collapsed";
  }
  return "Collapsed";
}

void IsaConfig::validate(Eigen::Index n_theta) const {
  if (samples_per_iteration <= n_theta + 1) {
    throw DomainError("isa: samples_per_iteration must exceed n_theta + 1");
  }
  if (max_iterations < 1) {
    throw DomainError("isa: max_iterations must be >= 1");
  }
  if (!(tol >= 0.0)) {
    throw DomainError("isa: tol must be >= 0");
  }
  if (!(inflation >= 1.0) || !(init_inflation >= 1.0)) {
    throw DomainError("isa: inflation must be >= 1");
  }
  if (family == ProposalFamily::StudentT && !(nu > 2.0)) {
    throw DomainError("isa: nu must be > 2");
  }
  if (workers < 1) {
    throw DomainError("isa: workers must be >= 1");
  }
}

StepResult isa_step(const TargetDensity& target, const Proposal& proposal, Eigen::Index n_e, RngStream& rng,
                    int workers) {
  if (dimension(proposal) != target.dimension()) {
    throw DomainError("isa_step: proposal and target dimensions differ");
  }
  const SampleMatrix draws = sample(proposal, rng, n_e);
  Vector log_w(n_e);
  std::vector<char> failed(static_cast<std::size_t>(n_e), 0);
  parallel_for(static_cast<std::size_t>(n_e), workers, [&](std::size_t i) {
    const auto col = static_cast<Eigen::Index>(i);
    const LogDensity lp = target.log_density(draws.col(col));
    if (!lp || !std::isfinite(*lp)) {
      failed[i] = 1;
      log_w(col) = -std::numeric_limits<double>::infinity();
      return;
    }
    log_w(col) = *lp - log_density(proposal, draws.col(col));
  });
  std::size_t failures = 0;
  for (char f : failed) {
    failures += static_cast<std::size_t>(f);
  }
  WeightedEnsemble ensemble(draws, log_w);
  StepResult out{std::move(ensemble), {}, failures};
  out.quality = out.ensemble.quality();
  return out;
}

Proposal fit_proposal(const WeightedEnsemble& ensemble, const IsaConfig& config, double inflation) {
  if (config.family == ProposalFamily::StudentT) {
    return fit_student_t(ensemble, config.nu, inflation);
  }
  return fit_gaussian(ensemble, inflation);
}

IterationTrace isa_run(const TargetDensity& target, const Proposal& initial, const IsaConfig& config) {
  config.validate(target.dimension());
  if (dimension(initial) != target.dimension()) {
    throw DomainError("isa_run: proposal and target dimensions differ");
  }
  IterationTrace trace;
  Proposal current = initial;
  double previous_r = std::numeric_limits<double>::quiet_NaN();

  for (int k = 1; k <= config.max_iterations; ++k) {
    const auto started = std::chrono::steady_clock::now();
    RngStream rng(config.seed, static_cast<std::uint64_t>(k));
    std::optional<StepResult> step;
    try {
      step.emplace(isa_step(target, current, config.samples_per_iteration, rng, config.workers));
    } catch (const AllWeightsZero& e) {
      trace.stopped_reason = StopReason::Collapsed;
      trace.collapse_reason = e.what();
      break;
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    IterationRecord record{k, config.samples_per_iteration, step->quality.r, step->quality.n_eff,
                           step->failures, elapsed, current};
    trace.records.push_back(std::move(record));
    trace.final_proposal = current;
    trace.final_ensemble = step->ensemble;

    const double r = step->quality.r;
    if (k > 1 && std::abs(r - previous_r) / previous_r < config.tol &&
        r < 0.5 * static_cast<double>(config.samples_per_iteration)) {
      trace.stopped_reason = StopReason::Converged;
      break;
    }
    if (k == config.max_iterations) {
      trace.stopped_reason = StopReason::MaxIterations;
      break;
    }
    try {
      current = fit_proposal(step->ensemble, config, config.inflation);
    } catch (const DegenerateEnsemble& e) {
      trace.stopped_reason = StopReason::Collapsed;
      trace.collapse_reason = e.what();
      break;
    }
    previous_r = r;
  }
  return trace;
}

IterationTrace isa_run(const TargetDensity& target, const WeightedEnsemble& initial, const IsaConfig& config) {
  config.validate(target.dimension());
  if (initial.dimension() != target.dimension()) {
    throw DomainError("isa_run: ensemble and target dimensions differ");
  }
  try {
    return isa_run(target, fit_proposal(initial, config, config.init_inflation), config);
  } catch (const DegenerateEnsemble& e) {
    IterationTrace trace;
    trace.stopped_reason = StopReason::Collapsed;
    trace.collapse_reason = e.what();
    return trace;
  }
}

}  // namespace isamp
