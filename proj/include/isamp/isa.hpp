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

#ifndef ISAMP_ISA_HPP
#define ISAMP_ISA_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "isamp/ensemble.hpp"
#include "isamp/proposals.hpp"
#include "isamp/rng.hpp"
#include "isamp/targets.hpp"

namespace isamp {

enum class ProposalFamily { Gaussian, StudentT };

std::string to_string(ProposalFamily family);
ProposalFamily proposal_family_from_string(const std::string& name);

struct IsaConfig {
  Eigen::Index samples_per_iteration = 20000;
  int max_iterations = 10;
  double tol = 0.05;
  double inflation = 1.0;       // applied when refitting between iterations
  double init_inflation = 1.0;  // applied when fitting q^0 from an initial ensemble
  ProposalFamily family = ProposalFamily::Gaussian;
  double nu = 3.0;
  std::uint64_t seed = 0;
  int workers = 1;

  /// Throws DomainError when a field is out of range for dimension n_theta.
  void validate(Eigen::Index n_theta) const;
};

enum class StopReason { Converged, MaxIterations, Collapsed };

std::string to_string(StopReason reason);

struct IterationRecord {
  int k = 0;
  Eigen::Index n_e = 0;
  double r = 1.0;
  double n_eff = 0.0;
  std::size_t failures = 0;
  double wall_time = 0.0;  // seconds
  Proposal proposal;       // the proposal the iteration sampled from
};

struct IterationTrace {
  std::vector<IterationRecord> records;
  StopReason stopped_reason = StopReason::MaxIterations;
  std::string collapse_reason;
  std::optional<Proposal> final_proposal;
  std::optional<WeightedEnsemble> final_ensemble;
};

struct StepResult {
  WeightedEnsemble ensemble;
  QualityReport quality;
  std::size_t failures = 0;
};

/// Draws n_e samples from `proposal`, weights them by
/// log p(theta) - log q(theta) with failures mapped to -inf, and
/// self-normalizes. Draws happen on the calling thread; densities are
/// evaluated on `workers` threads. Throws AllWeightsZero when every sample fails.
StepResult isa_step(const TargetDensity& target, const Proposal& proposal, Eigen::Index n_e, RngStream& rng,
                    int workers = 1);

/// Fits the configured family to an ensemble.
Proposal fit_proposal(const WeightedEnsemble& ensemble, const IsaConfig& config, double inflation);

/// Runs the iteration from proposal q^0. Iteration k samples with stream
/// (seed, k). Stops when |R^k - R^(k-1)| / R^(k-1) < tol and R^k < N_e / 2,
/// after max_iterations, or on collapse.
IterationTrace isa_run(const TargetDensity& target, const Proposal& initial, const IsaConfig& config);

/// Fits q^0 from `initial` (with init_inflation) and runs the iteration.
IterationTrace isa_run(const TargetDensity& target, const WeightedEnsemble& initial, const IsaConfig& config);

}  // namespace isamp

#endif  // ISAMP_ISA_HPP
