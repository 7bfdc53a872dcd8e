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

#ifndef ISAMP_IO_HPP
#define ISAMP_IO_HPP

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "isamp/ensemble.hpp"
#include "isamp/init.hpp"
#include "isamp/isa.hpp"
#include "isamp/proposals.hpp"

namespace isamp {

/// 17 significant digits ("%.17g"); every double survives the round trip.
std::string format_real(double value);

// Ensemble CSV: header `weight,theta_0,...,theta_{n-1}`, one row per sample.
std::string ensemble_to_csv(const WeightedEnsemble& ensemble);
WeightedEnsemble ensemble_from_csv(const std::string& text);
void write_ensemble_csv(const WeightedEnsemble& ensemble, const std::filesystem::path& path);
WeightedEnsemble read_ensemble_csv(const std::filesystem::path& path);

// Proposal JSON: {family, dim, nu?, mean[], covariance[] (row-major), scale[]?,
// components[]?, psi[]?}. Student-t stores the covariance nu/(nu-2) scale and
// the scale itself; mixtures store their overall moments plus components.
nlohmann::json proposal_to_json(const Proposal& proposal);
Proposal proposal_from_json(const nlohmann::json& doc);

nlohmann::json isa_config_to_json(const IsaConfig& config);

/// {config, records:[{k, N_e, r, n_eff, failures, wall_time, proposal}],
///  stopped_reason, collapse_reason, final_proposal}
nlohmann::json trace_to_json(const IterationTrace& trace, const IsaConfig& config, const std::string& target_name);

/// Columns step,walker,log_density,theta_0,...
std::string chain_to_csv(const McmcChain& chain);

nlohmann::json modes_report(const ModeSet& modes, double confidence);

void write_text(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);

/// Pretty-printed JSON with a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace isamp

#endif  // ISAMP_IO_HPP
