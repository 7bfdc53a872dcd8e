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

#ifndef ISAMP_CLI_HPP
#define ISAMP_CLI_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "isamp/isa.hpp"
#include "isamp/optimize.hpp"
#include "isamp/targets.hpp"
#include "isamp/types.hpp"

namespace isamp {

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// One run, read from a flat JSON object with dotted keys, e.g.
/// {"target": "toy2d", "init": "mcmc", "mcmc.walkers": 4, "isa.N_e": 20000}.
/// Missing keys take the defaults below; unknown keys are rejected.
struct RunConfig {
  std::string target = "toy2d";  // toy2d | gaussian | regression

  std::vector<double> gaussian_mean{0.0, 0.0};
  std::vector<double> gaussian_covariance{1.0, 0.0, 0.0, 1.0};  // row-major

  std::int64_t regression_n_theta = 3;
  std::int64_t regression_n_z = 12;
  std::vector<double> regression_noise_sd{0.1};  // length 1 broadcasts
  std::vector<double> regression_prior_mean{0.0};
  std::vector<double> regression_prior_sd{1.0};
  std::vector<double> regression_theta_ref{0.5};
  std::uint64_t regression_data_seed = 0;
  bool regression_add_noise = true;

  std::string init = "mcmc";  // mcmc | gmm | file
  std::int64_t mcmc_walkers = 4;
  std::int64_t mcmc_steps = 5;
  std::int64_t mcmc_keep = 20;
  double mcmc_stretch = 2.0;
  std::int64_t gmm_n_starts = 100;
  double gmm_confidence = 0.95;
  std::int64_t gmm_init_samples = 50;  // 0: the mixture itself is q^0
  std::string init_file;

  std::string isa_family = "gaussian";
  double isa_nu = 3.0;
  std::int64_t isa_n_e = 20000;
  std::int64_t isa_max_iterations = 10;
  double isa_tol = 0.05;
  double isa_inflation = 1.0;
  double isa_init_inflation = 1.0;

  OptimizerSettings opt;

  std::int64_t baseline_walkers = 4;
  std::int64_t baseline_steps = 100000;

  std::int64_t histogram_bins = 50;

  std::uint64_t seed = 0;
  std::int64_t workers = 1;
  std::string output_dir = "out";

  /// Throws ConfigError on out-of-range fields.
  void validate() const;

  [[nodiscard]] IsaConfig isa_config() const;

  bool operator==(const RunConfig&) const;
};

RunConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const RunConfig& config);
RunConfig load_config(const std::filesystem::path& path);

/// Throws ConfigError for unknown target names or inconsistent target fields.
std::unique_ptr<TargetDensity> make_target(const RunConfig& config);

// Stream ids reserved for the stages that precede ISA iterations, which use
// streams 1..max_iterations.
inline constexpr std::uint64_t kMcmcInitStream = std::uint64_t{1} << 40;
inline constexpr std::uint64_t kMultistartStream = kMcmcInitStream + 1;
inline constexpr std::uint64_t kGmmSampleStream = kMcmcInitStream + 2;
inline constexpr std::uint64_t kBaselineStream = kMcmcInitStream + 3;

struct CommandOptions {
  std::filesystem::path config_path;
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> workers;
  std::optional<std::filesystem::path> ensemble;  // export-triangle input
};

/// Loads the config and applies overrides: flags first, then ISA_WORKERS,
/// then the file.
RunConfig resolve_config(const CommandOptions& options);

int exit_code(StopReason reason);

// Each command returns the process exit code and reports errors on `err`.
int cmd_run(const CommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_init_mcmc(const CommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_init_gmm(const CommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_mcmc_baseline(const CommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_export_triangle(const CommandOptions& options, std::ostream& out, std::ostream& err);

/// Dispatch by subcommand name; unknown names return 1.
int run_subcommand(const std::string& name, const CommandOptions& options, std::ostream& out, std::ostream& err);

}  // namespace isamp

#endif  // ISAMP_CLI_HPP
