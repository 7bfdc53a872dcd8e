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

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "isamp/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Iterative importance sampling for Bayesian parameter estimation"};
  app.require_subcommand(1);

  isamp::CommandOptions options;
  std::string config;
  std::string output;
  std::string ensemble;
  std::uint64_t seed = 0;
  std::int64_t workers = 1;

  const std::pair<const char*, const char*> commands[] = {
      {"run", "initialize, run ISA, write trace, final ensemble and triangle data"},
      {"init-mcmc", "short stretch-move run; writes the initial ensemble"},
      {"init-gmm", "multistart optimization; writes modes and the mixture proposal"},
      {"mcmc-baseline", "long stretch-move run; writes the chain and IACT report"},
      {"export-triangle", "histogram CSVs and SVG for an ensemble"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "flat JSON run config")->required()->check(CLI::ExistingFile);
    sub->add_option("--output", output, "output directory (overrides output_dir)");
    sub->add_option("--seed", seed, "RNG seed (overrides seed)");
    sub->add_option("--workers", workers, "density evaluation threads")->check(CLI::PositiveNumber);
    if (std::string(name) == "export-triangle") {
      sub->add_option("--ensemble", ensemble, "ensemble CSV (default: <output>/final_ensemble.csv)");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const CLI::App* chosen = app.get_subcommands().front();
  options.config_path = config;
  if (chosen->count("--output") > 0) options.output_dir = output;
  if (chosen->count("--seed") > 0) options.seed = seed;
  if (chosen->count("--workers") > 0) options.workers = workers;
  if (!ensemble.empty()) options.ensemble = ensemble;
  return isamp::run_subcommand(chosen->get_name(), options, std::cout, std::cerr);
}
