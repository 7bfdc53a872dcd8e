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

#include "isamp/cli.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <set>
#include <type_traits>

#include "isamp/diagnostics.hpp"
#include "isamp/init.hpp"
#include "isamp/io.hpp"
#include "isamp/parallel.hpp"

namespace isamp {

using nlohmann::json;

namespace {

template <class Config, class F>
void for_each_field(Config& c, F&& f) {
  f("target", c.target);
  f("gaussian.mean", c.gaussian_mean);
  f("gaussian.covariance", c.gaussian_covariance);
  f("regression.n_theta", c.regression_n_theta);
  f("regression.n_z", c.regression_n_z);
  f("regression.noise_sd", c.regression_noise_sd);
  f("regression.prior_mean", c.regression_prior_mean);
  f("regression.prior_sd", c.regression_prior_sd);
  f("regression.theta_ref", c.regression_theta_ref);
  f("regression.data_seed", c.regression_data_seed);
  f("regression.add_noise", c.regression_add_noise);
  f("init", c.init);
  f("mcmc.walkers", c.mcmc_walkers);
  f("mcmc.steps", c.mcmc_steps);
  f("mcmc.keep", c.mcmc_keep);
  f("mcmc.stretch", c.mcmc_stretch);
  f("gmm.n_starts", c.gmm_n_starts);
  f("gmm.confidence", c.gmm_confidence);
  f("gmm.init_samples", c.gmm_init_samples);
  f("init.file", c.init_file);
  f("isa.family", c.isa_family);
  f("isa.nu", c.isa_nu);
  f("isa.N_e", c.isa_n_e);
  f("isa.max_iterations", c.isa_max_iterations);
  f("isa.tol", c.isa_tol);
  f("isa.inflation", c.isa_inflation);
  f("isa.init_inflation", c.isa_init_inflation);
  f("opt.rel_step", c.opt.rel_step);
  f("opt.hessian_step", c.opt.hessian_step);
  f("opt.f_tol", c.opt.f_tol);
  f("opt.grad_tol", c.opt.grad_tol);
  f("opt.max_iter", c.opt.max_iter);
  f("baseline.walkers", c.baseline_walkers);
  f("baseline.steps", c.baseline_steps);
  f("histogram.bins", c.histogram_bins);
  f("seed", c.seed);
  f("workers", c.workers);
  f("output_dir", c.output_dir);
}

[[noreturn]] void bad_type(const std::string& key, const char* expected) {
  throw ConfigError("config key '" + key + "' must be " + expected);
}

template <class T>
void read_value(const json& v, const std::string& key, T& out) {
  if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) bad_type(key, "a string");
    out = v.get<std::string>();
  } else if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) bad_type(key, "a boolean");
    out = v.get<bool>();
  } else if constexpr (std::is_same_v<T, double>) {
    if (!v.is_number()) bad_type(key, "a number");
    out = v.get<double>();
  } else if constexpr (std::is_same_v<T, std::uint64_t>) {
    if (!v.is_number_unsigned()) bad_type(key, "a non-negative integer");
    out = v.get<std::uint64_t>();
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) bad_type(key, "an integer");
    const auto wide = v.get<std::int64_t>();
    if (wide < std::numeric_limits<T>::min() || wide > std::numeric_limits<T>::max()) bad_type(key, "in integer range");
    out = static_cast<T>(wide);
  } else {
    static_assert(std::is_same_v<T, std::vector<double>>);
    if (!v.is_array()) bad_type(key, "an array of numbers");
    out.clear();
    for (const auto& x : v) {
      if (!x.is_number()) bad_type(key, "an array of numbers");
      out.push_back(x.get<double>());
    }
  }
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

Vector to_vector(const std::vector<double>& v) { return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())); }

Vector broadcast_to(const std::vector<double>& v, Eigen::Index n, const char* key) {
  if (v.size() == 1) return Vector::Constant(n, v.front());
  require(static_cast<Eigen::Index>(v.size()) == n, std::string(key) + " must have length 1 or n_theta");
  return to_vector(v);
}

int guarded(std::ostream& err, const char* command, const std::function<int()>& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    err << "isamp " << command << ": " << e.what() << '\n';
    return 1;
  }
}

std::filesystem::path out_dir(const RunConfig& c) { return c.output_dir; }

struct InitialState {
  std::optional<WeightedEnsemble> ensemble;
  std::optional<Proposal> proposal;
};

WeightedEnsemble initial_mcmc(const TargetDensity& target, const RunConfig& c, std::ostream& out) {
  StretchMoveSettings s;
  s.walkers = c.mcmc_walkers;
  s.steps = c.mcmc_steps;
  s.a = c.mcmc_stretch;
  s.workers = static_cast<int>(c.workers);
  RngStream rng(c.seed, kMcmcInitStream);
  const McmcChain chain = stretch_move_run(target, target.prior_sampler(), s, rng);
  out << "init-mcmc: " << chain.walkers << " walkers x " << chain.steps << " steps, acceptance "
      << chain.acceptance_rate << ", keeping " << c.mcmc_keep << '\n';
  WeightedEnsemble ens = mcmc_init_ensemble(chain, c.mcmc_keep);
  write_ensemble_csv(ens, out_dir(c) / "init_ensemble.csv");
  return ens;
}

InitialState initial_gmm(const TargetDensity& target, const RunConfig& c, std::ostream& out) {
  MultistartSettings ms;
  ms.n_starts = static_cast<std::size_t>(c.gmm_n_starts);
  ms.optimizer = c.opt;
  ms.workers = static_cast<int>(c.workers);
  RngStream rng(c.seed, kMultistartStream);
  const auto results = multistart(target, target.prior_sampler(), ms, rng);
  const ModeSet modes = dedup_modes(results, c.gmm_confidence);
  if (modes.modes.empty()) {
    throw InitializationFailed("init-gmm: no optimization run converged");
  }
  const GaussianMixtureProposal gmm = build_gmm(modes);
  write_json(out_dir(c) / "modes.json", modes_report(modes, c.gmm_confidence));
  write_json(out_dir(c) / "gmm_proposal.json", proposal_to_json(Proposal(gmm)));
  out << "init-gmm: " << modes.candidates << " starts, " << modes.converged << " converged, " << modes.modes.size()
      << " distinct modes\n";
  InitialState state;
  if (c.gmm_init_samples > 0) {
    RngStream draw(c.seed, kGmmSampleStream);
    state.ensemble = WeightedEnsemble::uniform(sample(Proposal(gmm), draw, c.gmm_init_samples));
    write_ensemble_csv(*state.ensemble, out_dir(c) / "init_ensemble.csv");
  } else {
    state.proposal = Proposal(gmm);
  }
  return state;
}

}  // namespace

void RunConfig::validate() const {
  require(target == "toy2d" || target == "gaussian" || target == "regression",
          "unknown target '" + target + "' (expected toy2d, gaussian or regression)");
  require(init == "mcmc" || init == "gmm" || init == "file", "init must be one of mcmc, gmm, file");
  require(mcmc_walkers >= 1 && mcmc_steps >= 1, "mcmc.walkers and mcmc.steps must be >= 1");
  require(mcmc_keep >= 1 && mcmc_keep <= mcmc_walkers * mcmc_steps, "mcmc.keep must be in [1, walkers*steps]");
  require(mcmc_stretch > 1.0, "mcmc.stretch must be > 1");
  require(gmm_n_starts >= 1, "gmm.n_starts must be >= 1");
  require(gmm_confidence > 0.0 && gmm_confidence < 1.0, "gmm.confidence must be in (0, 1)");
  require(gmm_init_samples >= 0, "gmm.init_samples must be >= 0");
  require(init != "file" || !init_file.empty(), "init.file is required when init is 'file'");
  require(isa_family == "gaussian" || isa_family == "student_t", "isa.family must be gaussian or student_t");
  require(isa_n_e >= 2, "isa.N_e must be >= 2");
  require(isa_max_iterations >= 1 && isa_max_iterations < static_cast<std::int64_t>(kMcmcInitStream),
          "isa.max_iterations out of range");
  require(isa_tol >= 0.0, "isa.tol must be >= 0");
  require(isa_inflation >= 1.0 && isa_init_inflation >= 1.0, "isa inflation factors must be >= 1");
  require(isa_family != "student_t" || isa_nu > 2.0, "isa.nu must be > 2");
  require(opt.rel_step > 0.0 && opt.hessian_step > 0.0, "opt step sizes must be positive");
  require(opt.f_tol >= 0.0 && opt.grad_tol >= 0.0, "opt tolerances must be >= 0");
  require(opt.max_iter >= 1, "opt.max_iter must be >= 1");
  require(baseline_walkers >= 1 && baseline_steps >= 1, "baseline.walkers and baseline.steps must be >= 1");
  require(histogram_bins >= 1, "histogram.bins must be >= 1");
  require(workers >= 1, "workers must be >= 1");
  require(!output_dir.empty(), "output_dir must not be empty");
  require(regression_n_theta >= 1 && regression_n_z >= 1, "regression.n_theta and regression.n_z must be >= 1");
}

IsaConfig RunConfig::isa_config() const {
  IsaConfig c;
  c.samples_per_iteration = isa_n_e;
  c.max_iterations = static_cast<int>(isa_max_iterations);
  c.tol = isa_tol;
  c.inflation = isa_inflation;
  c.init_inflation = isa_init_inflation;
  c.family = proposal_family_from_string(isa_family);
  c.nu = isa_nu;
  c.seed = seed;
  c.workers = static_cast<int>(workers);
  return c;
}

bool RunConfig::operator==(const RunConfig& other) const { return config_to_json(*this) == config_to_json(other); }

RunConfig config_from_json(const json& doc) {
  if (!doc.is_object()) {
    throw ConfigError("config must be a JSON object");
  }
  RunConfig c;
  std::set<std::string> known;
  for_each_field(c, [&](const char* key, auto& field) {
    known.insert(key);
    if (const auto it = doc.find(key); it != doc.end()) {
      read_value(*it, key, field);
    }
  });
  for (const auto& item : doc.items()) {
    if (!known.contains(item.key())) {
      throw ConfigError("unknown config key '" + item.key() + "'");
    }
  }
  return c;
}

json config_to_json(const RunConfig& config) {
  json out = json::object();
  for_each_field(config, [&](const char* key, const auto& field) { out[key] = field; });
  return out;
}

RunConfig load_config(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return config_from_json(doc);
}

std::unique_ptr<TargetDensity> make_target(const RunConfig& c) {
  if (c.target == "toy2d") {
    return std::make_unique<Toy2dTarget>();
  }
  if (c.target == "gaussian") {
    const auto n = static_cast<Eigen::Index>(c.gaussian_mean.size());
    require(n >= 1, "gaussian.mean must not be empty");
    require(static_cast<Eigen::Index>(c.gaussian_covariance.size()) == n * n,
            "gaussian.covariance must have n*n entries (row-major)");
    const Matrix cov =
        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(c.gaussian_covariance.data(), n, n);
    try {
      return gaussian_target(to_vector(c.gaussian_mean), cov);
    } catch (const DomainError& e) {
      throw ConfigError(std::string("gaussian target: ") + e.what());
    }
  }
  if (c.target == "regression") {
    RegressionSetup s;
    s.n_theta = c.regression_n_theta;
    s.n_z = c.regression_n_z;
    s.noise_sd = to_vector(c.regression_noise_sd);
    s.prior_mean = to_vector(c.regression_prior_mean);
    s.prior_sd = to_vector(c.regression_prior_sd);
    s.theta_ref = broadcast_to(c.regression_theta_ref, s.n_theta, "regression.theta_ref");
    s.data_seed = c.regression_data_seed;
    s.add_noise = c.regression_add_noise;
    try {
      return make_synthetic_regression(s);
    } catch (const DomainError& e) {
      throw ConfigError(std::string("regression target: ") + e.what());
    }
  }
  throw ConfigError("unknown target '" + c.target + "' (expected toy2d, gaussian or regression)");
}

RunConfig resolve_config(const CommandOptions& options) {
  RunConfig c = load_config(options.config_path);
  if (options.output_dir) c.output_dir = options.output_dir->string();
  if (options.seed) c.seed = *options.seed;
  if (options.workers) {
    c.workers = *options.workers;
  } else {
    c.workers = workers_from_environment(static_cast<int>(c.workers));
  }
  c.validate();
  return c;
}

int exit_code(StopReason reason) {
  switch (reason) {
    case StopReason::Converged:
      return 0;
    case StopReason::MaxIterations:
      return 2;
    case StopReason::Collapsed:
      return 3;
  }
  return 1;
}

int cmd_run(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, "run", [&] {
    const RunConfig c = resolve_config(options);
    const auto target = make_target(c);
    const IsaConfig isa = c.isa_config();
    isa.validate(target->dimension());

    IterationTrace trace;
    if (c.init == "mcmc") {
      trace = isa_run(*target, initial_mcmc(*target, c, out), isa);
    } else if (c.init == "gmm") {
      const InitialState state = initial_gmm(*target, c, out);
      trace = state.ensemble ? isa_run(*target, *state.ensemble, isa) : isa_run(*target, *state.proposal, isa);
    } else {
      const WeightedEnsemble ens = read_ensemble_csv(c.init_file);
      require(ens.dimension() == target->dimension(), "init.file dimension does not match the target");
      trace = isa_run(*target, ens, isa);
    }

    const auto dir = out_dir(c);
    json doc = trace_to_json(trace, isa, target->name());
    doc["config"]["init"] = c.init;
    write_json(dir / "trace.json", doc);
    for (const auto& r : trace.records) {
      out << "iteration " << r.k << ": R = " << r.r << ", N_eff = " << r.n_eff << ", failures = " << r.failures << '\n';
    }
    out << "stopped: " << to_string(trace.stopped_reason);
    if (!trace.collapse_reason.empty()) out << " (" << trace.collapse_reason << ")";
    out << '\n';
    if (trace.final_ensemble) {
      write_ensemble_csv(*trace.final_ensemble, dir / "final_ensemble.csv");
      triangle_export(read_ensemble_csv(dir / "final_ensemble.csv"), c.histogram_bins, dir / "triangle");
    }
    return exit_code(trace.stopped_reason);
  });
}

int cmd_init_mcmc(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, "init-mcmc", [&] {
    const RunConfig c = resolve_config(options);
    const auto target = make_target(c);
    initial_mcmc(*target, c, out);
    return 0;
  });
}

int cmd_init_gmm(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, "init-gmm", [&] {
    const RunConfig c = resolve_config(options);
    const auto target = make_target(c);
    initial_gmm(*target, c, out);
    return 0;
  });
}

int cmd_mcmc_baseline(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, "mcmc-baseline", [&] {
    const RunConfig c = resolve_config(options);
    const auto target = make_target(c);
    StretchMoveSettings s;
    s.walkers = c.baseline_walkers;
    s.steps = c.baseline_steps;
    s.a = c.mcmc_stretch;
    s.workers = static_cast<int>(c.workers);
    RngStream rng(c.seed, kBaselineStream);
    const McmcChain chain = stretch_move_run(*target, target->prior_sampler(), s, rng);

    json tau = json::array();
    json mean = json::array();
    json mc_error = json::array();
    const auto total = static_cast<double>(chain.samples.cols());
    for (Eigen::Index j = 0; j < chain.dimension(); ++j) {
      const double t = iact_ensemble(chain.walker_series(j));
      const Vector row = chain.samples.row(j).transpose();
      const double m = row.mean();
      const double var = (row.array() - m).square().sum() / (total - 1.0);
      tau.push_back(t);
      mean.push_back(m);
      mc_error.push_back(std::sqrt(var * t / total));
      out << "theta_" << j << ": tau = " << t << ", mean = " << m << '\n';
    }
    const auto dir = out_dir(c);
    write_text(dir / "chain.csv", chain_to_csv(chain));
    write_json(dir / "iact.json", json{{"target", target->name()},
                                       {"walkers", chain.walkers},
                                       {"steps", chain.steps},
                                       {"acceptance_rate", chain.acceptance_rate},
                                       {"iact", tau},
                                       {"mean", mean},
                                       {"mc_error", mc_error}});
    return 0;
  });
}

int cmd_export_triangle(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, "export-triangle", [&] {
    const RunConfig c = resolve_config(options);
    const auto source = options.ensemble ? *options.ensemble : out_dir(c) / "final_ensemble.csv";
    const WeightedEnsemble ens = read_ensemble_csv(source);
    const auto files = triangle_export(ens, c.histogram_bins, out_dir(c) / "triangle");
    out << "export-triangle: wrote " << files.size() << " files to " << (out_dir(c) / "triangle").string() << '\n';
    return 0;
  });
}

int run_subcommand(const std::string& name, const CommandOptions& options, std::ostream& out, std::ostream& err) {
  if (name == "run") return cmd_run(options, out, err);
  if (name == "init-mcmc") return cmd_init_mcmc(options, out, err);
  if (name == "init-gmm") return cmd_init_gmm(options, out, err);
  if (name == "mcmc-baseline") return cmd_mcmc_baseline(options, out, err);
  if (name == "export-triangle") return cmd_export_triangle(options, out, err);
  err << "isamp: unknown subcommand '" << name << "'\n";
  return 1;
}

}  // namespace isamp
