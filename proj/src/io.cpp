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

#include "isamp/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace isamp {

using nlohmann::json;

std::string format_real(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

namespace {

json vector_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out.push_back(v(i));
  }
  return out;
}

json matrix_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      out.push_back(m(r, c));
    }
  }
  return out;
}

Vector vector_from(const json& doc, const char* key, Eigen::Index n) {
  const auto values = doc.at(key).get<std::vector<double>>();
  if (static_cast<Eigen::Index>(values.size()) != n) {
    throw IoError(std::string("proposal JSON: '") + key + "' has the wrong length");
  }
  return Eigen::Map<const Vector>(values.data(), n);
}

Matrix matrix_from(const json& doc, const char* key, Eigen::Index n) {
  const auto values = doc.at(key).get<std::vector<double>>();
  if (static_cast<Eigen::Index>(values.size()) != n * n) {
    throw IoError(std::string("proposal JSON: '") + key + "' must have dim*dim entries");
  }
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(values.data(), n, n);
}

json gaussian_json(const GaussianProposal& g) {
  return json{{"family", "gaussian"},
              {"dim", g.dimension()},
              {"mean", vector_json(g.mean())},
              {"covariance", matrix_json(g.covariance())}};
}

}  // namespace

std::string ensemble_to_csv(const WeightedEnsemble& ensemble) {
  std::ostringstream os;
  os << "weight";
  for (Eigen::Index j = 0; j < ensemble.dimension(); ++j) {
    os << ",theta_" << j;
  }
  os << '\n';
  for (Eigen::Index i = 0; i < ensemble.size(); ++i) {
    os << format_real(ensemble.weights()(i));
    for (Eigen::Index j = 0; j < ensemble.dimension(); ++j) {
      os << ',' << format_real(ensemble.samples()(j, i));
    }
    os << '\n';
  }
  return os.str();
}

WeightedEnsemble ensemble_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("weight", 0) != 0) {
    throw IoError("ensemble CSV: missing 'weight,theta_0,...' header");
  }
  const auto columns = static_cast<Eigen::Index>(std::count(line.begin(), line.end(), ','));
  if (columns < 1) {
    throw IoError("ensemble CSV: no parameter columns");
  }
  std::vector<double> weights;
  std::vector<double> values;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") {
      continue;
    }
    std::istringstream row(line);
    std::string cell;
    Eigen::Index field = 0;
    while (std::getline(row, cell, ',')) {
      if (!cell.empty() && cell.back() == '\r') {
        cell.pop_back();
      }
      double v = 0.0;
      const char* first = cell.data();
      const char* last = first + cell.size();
      while (first != last && *first == ' ') {
        ++first;
      }
      const auto [end, ec] = std::from_chars(first, last, v);
      if (ec == std::errc::invalid_argument || end != last) {
        throw IoError("ensemble CSV: bad number on line " + std::to_string(line_no));
      }
      (field == 0 ? weights : values).push_back(v);
      ++field;
    }
    if (field != columns + 1) {
      throw IoError("ensemble CSV: wrong column count on line " + std::to_string(line_no));
    }
  }
  if (weights.empty()) {
    throw IoError("ensemble CSV: no samples");
  }
  const auto n = static_cast<Eigen::Index>(weights.size());
  Matrix samples = Eigen::Map<const Matrix>(values.data(), columns, n);
  return WeightedEnsemble::from_weights(std::move(samples), Eigen::Map<const Vector>(weights.data(), n));
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  out << content;
  if (!out) {
    throw IoError("failed writing " + path.string());
  }
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_json(const std::filesystem::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

void write_ensemble_csv(const WeightedEnsemble& ensemble, const std::filesystem::path& path) {
  write_text(path, ensemble_to_csv(ensemble));
}

WeightedEnsemble read_ensemble_csv(const std::filesystem::path& path) { return ensemble_from_csv(read_text(path)); }

json proposal_to_json(const Proposal& proposal) {
  return std::visit(
      [](const auto& p) -> json {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, GaussianProposal>) {
          return gaussian_json(p);
        } else if constexpr (std::is_same_v<P, StudentTProposal>) {
          return json{{"family", "student_t"},
                      {"dim", p.dimension()},
                      {"nu", p.nu()},
                      {"mean", vector_json(p.location())},
                      {"covariance", matrix_json(p.covariance())},
                      {"scale", matrix_json(p.scale())}};
        } else {
          json components = json::array();
          for (const auto& c : p.components()) {
            components.push_back(gaussian_json(c));
          }
          return json{{"family", "gaussian_mixture"},
                      {"dim", p.dimension()},
                      {"mean", vector_json(p.mean())},
                      {"covariance", matrix_json(p.covariance())},
                      {"psi", vector_json(p.psi())},
                      {"components", std::move(components)}};
        }
      },
      proposal);
}

Proposal proposal_from_json(const json& doc) {
  try {
    const std::string family = doc.at("family").get<std::string>();
    const auto n = static_cast<Eigen::Index>(doc.at("mean").size());
    if (family == "gaussian") {
      return GaussianProposal(vector_from(doc, "mean", n), matrix_from(doc, "covariance", n));
    }
    if (family == "student_t") {
      const double nu = doc.at("nu").get<double>();
      Matrix scale = doc.contains("scale") ? matrix_from(doc, "scale", n)
                                           : Matrix((nu - 2.0) / nu * matrix_from(doc, "covariance", n));
      return StudentTProposal(vector_from(doc, "mean", n), scale, nu);
    }
    if (family == "gaussian_mixture") {
      std::vector<GaussianProposal> components;
      for (const auto& c : doc.at("components")) {
        const auto m = static_cast<Eigen::Index>(c.at("mean").size());
        components.emplace_back(vector_from(c, "mean", m), matrix_from(c, "covariance", m));
      }
      const auto k = static_cast<Eigen::Index>(components.size());
      return GaussianMixtureProposal(std::move(components), vector_from(doc, "psi", k));
    }
    throw IoError("proposal JSON: unknown family '" + family + "'");
  } catch (const json::exception& e) {
    throw IoError(std::string("proposal JSON: ") + e.what());
  } catch (const DomainError& e) {
    throw IoError(std::string("proposal JSON: ") + e.what());
  }
}

json isa_config_to_json(const IsaConfig& config) {
  return json{{"family", to_string(config.family)},
              {"nu", config.nu},
              {"N_e", config.samples_per_iteration},
              {"max_iterations", config.max_iterations},
              {"tol", config.tol},
              {"inflation", config.inflation},
              {"init_inflation", config.init_inflation},
              {"seed", config.seed}};
}

json trace_to_json(const IterationTrace& trace, const IsaConfig& config, const std::string& target_name) {
  json cfg = isa_config_to_json(config);
  cfg["target"] = target_name;
  json records = json::array();
  for (const auto& r : trace.records) {
    records.push_back(json{{"k", r.k},
                           {"N_e", r.n_e},
                           {"r", r.r},
                           {"n_eff", r.n_eff},
                           {"failures", r.failures},
                           {"wall_time", r.wall_time},
                           {"proposal", proposal_to_json(r.proposal)}});
  }
  json out{{"config", std::move(cfg)}, {"records", std::move(records)}, {"stopped_reason", to_string(trace.stopped_reason)}};
  if (!trace.collapse_reason.empty()) {
    out["collapse_reason"] = trace.collapse_reason;
  }
  out["final_proposal"] = trace.final_proposal ? proposal_to_json(*trace.final_proposal) : json(nullptr);
  return out;
}

std::string chain_to_csv(const McmcChain& chain) {
  std::ostringstream os;
  os << "step,walker,log_density";
  for (Eigen::Index j = 0; j < chain.dimension(); ++j) {
    os << ",theta_" << j;
  }
  os << '\n';
  for (Eigen::Index s = 0; s < chain.steps; ++s) {
    for (Eigen::Index w = 0; w < chain.walkers; ++w) {
      const Eigen::Index col = s * chain.walkers + w;
      os << s << ',' << w << ',' << format_real(chain.log_densities(col));
      for (Eigen::Index j = 0; j < chain.dimension(); ++j) {
        os << ',' << format_real(chain.samples(j, col));
      }
      os << '\n';
    }
  }
  return os.str();
}

json modes_report(const ModeSet& modes, double confidence) {
  json list = json::array();
  for (const auto& m : modes.modes) {
    list.push_back(json{{"minimizer", vector_json(m.minimizer)}, {"f_min", m.f_min}, {"hessian", matrix_json(m.hessian)}});
  }
  return json{{"confidence", confidence},
              {"candidates", modes.candidates},
              {"status_counts",
               {{"Converged", modes.converged}, {"MaxIterations", modes.max_iterations}, {"Failed", modes.failed}}},
              {"modes", std::move(list)}};
}

}  // namespace isamp
