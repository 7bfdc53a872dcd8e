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

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>

#include "isamp/init.hpp"
#include "isamp/io.hpp"
#include "isamp/isa.hpp"

namespace isamp {
namespace {

using nlohmann::json;

Vector v2(double a, double b) {
  Vector out(2);
  out << a, b;
  return out;
}

Matrix spd2() {
  Matrix c(2, 2);
  c << 1.0 / 3.0, 0.1, 0.1, 2.0 / 7.0;
  return c;
}

TEST(FormatReal, SeventeenSignificantDigitsRoundTrip) {
  EXPECT_EQ(format_real(0.1), "0.10000000000000001");
  EXPECT_EQ(format_real(1.0), "1");
  for (double x : {1.0 / 3.0, -2.718281828459045, 5e-324, 1.7976931348623157e308, 123456.789}) {
    EXPECT_EQ(std::strtod(format_real(x).c_str(), nullptr), x) << x;
  }
}

TEST(EnsembleCsv, HeaderAndRoundTrip) {
  Matrix s(2, 3);
  s << 1.0 / 3.0, -2.0, 1e-300, 0.1, 5.0, -7.25;
  Vector l(3);
  l << 0.0, -1.0, -0.5;
  const WeightedEnsemble ens(s, l);
  const std::string csv = ensemble_to_csv(ens);
  EXPECT_EQ(csv.rfind("weight,theta_0,theta_1\n", 0), 0U);
  const WeightedEnsemble back = ensemble_from_csv(csv);
  EXPECT_EQ(back.samples(), ens.samples());
  EXPECT_LT((back.weights() - ens.weights()).cwiseAbs().maxCoeff(), 1e-16);
  EXPECT_EQ(ensemble_to_csv(back), csv);
}

TEST(EnsembleCsv, ZeroAndSubnormalWeightsParse) {
  const std::string csv = "weight,theta_0\n1,0.5\n0,1.5\n4.9406564584124654e-324,2.5\n";
  const WeightedEnsemble ens = ensemble_from_csv(csv);
  EXPECT_EQ(ens.size(), 3);
  EXPECT_EQ(ens.weights()(1), 0.0);
  EXPECT_EQ(ens.samples()(0, 2), 2.5);
}

TEST(EnsembleCsv, MalformedInputsThrowIoError) {
  EXPECT_THROW(ensemble_from_csv(""), IoError);
  EXPECT_THROW(ensemble_from_csv("w,theta_0\n1,2\n"), IoError);
  EXPECT_THROW(ensemble_from_csv("weight,theta_0\n"), IoError);
  EXPECT_THROW(ensemble_from_csv("weight,theta_0\n1,2,3\n"), IoError);
  EXPECT_THROW(ensemble_from_csv("weight,theta_0\n1,abc\n"), IoError);
  EXPECT_THROW(read_ensemble_csv("/nonexistent/dir/e.csv"), IoError);
}

TEST(EnsembleCsv, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "isamp_test_io" / "ens.csv";
  Matrix s(1, 2);
  s << 0.25, 0.75;
  const WeightedEnsemble ens = WeightedEnsemble::uniform(s);
  write_ensemble_csv(ens, path);
  EXPECT_EQ(read_ensemble_csv(path).samples(), s);
  std::filesystem::remove_all(path.parent_path());
}

Proposal round_trip(const Proposal& p) { return proposal_from_json(json::parse(proposal_to_json(p).dump())); }

TEST(ProposalJson, GaussianRoundTrip) {
  const GaussianProposal g(v2(1.0 / 3.0, -0.1), spd2());
  const json doc = proposal_to_json(g);
  EXPECT_EQ(doc.at("family"), "gaussian");
  EXPECT_EQ(doc.at("dim"), 2);
  EXPECT_EQ(doc.at("covariance").size(), 4U);
  EXPECT_EQ(doc.at("covariance")[1].get<double>(), 0.1);
  const Proposal back = round_trip(g);
  ASSERT_TRUE(std::holds_alternative<GaussianProposal>(back));
  EXPECT_EQ(std::get<GaussianProposal>(back).mean(), g.mean());
  EXPECT_EQ(std::get<GaussianProposal>(back).covariance(), g.covariance());
}

TEST(ProposalJson, StudentTRoundTrip) {
  const StudentTProposal t(v2(2.0, 3.0), spd2(), 3.0);
  const json doc = proposal_to_json(t);
  EXPECT_EQ(doc.at("family"), "student_t");
  EXPECT_EQ(doc.at("nu"), 3.0);
  const Proposal back = round_trip(t);
  ASSERT_TRUE(std::holds_alternative<StudentTProposal>(back));
  EXPECT_EQ(std::get<StudentTProposal>(back).scale(), t.scale());
  EXPECT_EQ(std::get<StudentTProposal>(back).nu(), 3.0);
  json no_scale = doc;
  no_scale.erase("scale");
  const Proposal from_cov = proposal_from_json(no_scale);
  EXPECT_LT((std::get<StudentTProposal>(from_cov).scale() - t.scale()).norm(), 1e-15);
}

TEST(ProposalJson, MixtureRoundTrip) {
  const GaussianMixtureProposal m({GaussianProposal(v2(0.0, 0.0), spd2()), GaussianProposal(v2(4.0, 1.0), spd2() * 2.0)},
                                  v2(0.3, 0.7));
  const json doc = proposal_to_json(m);
  EXPECT_EQ(doc.at("family"), "gaussian_mixture");
  EXPECT_EQ(doc.at("components").size(), 2U);
  EXPECT_EQ(doc.at("psi").size(), 2U);
  const Proposal back = round_trip(m);
  ASSERT_TRUE(std::holds_alternative<GaussianMixtureProposal>(back));
  const auto& bm = std::get<GaussianMixtureProposal>(back);
  EXPECT_EQ(bm.psi(), m.psi());
  EXPECT_EQ(bm.components()[1].mean(), m.components()[1].mean());
  EXPECT_EQ(bm.components()[1].covariance(), m.components()[1].covariance());
}

TEST(ProposalJson, InvalidDocumentsThrowIoError) {
  EXPECT_THROW(proposal_from_json(json{{"family", "cauchy"}, {"mean", {0.0}}}), IoError);
  EXPECT_THROW(proposal_from_json(json{{"family", "gaussian"}, {"mean", {0.0, 0.0}}, {"covariance", {1.0}}}), IoError);
  EXPECT_THROW(proposal_from_json(json{{"family", "gaussian"}}), IoError);
  EXPECT_THROW(proposal_from_json(json{{"family", "gaussian"}, {"mean", {0.0}}, {"covariance", {-1.0}}}), IoError);
}

TEST(TraceJson, Structure) {
  const auto target = gaussian_target(v2(0.0, 0.0), Matrix::Identity(2, 2));
  IsaConfig c;
  c.samples_per_iteration = 500;
  c.max_iterations = 3;
  c.tol = 0.0;
  const IterationTrace t = isa_run(*target, Proposal(GaussianProposal(v2(0.5, 0.5), 2.0 * Matrix::Identity(2, 2))), c);
  const json doc = trace_to_json(t, c, target->name());
  EXPECT_EQ(doc.at("config").at("target"), "gaussian");
  EXPECT_EQ(doc.at("config").at("N_e"), 500);
  EXPECT_EQ(doc.at("stopped_reason"), "MaxIterations");
  ASSERT_EQ(doc.at("records").size(), 3U);
  for (const auto& key : {"k", "N_e", "r", "n_eff", "failures", "wall_time", "proposal"}) {
    EXPECT_TRUE(doc.at("records")[0].contains(key)) << key;
  }
  EXPECT_EQ(doc.at("records")[2].at("r").get<double>(), t.records[2].r);
  EXPECT_EQ(doc.at("final_proposal"), doc.at("records")[2].at("proposal"));
  EXPECT_FALSE(doc.contains("collapse_reason"));
}

TEST(TraceJson, CollapsedTraceHasReasonAndNullProposal) {
  Toy2dTarget target;
  IsaConfig c;
  c.samples_per_iteration = 100;
  const IterationTrace t = isa_run(target, Proposal(GaussianProposal(v2(50.0, 50.0), Matrix::Identity(2, 2))), c);
  const json doc = trace_to_json(t, c, target.name());
  EXPECT_EQ(doc.at("stopped_reason"), "Collapsed");
  EXPECT_TRUE(doc.at("final_proposal").is_null());
  EXPECT_TRUE(doc.contains("collapse_reason"));
}

TEST(ChainCsv, Layout) {
  Toy2dTarget target;
  StretchMoveSettings s;
  s.walkers = 4;
  s.steps = 3;
  RngStream rng(1, 0);
  const McmcChain chain = stretch_move_run(target, target.prior_sampler(), s, rng);
  const std::string csv = chain_to_csv(chain);
  EXPECT_EQ(csv.rfind("step,walker,log_density,theta_0,theta_1\n1", 0), std::string::npos);
  EXPECT_EQ(csv.rfind("step,walker,log_density,theta_0,theta_1\n0,0,", 0), 0U);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 13);
}

TEST(ModesReport, Structure) {
  ModeSet m;
  m.modes.push_back(Mode{v2(1.0, 2.0), -0.2, Matrix::Identity(2, 2)});
  m.candidates = 10;
  m.converged = 8;
  m.failed = 2;
  const json doc = modes_report(m, 0.95);
  EXPECT_EQ(doc.at("candidates"), 10);
  EXPECT_EQ(doc.at("status_counts").at("Converged"), 8);
  EXPECT_EQ(doc.at("status_counts").at("Failed"), 2);
  EXPECT_EQ(doc.at("status_counts").at("MaxIterations"), 0);
  ASSERT_EQ(doc.at("modes").size(), 1U);
  EXPECT_EQ(doc.at("modes")[0].at("f_min"), -0.2);
  EXPECT_EQ(doc.at("modes")[0].at("minimizer")[1], 2.0);
}

}  // namespace
}  // namespace isamp
