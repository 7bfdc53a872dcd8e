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

#ifndef ISAMP_DIAGNOSTICS_HPP
#define ISAMP_DIAGNOSTICS_HPP

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "isamp/ensemble.hpp"
#include "isamp/types.hpp"

namespace isamp {

/// Integrated autocorrelation time tau = 1 + 2 sum_{t=1}^{T} rho(t), where T
/// is the smallest window with T >= 5 tau(T). Requires >= 100 samples and a
/// non-constant chain (ChainTooShort otherwise).
double iact(const Vector& chain);

/// Same estimator on the walker-averaged normalized autocorrelation of a
/// walkers x steps trace.
double iact_ensemble(const Matrix& series);

/// Normalized autocorrelation rho(0..max_lag) of a single chain.
Vector autocorrelation(const Vector& chain, Eigen::Index max_lag);

struct Histogram1D {
  Vector edges;  // B + 1, strictly increasing
  Vector mass;   // B
  double out_of_range = 0.0;
};

struct Histogram2D {
  Vector x_edges;
  Vector y_edges;
  Matrix mass;  // rows index x bins, columns index y bins
  double out_of_range = 0.0;
};

/// Weighted mean +/- 4 weighted standard deviations of one coordinate.
std::pair<double, double> default_histogram_range(const WeightedEnsemble& ensemble, Eigen::Index coordinate);

Histogram1D weighted_histogram_1d(const WeightedEnsemble& ensemble, Eigen::Index coordinate, Eigen::Index bins,
                                  std::pair<double, double> range);

Histogram2D weighted_histogram_2d(const WeightedEnsemble& ensemble, Eigen::Index x_coordinate,
                                  Eigen::Index y_coordinate, Eigen::Index bins, std::pair<double, double> x_range,
                                  std::pair<double, double> y_range);

/// Writes hist1d_<i>.csv for every coordinate, hist2d_<i>_<j>.csv for every
/// pair i > j (x = coordinate j, y = coordinate i) and triangle.svg. Returns
/// the written paths in that order. Throws IoError.
std::vector<std::filesystem::path> triangle_export(const WeightedEnsemble& ensemble, Eigen::Index bins,
                                                   const std::filesystem::path& out_dir);

}  // namespace isamp

#endif  // ISAMP_DIAGNOSTICS_HPP
