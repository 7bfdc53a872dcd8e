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

#include "isamp/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "isamp/io.hpp"
#include "isamp/numeric.hpp"

namespace isamp {

namespace {

constexpr Eigen::Index kMinChainLength = 100;
constexpr double kWindowFactor = 5.0;

Vector centered(const Vector& chain) {
  CompensatedSum<double> sum;
  for (Eigen::Index i = 0; i < chain.size(); ++i) {
    sum.add(chain(i));
  }
  return chain.array() - sum.value() / static_cast<double>(chain.size());
}

double autocovariance(const Vector& d, Eigen::Index lag) {
  const Eigen::Index n = d.size();
  CompensatedSum<double> acc;
  for (Eigen::Index i = 0; i + lag < n; ++i) {
    acc.add(d(i) * d(i + lag));
  }
  return acc.value() / static_cast<double>(n);
}

/// Grows the window one lag at a time until T >= c * tau(T).
template <typename Rho>
double windowed_tau(Rho&& rho_at, Eigen::Index length) {
  double tau = 1.0;
  for (Eigen::Index t = 1; t < length; ++t) {
    tau += 2.0 * rho_at(t);
    if (static_cast<double>(t) >= kWindowFactor * tau) {
      return tau;
    }
  }
  return tau;
}

void check_chain(Eigen::Index length) {
  if (length < kMinChainLength) {
    throw ChainTooShort("iact: need at least " + std::to_string(kMinChainLength) + " samples, got " +
                        std::to_string(length));
  }
}

}  // namespace

Vector autocorrelation(const Vector& chain, Eigen::Index max_lag) {
  const Vector d = centered(chain);
  const double c0 = autocovariance(d, 0);
  if (!(c0 > 0.0)) {
    throw ChainTooShort("autocorrelation: chain is constant");
  }
  const Eigen::Index lags = std::min(max_lag, chain.size() - 1);
  Vector rho(lags + 1);
  for (Eigen::Index t = 0; t <= lags; ++t) {
    rho(t) = autocovariance(d, t) / c0;
  }
  return rho;
}

double iact(const Vector& chain) {
  check_chain(chain.size());
  const Vector d = centered(chain);
  const double c0 = autocovariance(d, 0);
  if (!(c0 > 0.0)) {
    throw ChainTooShort("iact: chain is constant");
  }
  return windowed_tau([&](Eigen::Index t) { return autocovariance(d, t) / c0; }, chain.size());
}

double iact_ensemble(const Matrix& series) {
  if (series.rows() < 1) {
    throw ChainTooShort("iact_ensemble: no walkers");
  }
  check_chain(series.cols());
  std::vector<Vector> walkers;
  std::vector<double> c0;
  for (Eigen::Index w = 0; w < series.rows(); ++w) {
    Vector d = centered(series.row(w).transpose());
    const double v = autocovariance(d, 0);
    if (v > 0.0) {
      walkers.push_back(std::move(d));
      c0.push_back(v);
    }
  }
  if (walkers.empty()) {
    throw ChainTooShort("iact_ensemble: every walker is constant");
  }
  const auto count = static_cast<double>(walkers.size());
  return windowed_tau(
      [&](Eigen::Index t) {
        double sum = 0.0;
        for (std::size_t w = 0; w < walkers.size(); ++w) {
          sum += autocovariance(walkers[w], t) / c0[w];
        }
        return sum / count;
      },
      series.cols());
}

std::pair<double, double> default_histogram_range(const WeightedEnsemble& ensemble, Eigen::Index coordinate) {
  const Vector mu = weighted_mean(ensemble);
  const Matrix scatter = weighted_scatter(ensemble);
  const double sd = std::sqrt(std::max(0.0, scatter(coordinate, coordinate)));
  const double half = sd > 0.0 ? 4.0 * sd : 0.5;
  return {mu(coordinate) - half, mu(coordinate) + half};
}

namespace {

Vector uniform_edges(std::pair<double, double> range, Eigen::Index bins) {
  if (bins < 1) {
    throw DomainError("histogram: bins must be >= 1");
  }
  if (!(range.second > range.first) || !std::isfinite(range.first) || !std::isfinite(range.second)) {
    throw DomainError("histogram: range must be finite and increasing");
  }
  Vector edges(bins + 1);
  const double width = (range.second - range.first) / static_cast<double>(bins);
  for (Eigen::Index b = 0; b <= bins; ++b) {
    edges(b) = range.first + width * static_cast<double>(b);
  }
  edges(bins) = range.second;
  return edges;
}

/// Bin index of x, or -1 when outside [lo, hi]; x == hi goes to the last bin.
Eigen::Index bin_of(double x, const Vector& edges) {
  const Eigen::Index bins = edges.size() - 1;
  if (!(x >= edges(0) && x <= edges(bins))) {
    return -1;
  }
  const double width = (edges(bins) - edges(0)) / static_cast<double>(bins);
  auto b = static_cast<Eigen::Index>((x - edges(0)) / width);
  b = std::clamp<Eigen::Index>(b, 0, bins - 1);
  // Floating-point division can land one bin off near an edge.
  while (b > 0 && x < edges(b)) {
    --b;
  }
  while (b < bins - 1 && x >= edges(b + 1)) {
    ++b;
  }
  return b;
}

void check_coordinate(const WeightedEnsemble& ensemble, Eigen::Index c) {
  if (c < 0 || c >= ensemble.dimension()) {
    throw DomainError("histogram: coordinate index out of range");
  }
}

}  // namespace

Histogram1D weighted_histogram_1d(const WeightedEnsemble& ensemble, Eigen::Index coordinate, Eigen::Index bins,
                                  std::pair<double, double> range) {
  check_coordinate(ensemble, coordinate);
  Histogram1D h;
  h.edges = uniform_edges(range, bins);
  std::vector<CompensatedSum<double>> mass(static_cast<std::size_t>(bins));
  CompensatedSum<double> outside;
  const auto& w = ensemble.weights();
  for (Eigen::Index i = 0; i < ensemble.size(); ++i) {
    const Eigen::Index b = bin_of(ensemble.samples()(coordinate, i), h.edges);
    if (b < 0) {
      outside.add(w(i));
    } else {
      mass[static_cast<std::size_t>(b)].add(w(i));
    }
  }
  h.mass.resize(bins);
  for (Eigen::Index b = 0; b < bins; ++b) {
    h.mass(b) = mass[static_cast<std::size_t>(b)].value();
  }
  h.out_of_range = outside.value();
  return h;
}

Histogram2D weighted_histogram_2d(const WeightedEnsemble& ensemble, Eigen::Index x_coordinate,
                                  Eigen::Index y_coordinate, Eigen::Index bins, std::pair<double, double> x_range,
                                  std::pair<double, double> y_range) {
  check_coordinate(ensemble, x_coordinate);
  check_coordinate(ensemble, y_coordinate);
  Histogram2D h;
  h.x_edges = uniform_edges(x_range, bins);
  h.y_edges = uniform_edges(y_range, bins);
  std::vector<CompensatedSum<double>> mass(static_cast<std::size_t>(bins * bins));
  CompensatedSum<double> outside;
  const auto& w = ensemble.weights();
  for (Eigen::Index i = 0; i < ensemble.size(); ++i) {
    const Eigen::Index bx = bin_of(ensemble.samples()(x_coordinate, i), h.x_edges);
    const Eigen::Index by = bin_of(ensemble.samples()(y_coordinate, i), h.y_edges);
    if (bx < 0 || by < 0) {
      outside.add(w(i));
    } else {
      mass[static_cast<std::size_t>(bx * bins + by)].add(w(i));
    }
  }
  h.mass.resize(bins, bins);
  for (Eigen::Index bx = 0; bx < bins; ++bx) {
    for (Eigen::Index by = 0; by < bins; ++by) {
      h.mass(bx, by) = mass[static_cast<std::size_t>(bx * bins + by)].value();
    }
  }
  h.out_of_range = outside.value();
  return h;
}

namespace {

std::string histogram_1d_csv(const Histogram1D& h) {
  std::ostringstream os;
  os << "bin_left,bin_right,mass\n";
  for (Eigen::Index b = 0; b < h.mass.size(); ++b) {
    os << format_real(h.edges(b)) << ',' << format_real(h.edges(b + 1)) << ',' << format_real(h.mass(b)) << '\n';
  }
  return os.str();
}

std::string histogram_2d_csv(const Histogram2D& h) {
  std::ostringstream os;
  os << "x_left,x_right,y_left,y_right,mass\n";
  for (Eigen::Index bx = 0; bx < h.mass.rows(); ++bx) {
    for (Eigen::Index by = 0; by < h.mass.cols(); ++by) {
      os << format_real(h.x_edges(bx)) << ',' << format_real(h.x_edges(bx + 1)) << ','
         << format_real(h.y_edges(by)) << ',' << format_real(h.y_edges(by + 1)) << ',' << format_real(h.mass(bx, by))
         << '\n';
    }
  }
  return os.str();
}

constexpr double kCell = 160.0;
constexpr double kPad = 10.0;

std::string triangle_svg(const std::vector<Histogram1D>& marginals,
                         const std::vector<std::pair<std::pair<Eigen::Index, Eigen::Index>, Histogram2D>>& pairs) {
  const auto n = static_cast<double>(marginals.size());
  const double size = n * kCell;
  std::ostringstream os;
  os << std::fixed << std::setprecision(3);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\" viewBox=\"0 0 "
     << size << ' ' << size << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << size << "\" height=\"" << size << "\" fill=\"white\"/>\n";
  const double inner = kCell - 2.0 * kPad;

  for (std::size_t i = 0; i < marginals.size(); ++i) {
    const Histogram1D& h = marginals[i];
    const double x0 = static_cast<double>(i) * kCell + kPad;
    const double y0 = static_cast<double>(i) * kCell + kPad;
    os << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << inner << "\" height=\"" << inner
       << "\" fill=\"none\" stroke=\"black\" stroke-width=\"0.5\"/>\n";
    const double peak = h.mass.size() > 0 ? h.mass.maxCoeff() : 0.0;
    if (!(peak > 0.0)) {
      continue;
    }
    const double bar = inner / static_cast<double>(h.mass.size());
    for (Eigen::Index b = 0; b < h.mass.size(); ++b) {
      const double height = inner * h.mass(b) / peak;
      if (height < 5e-4) {
        continue;
      }
      os << "<rect x=\"" << x0 + bar * static_cast<double>(b) << "\" y=\"" << y0 + inner - height << "\" width=\""
         << bar << "\" height=\"" << height << "\" fill=\"#555555\"/>\n";
    }
  }

  for (const auto& [ij, h] : pairs) {
    const auto [row, col] = ij;  // row = y coordinate, col = x coordinate
    const double x0 = static_cast<double>(col) * kCell + kPad;
    const double y0 = static_cast<double>(row) * kCell + kPad;
    os << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << inner << "\" height=\"" << inner
       << "\" fill=\"none\" stroke=\"black\" stroke-width=\"0.5\"/>\n";
    const double peak = h.mass.size() > 0 ? h.mass.maxCoeff() : 0.0;
    if (!(peak > 0.0)) {
      continue;
    }
    const double cw = inner / static_cast<double>(h.mass.rows());
    const double ch = inner / static_cast<double>(h.mass.cols());
    for (Eigen::Index bx = 0; bx < h.mass.rows(); ++bx) {
      for (Eigen::Index by = 0; by < h.mass.cols(); ++by) {
        if (h.mass(bx, by) <= 0.0) {
          continue;
        }
        const int level = static_cast<int>(std::lround(255.0 * (1.0 - h.mass(bx, by) / peak)));
        os << "<rect x=\"" << x0 + cw * static_cast<double>(bx) << "\" y=\""
           << y0 + inner - ch * static_cast<double>(by + 1) << "\" width=\"" << cw << "\" height=\"" << ch
           << "\" fill=\"rgb(" << level << ',' << level << ',' << level << ")\"/>\n";
      }
    }
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace

std::vector<std::filesystem::path> triangle_export(const WeightedEnsemble& ensemble, Eigen::Index bins,
                                                   const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  }
  const Eigen::Index n = ensemble.dimension();
  std::vector<std::pair<double, double>> ranges;
  std::vector<Histogram1D> marginals;
  std::vector<std::filesystem::path> written;
  for (Eigen::Index i = 0; i < n; ++i) {
    ranges.push_back(default_histogram_range(ensemble, i));
    marginals.push_back(weighted_histogram_1d(ensemble, i, bins, ranges.back()));
    const auto path = out_dir / ("hist1d_" + std::to_string(i) + ".csv");
    write_text(path, histogram_1d_csv(marginals.back()));
    written.push_back(path);
  }
  std::vector<std::pair<std::pair<Eigen::Index, Eigen::Index>, Histogram2D>> pairs;
  for (Eigen::Index i = 1; i < n; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      Histogram2D h = weighted_histogram_2d(ensemble, j, i, bins, ranges[static_cast<std::size_t>(j)],
                                            ranges[static_cast<std::size_t>(i)]);
      const auto path = out_dir / ("hist2d_" + std::to_string(i) + "_" + std::to_string(j) + ".csv");
      write_text(path, histogram_2d_csv(h));
      written.push_back(path);
      pairs.emplace_back(std::make_pair(i, j), std::move(h));
    }
  }
  const auto svg = out_dir / "triangle.svg";
  write_text(svg, triangle_svg(marginals, pairs));
  written.push_back(svg);
  return written;
}

}  // namespace isamp
