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

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>

#include "isamp/rng.hpp"
#include "isamp/parallel.hpp"

namespace isamp {
namespace {

class NanBelowZero final : public TargetDensity {
 public:
  [[nodiscard]] LogDensity log_density(const Vector& theta) const override {
    if (theta(0) < 0.0) return std::numeric_limits<double>::quiet_NaN();
    return -theta.squaredNorm();
  }
  [[nodiscard]] Eigen::Index dimension() const override { return 1; }
  [[nodiscard]] PriorSampler prior_sampler() const override {
    return [](RngStream& rng) { return Vector::Constant(1, rng.normal()); };
  }
  [[nodiscard]] std::string name() const override { return "nan"; }
};

SampleMatrix toy_points(Eigen::Index count, std::uint64_t seed) {
  RngStream rng(seed, 0);
  SampleMatrix x(2, count);
  for (Eigen::Index i = 0; i < count; ++i) {
    x(0, i) = -1.0 + 13.0 * rng.uniform();
    x(1, i) = -1.0 + 13.0 * rng.uniform();
  }
  return x;
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
  for (int workers : {1, 2, 7, 64}) {
    std::vector<std::atomic<int>> hits(1001);
    parallel_for(hits.size(), workers, [&](std::size_t i) { hits[i].fetch_add(1); });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1) << workers;
  }
  int calls = 0;
  parallel_for(0, 4, [&](std::size_t) { ++calls; });
  EXPECT_EQ(calls, 0);
}

TEST(ParallelMapDensity, IdenticalAcrossWorkerCounts) {
  const Toy2dTarget target;
  const SampleMatrix x = toy_points(10000, 5);
  const DensityBatch one = parallel_map_density(target, x, 1);
  for (int workers : {2, 3, 8}) {
    const DensityBatch many = parallel_map_density(target, x, workers);
    EXPECT_EQ(many.failures, one.failures);
    ASSERT_EQ(many.values.size(), one.values.size());
    for (std::size_t i = 0; i < one.values.size(); ++i) {
      ASSERT_EQ(many.values[i].has_value(), one.values[i].has_value()) << i;
      if (one.values[i]) {
        ASSERT_EQ(std::memcmp(&*many.values[i], &*one.values[i], sizeof(double)), 0) << i;
      }
    }
  }
}

TEST(ParallelMapDensity, FailuresSitAtOutOfCubeColumns) {
  const Toy2dTarget target;
  const SampleMatrix x = toy_points(5000, 9);
  const DensityBatch batch = parallel_map_density(target, x, 4);
  std::size_t outside = 0;
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    const bool in = x(0, i) >= kToyLower && x(0, i) <= kToyUpper && x(1, i) >= kToyLower && x(1, i) <= kToyUpper;
    outside += in ? 0 : 1;
    EXPECT_EQ(batch.values[static_cast<std::size_t>(i)].has_value(), in) << i;
    if (in) EXPECT_DOUBLE_EQ(*batch.values[static_cast<std::size_t>(i)], -toy2d_objective(x.col(i)));
  }
  EXPECT_GT(outside, 0U);
  EXPECT_EQ(batch.failures, outside);
}

TEST(ParallelMapDensity, EmptyInput) {
  const Toy2dTarget target;
  const DensityBatch batch = parallel_map_density(target, SampleMatrix(2, 0), 4);
  EXPECT_TRUE(batch.values.empty());
  EXPECT_EQ(batch.failures, 0U);
}

TEST(ParallelMapDensity, NonFiniteValuesAreFailures) {
  const NanBelowZero target;
  SampleMatrix x(1, 4);
  x << -1.0, 0.5, -2.0, 1.0;
  const DensityBatch batch = parallel_map_density(target, x, 2);
  EXPECT_EQ(batch.failures, 2U);
  EXPECT_FALSE(batch.values[0]);
  EXPECT_DOUBLE_EQ(*batch.values[1], -0.25);
  EXPECT_FALSE(batch.values[2]);
  EXPECT_DOUBLE_EQ(*batch.values[3], -1.0);
}

TEST(WorkersFromEnvironment, ParsesValidValuesOnly) {
  ::unsetenv("ISA_WORKERS");
  EXPECT_EQ(workers_from_environment(3), 3);
  ::setenv("ISA_WORKERS", "5", 1);
  EXPECT_EQ(workers_from_environment(3), 5);
  for (const char* bad : {"0", "-2", "4x", "", "abc"}) {
    ::setenv("ISA_WORKERS", bad, 1);
    EXPECT_EQ(workers_from_environment(3), 3) << bad;
  }
  ::unsetenv("ISA_WORKERS");
}

}  // namespace
}  // namespace isamp
