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

#ifndef ISAMP_PARALLEL_HPP
#define ISAMP_PARALLEL_HPP

#include <cstddef>
#include <functional>
#include <vector>

#include "isamp/targets.hpp"
#include "isamp/types.hpp"

namespace isamp {

/// Calls body(i) for i in [0, count) on up to `workers` threads using
/// contiguous index blocks. body must only write to slot i of its output.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body);

struct DensityBatch {
  std::vector<LogDensity> values;  // in input order
  std::size_t failures = 0;
};

/// Evaluates the target at every column of `thetas`. Output is identical for
/// any worker count. Non-finite values returned by a target count as failures.
DensityBatch parallel_map_density(const TargetDensity& target, const SampleMatrix& thetas, int workers);

/// Workers from ISA_WORKERS if set and valid, otherwise `fallback`.
int workers_from_environment(int fallback);

}  // namespace isamp

#endif  // ISAMP_PARALLEL_HPP
