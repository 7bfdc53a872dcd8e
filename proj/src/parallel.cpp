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

#include "isamp/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

namespace isamp {

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body) {
  if (workers < 1) {
    throw DomainError("parallel_for: workers must be >= 1");
  }
  const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      body(i);
    }
    return;
  }

  std::exception_ptr first_error;
  std::mutex error_mutex;
  const std::size_t block = (count + threads - 1) / threads;
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      const std::size_t begin = t * block;
      const std::size_t end = std::min(count, begin + block);
      pool.emplace_back([&, begin, end] {
        try {
          for (std::size_t i = begin; i < end; ++i) {
            body(i);
          }
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) {
            first_error = std::current_exception();
          }
        }
      });
    }
  }
  if (first_error) {
    std::rethrow_exception(first_error);
  }
}

DensityBatch parallel_map_density(const TargetDensity& target, const SampleMatrix& thetas, int workers) {
  DensityBatch batch;
  const auto count = static_cast<std::size_t>(thetas.cols());
  batch.values.resize(count);
  parallel_for(count, workers, [&](std::size_t i) {
    LogDensity value = target.log_density(thetas.col(static_cast<Eigen::Index>(i)));
    if (value && !std::isfinite(*value)) {
      value = Failure;
    }
    batch.values[i] = value;
  });
  batch.failures = static_cast<std::size_t>(
      std::count_if(batch.values.begin(), batch.values.end(), [](const LogDensity& v) { return !v.has_value(); }));
  return batch;
}

int workers_from_environment(int fallback) {
  const char* raw = std::getenv("ISA_WORKERS");
  if (raw == nullptr) {
    return fallback;
  }
  try {
    std::size_t used = 0;
    const int value = std::stoi(raw, &used);
    if (used == std::string(raw).size() && value >= 1) {
      return value;
    }
  } catch (const std::exception&) {
  }
  return fallback;
}

}  // namespace isamp
