/* Copyright 2026 The ABPN Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Host-CPU latency harness for the meta-node vocabulary.

#ifndef ABPN_BENCH_H_
#define ABPN_BENCH_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "abpn/tensor.h"

namespace abpn {

inline constexpr int kMinRepetitions = 10;
inline constexpr int kMinWarmup = 3;

struct BenchSpec {
  std::string group;
  std::string name;
  std::vector<Shape> inputs;
  int repetitions = kMinRepetitions;
  int warmup = kMinWarmup;
  // Computes the node on pre-generated inputs; the result is assigned to
  // `out` (the output buffer is produced inside the timed region).
  std::function<void(std::span<const Tensor>, Tensor& out)> op;

  void validate() const;
};

struct BenchResult {
  std::string group;
  std::string name;
  std::string shape;  // input shapes as printed
  std::string output_shape;
  double median_ms = 0.0;
  double mean_ms = 0.0;
  double cv = 0.0;  // stddev / mean over the timed repetitions
  double checksum = 0.0;
  int repetitions = 0;
};

struct BenchReport {
  std::vector<BenchResult> rows;
};

// Group order of the rendered table.
inline constexpr const char* kBenchGroups[] = {
    "Tensor operator nodes", "Convolution nodes", "Activation nodes",
    "Resize nodes"};

// Twelve meta-nodes at 1080p placements: feature-space nodes at
// (1, 1080, 1920, 28), image-space add/multiply at C = 3, resize nodes on the
// (1, 1080/s, 1920/s, 3) input upscaled by s.
std::vector<BenchSpec> default_suite(int scale = 3, int repetitions = kMinRepetitions,
                                     int warmup = kMinWarmup);

// A spec whose op does nothing; its timing measures the harness overhead.
BenchSpec noop_spec(int repetitions = kMinRepetitions);

// Deterministic pseudo-random inputs from `seed`.
BenchReport run(std::span<const BenchSpec> suite, std::uint64_t seed = 0,
                const std::function<void(const BenchResult&)>& on_row = {});

std::string render(const BenchReport& report);
std::string render_csv(const BenchReport& report);

}  // namespace abpn

#endif  // ABPN_BENCH_H_
