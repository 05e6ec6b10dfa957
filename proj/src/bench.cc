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

#include "abpn/bench.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>

#include "abpn/ops.h"

namespace abpn {
namespace {

constexpr std::int64_t kFrameH = 1080;
constexpr std::int64_t kFrameW = 1920;
constexpr std::int64_t kFeatures = 28;

Tensor random_tensor(const Shape& s, std::mt19937_64& rng) {
  std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
  std::vector<float> v(s.size());
  for (auto& x : v) x = dist(rng);
  return Tensor(s, std::move(v));
}

ConvWeights<float> random_conv(int k, int cin, int cout, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> dist(0.0f, 0.1f);
  ConvWeights<float> w(k, cin, cout);
  for (auto& v : w.kernel) v = dist(rng);
  for (auto& v : w.bias) v = dist(rng);
  return w;
}

std::string shapes_string(std::span<const Shape> shapes) {
  std::string out;
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    if (i) out += " + ";
    out += shapes[i].to_string();
  }
  return out;
}

BenchSpec make(std::string group, std::string name, std::vector<Shape> inputs,
               int reps, int warmup,
               std::function<void(std::span<const Tensor>, Tensor&)> op) {
  BenchSpec s;
  s.group = std::move(group);
  s.name = std::move(name);
  s.inputs = std::move(inputs);
  s.repetitions = reps;
  s.warmup = warmup;
  s.op = std::move(op);
  return s;
}

}  // namespace

void BenchSpec::validate() const {
  check(repetitions >= kMinRepetitions, ErrorKind::kInvalidArgument,
        "bench repetitions must be >= " + std::to_string(kMinRepetitions));
  check(warmup >= kMinWarmup, ErrorKind::kInvalidArgument,
        "bench warmup must be >= " + std::to_string(kMinWarmup));
  check(bool(op), ErrorKind::kInvalidArgument, "bench spec " + name + " has no op");
}

std::vector<BenchSpec> default_suite(int scale, int reps, int warmup) {
  check(scale >= 1 && kFrameH % scale == 0 && kFrameW % scale == 0,
        ErrorKind::kInvalidArgument, "bench scale must divide 1080 and 1920");
  const Shape feat(1, kFrameH, kFrameW, kFeatures);
  const Shape half(1, kFrameH, kFrameW, kFeatures / 2);
  const Shape image(1, kFrameH, kFrameW, 3);
  const Shape lr(1, kFrameH / scale, kFrameW / scale, 3);
  const char* tensor_g = kBenchGroups[0];
  const char* conv_g = kBenchGroups[1];
  const char* act_g = kBenchGroups[2];
  const char* resize_g = kBenchGroups[3];

  auto conv3 = std::make_shared<ConvWeights<float>>(
      random_conv(3, kFeatures, kFeatures, 3));
  auto conv1 = std::make_shared<ConvWeights<float>>(
      random_conv(1, kFeatures, kFeatures, 1));

  std::vector<BenchSpec> suite;
  suite.push_back(make(tensor_g, "Channel split", {feat}, reps, warmup,
                       [](std::span<const Tensor> in, Tensor& out) {
                         const std::int64_t sizes[] = {kFeatures / 2, kFeatures / 2};
                         auto parts = channel_split(in[0], sizes);
                         out = std::move(parts[1]);
                       }));
  suite.push_back(make(tensor_g, "Channel concat", {half, half}, reps, warmup,
                       [](std::span<const Tensor> in, Tensor& out) {
                         out = channel_concat(in);
                       }));
  suite.push_back(make(tensor_g, "Add two tensors", {image, image}, reps, warmup,
                       [](std::span<const Tensor> in, Tensor& out) {
                         out = add(in[0], in[1]);
                       }));
  suite.push_back(make(tensor_g, "Multiply two tensors", {image, image}, reps,
                       warmup, [](std::span<const Tensor> in, Tensor& out) {
                         out = multiply(in[0], in[1]);
                       }));
  suite.push_back(make(tensor_g, "Global max pooling", {feat}, reps, warmup,
                       [](std::span<const Tensor> in, Tensor& out) {
                         out = global_max_pool(in[0]);
                       }));
  suite.push_back(make(tensor_g, "Global average pooling", {feat}, reps, warmup,
                       [](std::span<const Tensor> in, Tensor& out) {
                         out = global_avg_pool(in[0]);
                       }));
  suite.push_back(make(conv_g, "3x3 Convolution", {feat}, reps, warmup,
                       [conv3](std::span<const Tensor> in, Tensor& out) {
                         out = conv2d(in[0], *conv3);
                       }));
  suite.push_back(make(conv_g, "1x1 Convolution", {feat}, reps, warmup,
                       [conv1](std::span<const Tensor> in, Tensor& out) {
                         out = conv2d(in[0], *conv1);
                       }));
  suite.push_back(make(act_g, "ReLU", {feat}, reps, warmup,
                       [](std::span<const Tensor> in, Tensor& out) {
                         out = relu(in[0]);
                       }));
  suite.push_back(make(act_g, "Leaky ReLU", {feat}, reps, warmup,
                       [](std::span<const Tensor> in, Tensor& out) {
                         out = leaky_relu(in[0]);
                       }));
  suite.push_back(make(resize_g, "Nearest neighbor", {lr}, reps, warmup,
                       [scale](std::span<const Tensor> in, Tensor& out) {
                         out = nearest_resize(in[0], scale);
                       }));
  suite.push_back(make(resize_g, "Bilinear", {lr}, reps, warmup,
                       [scale](std::span<const Tensor> in, Tensor& out) {
                         out = bilinear_resize(in[0], scale);
                       }));
  return suite;
}

BenchSpec noop_spec(int reps) {
  return make("Harness", "No-op", {Shape(1, 1, 1, 1)}, reps, kMinWarmup,
              [](std::span<const Tensor>, Tensor&) {});
}

BenchReport run(std::span<const BenchSpec> suite, std::uint64_t seed,
                const std::function<void(const BenchResult&)>& on_row) {
  using Clock = std::chrono::steady_clock;
  BenchReport report;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    const BenchSpec& spec = suite[i];
    spec.validate();
    std::mt19937_64 rng(seed + i);
    std::vector<Tensor> inputs;
    for (const Shape& s : spec.inputs) inputs.push_back(random_tensor(s, rng));
    Tensor out;
    for (int w = 0; w < spec.warmup; ++w) spec.op(inputs, out);
    std::vector<double> ms;
    ms.reserve(spec.repetitions);
    for (int r = 0; r < spec.repetitions; ++r) {
      const auto t0 = Clock::now();
      spec.op(inputs, out);
      const auto t1 = Clock::now();
      ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    BenchResult row;
    row.group = spec.group;
    row.name = spec.name;
    row.shape = shapes_string(spec.inputs);
    row.output_shape = out.shape().to_string();
    row.repetitions = spec.repetitions;
    row.checksum = std::accumulate(out.data().begin(), out.data().end(), 0.0);
    std::vector<double> sorted = ms;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    row.median_ms = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    row.mean_ms = std::accumulate(ms.begin(), ms.end(), 0.0) / double(n);
    double var = 0.0;
    for (double v : ms) var += (v - row.mean_ms) * (v - row.mean_ms);
    var /= double(n > 1 ? n - 1 : 1);
    row.cv = row.mean_ms > 0.0 ? std::sqrt(var) / row.mean_ms : 0.0;
    if (on_row) on_row(row);
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string render(const BenchReport& report) {
  std::ostringstream os;
  os << "Host CPU timings: methodology reproduction — not Table 1's NPU values\n";
  os << std::left << std::setw(24) << "Main type" << std::setw(26) << "Meta-node"
     << std::right << std::setw(12) << "Median ms" << std::setw(12) << "Mean ms"
     << std::setw(8) << "CV" << "  Input shape\n";
  std::vector<std::string> groups(std::begin(kBenchGroups), std::end(kBenchGroups));
  for (const auto& r : report.rows) {
    if (std::find(groups.begin(), groups.end(), r.group) == groups.end()) {
      groups.push_back(r.group);
    }
  }
  os << std::fixed;
  for (const std::string& g : groups) {
    bool first = true;
    for (const auto& r : report.rows) {
      if (r.group != g) continue;
      os << std::left << std::setw(24) << (first ? g : "") << std::setw(26)
         << r.name << std::right << std::setprecision(1) << std::setw(12)
         << r.median_ms << std::setw(12) << r.mean_ms << std::setprecision(3)
         << std::setw(8) << r.cv << "  " << r.shape << "\n";
      first = false;
    }
  }
  return os.str();
}

std::string render_csv(const BenchReport& report) {
  std::ostringstream os;
  os << "group,node,median_ms,mean_ms,cv,input_shape,output_shape,checksum\n";
  os << std::setprecision(17);
  for (const auto& r : report.rows) {
    os << r.group << ',' << r.name << ',' << r.median_ms << ',' << r.mean_ms
       << ',' << r.cv << ",\"" << r.shape << "\",\"" << r.output_shape << "\","
       << r.checksum << "\n";
  }
  return os.str();
}

}  // namespace abpn
