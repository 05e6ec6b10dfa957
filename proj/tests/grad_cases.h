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

// Finite-difference cases for every differentiable op and the end-to-end
// graph, shared by the unit tests and the acceptance binary.

#ifndef ABPN_TESTS_GRAD_CASES_H_
#define ABPN_TESTS_GRAD_CASES_H_

#include <random>
#include <string>
#include <vector>

#include "abpn/exec.h"
#include "abpn/model.h"
#include "test_util.h"

namespace abpn::testing {

struct GradCase {
  std::string name;
  GraphFn fn;
  std::vector<TensorD> inputs;
  std::vector<ConvWeights<double>> params;
};

inline std::vector<GradCase> op_grad_cases(std::uint64_t seed) {
  using Tape = GradTape<double>;
  using Vars = std::span<const Tape::Var>;
  using Ids = std::span<const Tape::ParamId>;
  std::mt19937_64 rng(seed);
  auto rt = [&](const Shape& s, double lo = -1.0, double hi = 1.0) {
    return random_tensor<double>(s, rng, lo, hi);
  };
  const Shape s4(1, 4, 4, 2);
  std::vector<GradCase> cases;
  cases.push_back({"conv3x3",
                   [](Tape& t, Vars v, Ids p) { return t.conv2d(v[0], p[0]); },
                   {rt(Shape(1, 4, 4, 3))},
                   {random_conv<double>(3, 3, 2, rng)}});
  cases.push_back({"conv1x1",
                   [](Tape& t, Vars v, Ids p) { return t.conv2d(v[0], p[0]); },
                   {rt(Shape(2, 4, 4, 3))},
                   {random_conv<double>(1, 3, 4, rng)}});
  cases.push_back({"relu", [](Tape& t, Vars v, Ids) { return t.relu(v[0]); }, {rt(s4)}, {}});
  cases.push_back({"leaky_relu",
                   [](Tape& t, Vars v, Ids) { return t.leaky_relu(v[0], 0.1); },
                   {rt(s4)},
                   {}});
  cases.push_back({"add", [](Tape& t, Vars v, Ids) { return t.add(v[0], v[1]); },
                   {rt(s4), rt(s4)}, {}});
  cases.push_back({"multiply",
                   [](Tape& t, Vars v, Ids) { return t.multiply(v[0], v[1]); },
                   {rt(s4), rt(s4)},
                   {}});
  cases.push_back({"channel_concat",
                   [](Tape& t, Vars v, Ids) {
                     const Tape::Var parts[] = {v[0], v[1], v[2]};
                     return t.channel_concat(parts);
                   },
                   {rt(Shape(1, 4, 4, 1)), rt(Shape(1, 4, 4, 3)), rt(Shape(1, 4, 4, 2))},
                   {}});
  cases.push_back({"channel_split",
                   [](Tape& t, Vars v, Ids) {
                     const std::int64_t sizes[] = {2, 3};
                     const auto parts = t.channel_split(v[0], sizes);
                     const Tape::Var swapped[] = {parts[1], parts[0]};
                     return t.channel_concat(swapped);
                   },
                   {rt(Shape(1, 4, 4, 5))},
                   {}});
  cases.push_back({"global_max_pool",
                   [](Tape& t, Vars v, Ids) { return t.global_max_pool(v[0]); },
                   {rt(s4)},
                   {}});
  cases.push_back({"global_avg_pool",
                   [](Tape& t, Vars v, Ids) { return t.global_avg_pool(v[0]); },
                   {rt(s4)},
                   {}});
  cases.push_back({"pixel_shuffle",
                   [](Tape& t, Vars v, Ids) { return t.pixel_shuffle(v[0], 2); },
                   {rt(Shape(1, 4, 4, 8))},
                   {}});
  cases.push_back({"anchor_concat",
                   [](Tape& t, Vars v, Ids) { return t.anchor_concat(v[0], 3); },
                   {rt(Shape(1, 4, 4, 3))},
                   {}});
  cases.push_back({"nearest_resize",
                   [](Tape& t, Vars v, Ids) { return t.nearest_resize(v[0], 3); },
                   {rt(s4)},
                   {}});
  cases.push_back({"bilinear_resize",
                   [](Tape& t, Vars v, Ids) { return t.bilinear_resize(v[0], 3); },
                   {rt(s4)},
                   {}});
  cases.push_back({"clip_0_255",
                   [](Tape& t, Vars v, Ids) { return t.clip_0_255(v[0]); },
                   {rt(s4, -100.0, 350.0)},
                   {}});
  return cases;
}

// ABPN with the given wiring on a random byte-valued input; every layer is
// a parameter.
inline GradCase graph_grad_case(const Hyper& h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  GradCase c;
  c.name = "abpn_" + std::string(variant_name(h.variant));
  // Inputs kept away from 0 and 255 and weights small so that the output
  // clip is inactive almost everywhere.
  c.inputs.push_back(random_tensor<double>(Shape(1, 4, 4, 3), rng, 40.0, 215.0));
  const ModelGraph g = build(h, seed);
  for (const auto& l : g.layers) {
    ConvWeights<double> w = l.cast<double>();
    for (auto& v : w.kernel) v *= 0.05;
    std::normal_distribution<double> bd(0.0, 0.5);
    for (auto& b : w.bias) b = bd(rng);
    c.params.push_back(std::move(w));
  }
  c.fn = [h, layers = c.params](GradTape<double>& t,
                                std::span<const GradTape<double>::Var> v,
                                std::span<const GradTape<double>::ParamId> p) {
    TapeExec<double> ex(t, layers, {p.begin(), p.end()});
    return run_graph(h, ex, v[0]);
  };
  return c;
}

inline GradCheck run_case(const GradCase& c, std::uint64_t seed = 99) {
  return check_gradients(c.fn, c.inputs, c.params, seed);
}

}  // namespace abpn::testing

#endif  // ABPN_TESTS_GRAD_CASES_H_
