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

#ifndef ABPN_MODEL_H_
#define ABPN_MODEL_H_

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "abpn/ops.h"
#include "abpn/tensor.h"

namespace abpn {

// Residual-learning wiring. Order matches the ablation table rows.
enum class Variant : std::uint8_t {
  kBaseline = 0,
  kNearestIsrl = 1,
  kBilinearIsrl = 2,
  kFsrl = 3,
  kAbrl = 4,
};

inline constexpr Variant kAllVariants[] = {
    Variant::kBaseline, Variant::kNearestIsrl, Variant::kBilinearIsrl,
    Variant::kFsrl, Variant::kAbrl};

// Short CLI name ("baseline", "nearest", "bilinear", "fsrl", "abrl").
std::string_view variant_name(Variant v);
// Table label ("Baseline", "Baseline+nearest", ...).
std::string_view variant_label(Variant v);
Variant parse_variant(std::string_view name);

struct Hyper {
  int scale = 3;
  int channels = 28;
  int pairs = 5;
  Variant variant = Variant::kAbrl;

  void validate() const;
  int transition_channels() const { return 3 * scale * scale; }
  friend bool operator==(const Hyper&, const Hyper&) = default;
};

// Activation node names shared by calibration, fake quantization and the
// integer path.
namespace node {
inline constexpr std::string_view kInput = "input";
inline constexpr std::string_view kSfe = "sfe";
inline constexpr std::string_view kFsrlAdd = "fsrl_add";
inline constexpr std::string_view kTransition = "transition";
inline constexpr std::string_view kResize = "resize";
inline constexpr std::string_view kOutput = "output";
std::string dfe(int i);  // "dfe1" ... "dfeP"
}  // namespace node

// Layer names: "sfe", "dfe1".."dfeP", "transition".
std::string layer_name(const Hyper& h, int layer);
// Activation nodes present in a variant, in execution order.
std::vector<std::string> activation_nodes(const Hyper& h);
// Name of the activation node feeding conv layer `layer`.
std::string layer_input_node(const Hyper& h, int layer);
// Name of the activation node produced by conv layer `layer`.
std::string layer_output_node(const Hyper& h, int layer);
// True when the transition conv writes straight into the network output
// (variants without an image-space residual add).
bool transition_feeds_output(Variant v);

template <typename T>
struct BasicModel {
  Hyper hyper;
  // sfe, dfe1..dfeP, transition.
  std::vector<ConvWeights<T>> layers;

  void validate() const;

  template <typename U>
  BasicModel<U> cast() const {
    BasicModel<U> out;
    out.hyper = hyper;
    for (const auto& l : layers) out.layers.push_back(l.template cast<U>());
    return out;
  }

  friend bool operator==(const BasicModel&, const BasicModel&) = default;
};

using ModelGraph = BasicModel<float>;
using ModelGraphD = BasicModel<double>;

// Multiplier on the He-initialized transition kernel.
inline constexpr float kTransitionInitScale = 0.01f;

// He-initialized ABPN for the requested wiring, transition layer scaled by
// kTransitionInitScale. Deterministic for a seed.
ModelGraph build(const Hyper& hyper, std::mt19937_64& rng);
ModelGraph build(const Hyper& hyper, std::uint64_t seed);

// Closed form: (9*3+1)c + p(9c+1)c + (9c+1)*3s^2.
std::int64_t param_count(const Hyper& h);
std::int64_t param_count(const ModelGraph& g);

template <typename T>
BasicTensor<T> forward(const BasicModel<T>& g, const BasicTensor<T>& lr);

// The single description of the ABPN dataflow. Exec supplies the value type
// and the primitive ops, so the same wiring drives float inference, the
// gradient tape, calibration, fake-quant simulation and the integer path.
//
// Exec must provide:
//   using Value = ...;
//   Value input(Value x);
//   Value conv(Value x, int layer, bool relu, std::string_view node);
//   Value add(Value a, Value b, std::string_view node);
//   Value anchor(Value x, int s);
//   Value nearest(Value x, int s);
//   Value bilinear(Value x, int s, std::string_view node);
//   Value pixel_shuffle(Value x, int s);
//   Value clip(Value x, std::string_view node);
template <typename Exec>
typename Exec::Value run_graph(const Hyper& h, Exec& ex,
                               typename Exec::Value lr) {
  using Value = typename Exec::Value;
  const int s = h.scale;
  Value x = ex.input(std::move(lr));
  Value f0 = ex.conv(x, 0, true, node::kSfe);
  Value f = f0;
  for (int i = 1; i <= h.pairs; ++i) {
    f = ex.conv(f, i, true, node::dfe(i));
  }
  if (h.variant == Variant::kFsrl) f = ex.add(f, f0, node::kFsrlAdd);
  Value t = ex.conv(f, h.pairs + 1, false, node::kTransition);
  Value y{};
  switch (h.variant) {
    case Variant::kBaseline:
    case Variant::kFsrl:
      y = ex.pixel_shuffle(t, s);
      break;
    case Variant::kNearestIsrl:
      y = ex.add(ex.pixel_shuffle(t, s), ex.nearest(x, s), node::kOutput);
      break;
    case Variant::kBilinearIsrl:
      y = ex.add(ex.pixel_shuffle(t, s), ex.bilinear(x, s, node::kResize),
                 node::kOutput);
      break;
    case Variant::kAbrl:
      y = ex.pixel_shuffle(ex.add(t, ex.anchor(x, s), node::kOutput), s);
      break;
  }
  return ex.clip(y, node::kOutput);
}

}  // namespace abpn

#endif  // ABPN_MODEL_H_
