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

#include "abpn/model.h"

#include "abpn/exec.h"
#include "abpn/train.h"

namespace abpn {

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::kBaseline:
      return "baseline";
    case Variant::kNearestIsrl:
      return "nearest";
    case Variant::kBilinearIsrl:
      return "bilinear";
    case Variant::kFsrl:
      return "fsrl";
    case Variant::kAbrl:
      return "abrl";
  }
  return "?";
}

std::string_view variant_label(Variant v) {
  switch (v) {
    case Variant::kBaseline:
      return "Baseline";
    case Variant::kNearestIsrl:
      return "Baseline+nearest";
    case Variant::kBilinearIsrl:
      return "Baseline+bilinear";
    case Variant::kFsrl:
      return "Baseline+FSRL";
    case Variant::kAbrl:
      return "Baseline+ABRL";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  for (Variant v : kAllVariants) {
    if (name == variant_name(v)) return v;
  }
  fail(ErrorKind::kInvalidArgument,
       "unknown variant '" + std::string(name) +
           "' (expected baseline, nearest, bilinear, fsrl or abrl)");
}

void Hyper::validate() const {
  check(scale >= 2 && scale <= 4, ErrorKind::kInvalidArgument,
        "scale must be 2, 3 or 4");
  check(channels >= 1, ErrorKind::kInvalidArgument, "channels must be >= 1");
  check(pairs >= 1, ErrorKind::kInvalidArgument, "pairs must be >= 1");
  check(static_cast<int>(variant) <= 4,
        ErrorKind::kInvalidArgument, "unknown variant");
}

std::string node::dfe(int i) { return "dfe" + std::to_string(i); }

std::string layer_name(const Hyper& h, int layer) {
  if (layer == 0) return std::string(node::kSfe);
  if (layer == h.pairs + 1) return std::string(node::kTransition);
  return node::dfe(layer);
}

std::vector<std::string> activation_nodes(const Hyper& h) {
  std::vector<std::string> out{std::string(node::kInput),
                               std::string(node::kSfe)};
  for (int i = 1; i <= h.pairs; ++i) out.push_back(node::dfe(i));
  if (h.variant == Variant::kFsrl) out.emplace_back(node::kFsrlAdd);
  out.emplace_back(node::kTransition);
  if (h.variant == Variant::kBilinearIsrl) out.emplace_back(node::kResize);
  out.emplace_back(node::kOutput);
  return out;
}

std::string layer_input_node(const Hyper& h, int layer) {
  if (layer == 0) return std::string(node::kInput);
  if (layer == h.pairs + 1 && h.variant == Variant::kFsrl) {
    return std::string(node::kFsrlAdd);
  }
  return layer_name(h, layer - 1);
}

std::string layer_output_node(const Hyper& h, int layer) {
  return layer_name(h, layer);
}

bool transition_feeds_output(Variant v) {
  return v == Variant::kBaseline || v == Variant::kFsrl;
}

template <typename T>
void BasicModel<T>::validate() const {
  hyper.validate();
  check(layers.size() == std::size_t(hyper.pairs) + 2, ErrorKind::kShape,
        "model layer count does not match pairs");
  const int c = hyper.channels;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    l.validate();
    const int cin = i == 0 ? 3 : c;
    const int cout = i + 1 == layers.size() ? hyper.transition_channels() : c;
    check(l.k == 3 && l.cin == cin && l.cout == cout, ErrorKind::kShape,
          "layer " + layer_name(hyper, int(i)) + " has unexpected shape");
  }
}

ModelGraph build(const Hyper& hyper, std::mt19937_64& rng) {
  hyper.validate();
  ModelGraph g;
  g.hyper = hyper;
  const int c = hyper.channels;
  g.layers.push_back(he_init(3, 3, c, rng));
  for (int i = 0; i < hyper.pairs; ++i) g.layers.push_back(he_init(3, c, c, rng));
  ConvWeights<float> t = he_init(3, c, hyper.transition_channels(), rng);
  // Raw 0-255 inputs: a full-variance transition makes the initial residual
  // hundreds of levels wide and ADAM then kills the ReLU body.
  for (auto& v : t.kernel) v *= kTransitionInitScale;
  g.layers.push_back(std::move(t));
  return g;
}

ModelGraph build(const Hyper& hyper, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return build(hyper, rng);
}

std::int64_t param_count(const Hyper& h) {
  const std::int64_t c = h.channels;
  const std::int64_t p = h.pairs;
  const std::int64_t s = h.scale;
  return (9 * 3 + 1) * c + p * (9 * c + 1) * c + (9 * c + 1) * 3 * s * s;
}

std::int64_t param_count(const ModelGraph& g) {
  std::int64_t n = 0;
  for (const auto& l : g.layers) n += static_cast<std::int64_t>(l.param_count());
  return n;
}

template <typename T>
BasicTensor<T> forward(const BasicModel<T>& g, const BasicTensor<T>& lr) {
  check(lr.shape().c == 3, ErrorKind::kShape,
        "forward: input must have 3 channels, got " + lr.shape().to_string());
  FloatExec<T> ex(g);
  return run_graph(g.hyper, ex, lr);
}

template struct BasicModel<float>;
template struct BasicModel<double>;
template Tensor forward(const ModelGraph&, const Tensor&);
template TensorD forward(const ModelGraphD&, const TensorD&);

}  // namespace abpn
