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

#ifndef ABPN_QUANT_H_
#define ABPN_QUANT_H_

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "abpn/model.h"
#include "abpn/quant_params.h"
#include "abpn/tensor.h"

namespace abpn {

struct Range {
  double min = 0.0;
  double max = 0.0;
};

// Global min/max per activation node over the calibration data.
struct CalibStats {
  std::map<std::string, Range, std::less<>> ranges;
};

CalibStats calibrate(const ModelGraph& model, std::span<const Tensor> samples);

// Activation params per node: input, output and (when present) the resize
// node are pinned to scale 1 / zero point 0; so is the transition node when
// it feeds the output directly. Everything else comes from `stats`.
ActivationParams activation_params_for(const Hyper& h, const CalibStats& stats);

struct QuantizedConv {
  QWeights weights;  // shape (k, k, cin, cout)
  std::vector<std::int32_t> bias;
  QuantParams input;
  QuantParams output;
  Multiplier multiplier;  // input.scale * weights.scale / output.scale
  bool relu = false;

  int k() const { return static_cast<int>(weights.shape().n); }
  int cin() const { return static_cast<int>(weights.shape().w); }
  int cout() const { return static_cast<int>(weights.shape().c); }
  QuantParams bias_params() const;
  // Upper bound of |accumulator| over all 8-bit inputs.
  std::int64_t max_abs_accumulator() const;
};

struct QuantizedModel {
  Hyper hyper;
  ActivationParams activations;
  std::vector<QuantizedConv> layers;

  void validate() const;
  friend bool operator==(const QuantizedModel&, const QuantizedModel&);
};

// Builds one integer layer from float weights and its activation params.
QuantizedConv quantize_conv(const ConvWeights<float>& w,
                            const QuantParams& input, const QuantParams& output,
                            bool relu);

QuantizedModel ptq(const ModelGraph& model, const CalibStats& stats);
// Same as ptq() with explicit activation params.
QuantizedModel ptq(const ModelGraph& model, const ActivationParams& params);

// acc = sum (q_x - zp_x) * q_w + bias_q over the window; padded taps add 0.
// out = clamp(requantize(acc) + zp_out, lo, 255) with lo = zp_out for fused
// ReLU layers.
QTensor quantized_conv2d(const QTensor& x, const QuantizedConv& layer);

// Each input is rescaled onto out_qp with 20 extra fraction bits, summed, and
// rounded once.
QTensor quantized_add(const QTensor& a, const QTensor& b,
                      const QuantParams& out_qp);
QTensor quantized_concat(std::span<const QTensor> parts,
                         const QuantParams& out_qp);
// Per-element rescale onto out_qp (identity copy when params match).
QTensor requantize_tensor(const QTensor& x, const QuantParams& out_qp);

// Index-only ops; the quant params pass through.
QTensor quantized_pixel_shuffle(const QTensor& x, int s);
QTensor quantized_anchor_concat(const QTensor& x, int s);
QTensor quantized_nearest_resize(const QTensor& x, int s);
// Exact rational bilinear weights with one rounding; input and output params
// must match.
QTensor quantized_bilinear_resize(const QTensor& x, int s,
                                  const QuantParams& out_qp);

using Int8Observer = std::function<void(std::string_view, const QTensor&)>;

// Integer-only forward on a (N, H, W, 3) byte tensor quantized at (1, 0).
QTensor infer_int8(const QuantizedModel& qm, const QTensor& input,
                   const Int8Observer& observer = {});
Image infer_int8(const QuantizedModel& qm, const Image& image);

// Float (double) simulation of the quantized model: dequantized weights,
// dequantized integer biases, fake-quant at every activation node.
TensorD simulate_fake_quant(const QuantizedModel& qm, const TensorD& input);
// Dequantized weights and biases as a float model.
ModelGraphD dequantized_model(const QuantizedModel& qm);

}  // namespace abpn

#endif  // ABPN_QUANT_H_
