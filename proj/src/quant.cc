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

#include "abpn/quant.h"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>

#include "abpn/exec.h"
#include "abpn/ops.h"

namespace abpn {
namespace {

using IntMat =
    Eigen::Matrix<std::int32_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr std::int64_t kInt32Max = std::numeric_limits<std::int32_t>::max();
constexpr std::int64_t kInt32Min = std::numeric_limits<std::int32_t>::min();
constexpr int kAddFractionBits = 20;

std::int32_t saturate32(std::int64_t v) {
  return static_cast<std::int32_t>(std::clamp(v, kInt32Min, kInt32Max));
}

template <typename T>
QuantParams weight_params_impl(std::span<const T> kernel) {
  double max_abs = 0.0;
  for (T v : kernel) max_abs = std::max(max_abs, std::abs(double(v)));
  return QuantParams::weight(std::max(max_abs / 127.0, kMinScale));
}

BasicTensor<std::uint8_t> payload(const QTensor& q) {
  return BasicTensor<std::uint8_t>(
      q.shape(), std::vector<std::uint8_t>(q.data().begin(), q.data().end()));
}

QTensor with_params(BasicTensor<std::uint8_t> t, const QuantParams& qp) {
  const Shape shape = t.shape();
  return QTensor(shape, std::move(t).release(), qp);
}

const QuantParams& lookup(const ActivationParams& params, std::string_view name) {
  auto it = params.find(name);
  check(it != params.end(), ErrorKind::kUsage,
        "no quant params for node " + std::string(name));
  return it->second;
}

// Integer executor for run_graph().
class Int8Exec {
 public:
  using Value = QTensor;

  Int8Exec(const QuantizedModel& qm, const Int8Observer& observer)
      : qm_(qm), observer_(observer) {}

  Value input(Value x) {
    check(x.qp() == lookup(qm_.activations, node::kInput), ErrorKind::kUsage,
          "infer_int8: input must be quantized with the input params");
    return finish(node::kInput, std::move(x));
  }
  Value conv(const Value& x, int layer, bool, std::string_view name) {
    return finish(name, quantized_conv2d(x, qm_.layers.at(layer)));
  }
  Value add(const Value& a, const Value& b, std::string_view name) {
    return finish(name, quantized_add(a, b, lookup(qm_.activations, name)));
  }
  Value anchor(const Value& x, int s) { return quantized_anchor_concat(x, s); }
  Value nearest(const Value& x, int s) { return quantized_nearest_resize(x, s); }
  Value bilinear(const Value& x, int s, std::string_view name) {
    return finish(name,
                  quantized_bilinear_resize(x, s, lookup(qm_.activations, name)));
  }
  Value pixel_shuffle(const Value& x, int s) {
    return quantized_pixel_shuffle(x, s);
  }
  // The output params cover exactly [0, 255], so the clip is the saturation
  // of the final requantization.
  Value clip(const Value& x, std::string_view name) {
    return requantize_tensor(x, lookup(qm_.activations, name));
  }

 private:
  Value finish(std::string_view name, Value y) {
    if (observer_) observer_(name, y);
    return y;
  }

  const QuantizedModel& qm_;
  const Int8Observer& observer_;
};

}  // namespace

QuantParams weight_params(std::span<const float> kernel) {
  return weight_params_impl(kernel);
}
QuantParams weight_params(std::span<const double> kernel) {
  return weight_params_impl(kernel);
}

QuantParams activation_params(double min, double max) {
  check(std::isfinite(min) && std::isfinite(max) && min <= max,
        ErrorKind::kInvalidArgument, "activation range must be finite, min <= max");
  min = std::min(min, 0.0);
  max = std::max(max, 0.0);
  if (max == min) return QuantParams::activation(kMinScale, 128);
  const double scale = std::max((max - min) / 255.0, kMinScale);
  const double zp = std::clamp(round_half_away(-min / scale), 0.0, 255.0);
  return QuantParams::activation(scale, static_cast<std::int32_t>(zp));
}

template <typename T>
BasicTensor<T> fake_quant(const BasicTensor<T>& x, const QuantParams& qp) {
  qp.validate();
  std::vector<T> out(x.size());
  const auto src = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = T(dequantize_value(quantize_value(src[i], qp), qp));
  }
  return BasicTensor<T>(x.shape(), std::move(out));
}

template Tensor fake_quant(const Tensor&, const QuantParams&);
template TensorD fake_quant(const TensorD&, const QuantParams&);

double Multiplier::value() const {
  return std::ldexp(static_cast<double>(m), -31 - shift);
}

Multiplier decompose_multiplier(double real) {
  check(std::isfinite(real) && real >= 0.0, ErrorKind::kInvalidArgument,
        "multiplier must be finite and non-negative");
  if (real == 0.0) return Multiplier{};
  int exponent = 0;
  const double fraction = std::frexp(real, &exponent);  // [0.5, 1)
  std::int64_t m = std::llround(std::ldexp(fraction, 31));
  if (m == (std::int64_t(1) << 31)) {
    m /= 2;
    ++exponent;
  }
  return Multiplier{static_cast<std::int32_t>(m), -exponent};
}

std::int64_t rounding_shift_right(std::int64_t v, int exponent) {
  if (exponent <= 0) return v;
  if (exponent >= 63) return 0;
  const bool negative = v < 0;
  const std::uint64_t mag =
      negative ? std::uint64_t(0) - std::uint64_t(v) : std::uint64_t(v);
  const std::uint64_t r = (mag + (std::uint64_t(1) << (exponent - 1))) >> exponent;
  return negative ? -static_cast<std::int64_t>(r) : static_cast<std::int64_t>(r);
}

std::int32_t requantize(std::int32_t acc, std::int32_t m, int shift) {
  if (acc == 0 || m == 0) return 0;
  const std::int64_t prod = std::int64_t(acc) * std::int64_t(m);  // < 2^62
  const int total = 31 + shift;
  if (total <= 0) {
    const int left = -total;
    if (left >= 32) return prod > 0 ? std::int32_t(kInt32Max) : std::int32_t(kInt32Min);
    const std::int64_t limit = kInt32Max >> left;
    if (prod > limit) return std::int32_t(kInt32Max);
    if (prod < -limit) return std::int32_t(kInt32Min);
    return saturate32(prod * (std::int64_t(1) << left));
  }
  return saturate32(rounding_shift_right(prod, total));
}

std::int32_t requantize(std::int32_t acc, const Multiplier& mult) {
  return requantize(acc, mult.m, mult.shift);
}

CalibStats calibrate(const ModelGraph& model, std::span<const Tensor> samples) {
  check(!samples.empty(), ErrorKind::kInvalidArgument,
        "calibrate: representative data is empty");
  model.validate();
  CalibStats stats;
  FloatExec<float> ex(model);
  ex.set_observer([&stats](std::string_view name, const Tensor& t) {
    const auto [lo, hi] = std::minmax_element(t.data().begin(), t.data().end());
    auto it = stats.ranges.find(name);
    if (it == stats.ranges.end()) {
      stats.ranges.emplace(std::string(name), Range{*lo, *hi});
    } else {
      it->second.min = std::min(it->second.min, double(*lo));
      it->second.max = std::max(it->second.max, double(*hi));
    }
  });
  for (const Tensor& x : samples) {
    check(x.shape().c == 3, ErrorKind::kShape,
          "calibrate: samples must have 3 channels");
    run_graph(model.hyper, ex, x);
  }
  return stats;
}

ActivationParams activation_params_for(const Hyper& h, const CalibStats& stats) {
  ActivationParams out;
  for (const std::string& name : activation_nodes(h)) {
    const bool pinned =
        name == node::kInput || name == node::kOutput || name == node::kResize ||
        (name == node::kTransition && transition_feeds_output(h.variant));
    if (pinned) {
      out.emplace(name, QuantParams::identity());
      continue;
    }
    auto it = stats.ranges.find(name);
    check(it != stats.ranges.end(), ErrorKind::kUsage,
          "missing calibration stats for node " + name);
    out.emplace(name, activation_params(it->second.min, it->second.max));
  }
  return out;
}

QuantParams QuantizedConv::bias_params() const {
  return QuantParams{input.scale * weights.qp().scale, 0,
                     std::numeric_limits<std::int32_t>::min(),
                     std::numeric_limits<std::int32_t>::max()};
}

std::int64_t QuantizedConv::max_abs_accumulator() const {
  std::int64_t bias_max = 0;
  for (std::int32_t b : bias) bias_max = std::max<std::int64_t>(bias_max, std::llabs(b));
  const std::int64_t taps = std::int64_t(k()) * k() * cin();
  const std::int64_t max_x =
      std::max(input.qmax - input.zero_point, input.zero_point - input.qmin);
  return taps * max_x * 127 + bias_max;
}

QuantizedConv quantize_conv(const ConvWeights<float>& w,
                            const QuantParams& input, const QuantParams& output,
                            bool relu) {
  w.validate();
  QuantizedConv layer;
  const QuantParams wqp = weight_params(std::span<const float>(w.kernel));
  std::vector<std::int8_t> q(w.kernel.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    q[i] = static_cast<std::int8_t>(quantize_value(w.kernel[i], wqp));
  }
  layer.weights = QWeights(Shape(w.k, w.k, w.cin, w.cout), std::move(q), wqp);
  layer.input = input;
  layer.output = output;
  layer.relu = relu;
  // Biases are clamped so the accumulator stays inside int32; only a
  // near-zero weight scale with a non-zero bias can reach the clamp.
  const std::int64_t taps = std::int64_t(w.k) * w.k * w.cin;
  const std::int64_t product_bound =
      taps * std::max(input.qmax - input.zero_point, input.zero_point - input.qmin) *
      127;
  const double bias_limit = double(kInt32Max - product_bound);
  const double bias_scale = input.scale * wqp.scale;
  layer.bias.resize(w.bias.size());
  for (std::size_t i = 0; i < w.bias.size(); ++i) {
    const double b = round_half_away(double(w.bias[i]) / bias_scale);
    layer.bias[i] = static_cast<std::int32_t>(std::clamp(b, -bias_limit, bias_limit));
  }
  layer.multiplier = decompose_multiplier(bias_scale / output.scale);
  check(layer.max_abs_accumulator() <= kInt32Max, ErrorKind::kInvalidArgument,
        "conv accumulator could overflow int32");
  return layer;
}

void QuantizedModel::validate() const {
  hyper.validate();
  check(layers.size() == std::size_t(hyper.pairs) + 2, ErrorKind::kShape,
        "quantized model layer count does not match pairs");
  for (const std::string& name : activation_nodes(hyper)) {
    check(activations.count(name) == 1, ErrorKind::kFormat,
          "quantized model lacks params for node " + name);
  }
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    check(l.bias.size() == std::size_t(l.cout()), ErrorKind::kShape,
          "quantized bias size mismatch");
    check(l.max_abs_accumulator() <= kInt32Max, ErrorKind::kInvalidArgument,
          "conv accumulator could overflow int32");
  }
}

bool operator==(const QuantizedModel& a, const QuantizedModel& b) {
  if (!(a.hyper == b.hyper) || a.activations != b.activations ||
      a.layers.size() != b.layers.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.layers.size(); ++i) {
    const auto& x = a.layers[i];
    const auto& y = b.layers[i];
    if (!(x.weights == y.weights) || x.bias != y.bias || !(x.input == y.input) ||
        !(x.output == y.output) || !(x.multiplier == y.multiplier) ||
        x.relu != y.relu) {
      return false;
    }
  }
  return true;
}

QuantizedModel ptq(const ModelGraph& model, const ActivationParams& params) {
  model.validate();
  QuantizedModel qm;
  qm.hyper = model.hyper;
  qm.activations = params;
  const Hyper& h = model.hyper;
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    const int layer = int(i);
    qm.layers.push_back(quantize_conv(
        model.layers[i], lookup(params, layer_input_node(h, layer)),
        lookup(params, layer_output_node(h, layer)), layer <= h.pairs));
  }
  qm.validate();
  return qm;
}

QuantizedModel ptq(const ModelGraph& model, const CalibStats& stats) {
  return ptq(model, activation_params_for(model.hyper, stats));
}

QTensor quantized_conv2d(const QTensor& x, const QuantizedConv& layer) {
  const Shape& s = x.shape();
  check(x.qp() == layer.input, ErrorKind::kUsage,
        "quantized_conv2d: input params do not match the layer");
  check(s.c == layer.cin(), ErrorKind::kShape,
        "quantized_conv2d: channel mismatch");
  const int k = layer.k();
  const int pad = k / 2;
  const std::int64_t cin = s.c;
  const std::int64_t cout = layer.cout();
  const std::int64_t kk = std::int64_t(k) * k * cin;
  IntMat kernel(kk, cout);
  for (std::int64_t i = 0; i < kk * cout; ++i) kernel.data()[i] = layer.weights[i];

  const Shape out_shape(s.n, s.h, s.w, cout);
  std::vector<std::uint8_t> out(out_shape.size());
  const std::int32_t zp_x = x.qp().zero_point;
  const std::int64_t zp_out = layer.output.zero_point;
  const std::int64_t lo =
      layer.relu ? std::max<std::int64_t>(layer.output.qmin, zp_out) : layer.output.qmin;
  const std::int64_t hi = layer.output.qmax;
  const std::uint8_t* src = x.data().data();

  const std::int64_t rows = s.n * s.h;
  const std::int64_t per = std::max<std::int64_t>(1, 4096 / s.w);
  IntMat col;
  IntMat acc;
  for (std::int64_t r0 = 0; r0 < rows; r0 += per) {
    const std::int64_t r1 = std::min(rows, r0 + per);
    col.resize((r1 - r0) * s.w, kk);
    for (std::int64_t r = r0; r < r1; ++r) {
      const std::int64_t n = r / s.h;
      const std::int64_t y = r % s.h;
      for (std::int64_t px = 0; px < s.w; ++px) {
        std::int32_t* dst = col.data() + ((r - r0) * s.w + px) * kk;
        for (int ky = 0; ky < k; ++ky) {
          const std::int64_t sy = y + ky - pad;
          for (int kx = 0; kx < k; ++kx, dst += cin) {
            const std::int64_t sx = px + kx - pad;
            if (sy < 0 || sy >= s.h || sx < 0 || sx >= s.w) {
              std::fill(dst, dst + cin, 0);
            } else {
              const std::uint8_t* p = src + s.index(n, sy, sx, 0);
              for (std::int64_t i = 0; i < cin; ++i) dst[i] = std::int32_t(p[i]) - zp_x;
            }
          }
        }
      }
    }
    acc.noalias() = col * kernel;
    std::uint8_t* dst = out.data() + r0 * s.w * cout;
    for (std::int64_t p = 0; p < acc.rows(); ++p) {
      for (std::int64_t o = 0; o < cout; ++o) {
        const std::int32_t a = acc(p, o) + layer.bias[o];
        const std::int64_t v = std::int64_t(requantize(a, layer.multiplier)) + zp_out;
        dst[p * cout + o] = static_cast<std::uint8_t>(std::clamp(v, lo, hi));
      }
    }
  }
  return QTensor(out_shape, std::move(out), layer.output);
}

QTensor requantize_tensor(const QTensor& x, const QuantParams& out_qp) {
  out_qp.validate();
  if (x.qp() == out_qp) return x;
  const Multiplier m = decompose_multiplier(x.qp().scale / out_qp.scale);
  std::vector<std::uint8_t> out(x.size());
  const auto src = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::int64_t v =
        std::int64_t(requantize(std::int32_t(src[i]) - x.qp().zero_point, m)) +
        out_qp.zero_point;
    out[i] = static_cast<std::uint8_t>(
        std::clamp<std::int64_t>(v, out_qp.qmin, out_qp.qmax));
  }
  return QTensor(x.shape(), std::move(out), out_qp);
}

QTensor quantized_add(const QTensor& a, const QTensor& b,
                      const QuantParams& out_qp) {
  out_qp.validate();
  check(a.shape() == b.shape(), ErrorKind::kShape,
        "quantized_add: shape mismatch " + a.shape().to_string() + " vs " +
            b.shape().to_string());
  const Multiplier ma = decompose_multiplier(a.qp().scale / out_qp.scale);
  const Multiplier mb = decompose_multiplier(b.qp().scale / out_qp.scale);
  const std::int32_t zpa = a.qp().zero_point;
  const std::int32_t zpb = b.qp().zero_point;
  std::vector<std::uint8_t> out(a.size());
  const auto pa = a.data();
  const auto pb = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::int64_t ra =
        requantize((std::int32_t(pa[i]) - zpa) * (1 << kAddFractionBits), ma);
    const std::int64_t rb =
        requantize((std::int32_t(pb[i]) - zpb) * (1 << kAddFractionBits), mb);
    const std::int64_t v =
        rounding_shift_right(ra + rb, kAddFractionBits) + out_qp.zero_point;
    out[i] = static_cast<std::uint8_t>(
        std::clamp<std::int64_t>(v, out_qp.qmin, out_qp.qmax));
  }
  return QTensor(a.shape(), std::move(out), out_qp);
}

QTensor quantized_concat(std::span<const QTensor> parts,
                         const QuantParams& out_qp) {
  check(!parts.empty(), ErrorKind::kInvalidArgument,
        "quantized_concat: no inputs");
  std::vector<BasicTensor<std::uint8_t>> payloads;
  for (const QTensor& p : parts) payloads.push_back(payload(requantize_tensor(p, out_qp)));
  return with_params(channel_concat<std::uint8_t>(payloads), out_qp);
}

QTensor quantized_pixel_shuffle(const QTensor& x, int s) {
  return with_params(pixel_shuffle(payload(x), s), x.qp());
}

QTensor quantized_anchor_concat(const QTensor& x, int s) {
  return with_params(anchor_concat(payload(x), s), x.qp());
}

QTensor quantized_nearest_resize(const QTensor& x, int s) {
  return with_params(nearest_resize(payload(x), s), x.qp());
}

QTensor quantized_bilinear_resize(const QTensor& x, int s,
                                  const QuantParams& out_qp) {
  check(x.qp() == out_qp, ErrorKind::kUsage,
        "quantized_bilinear_resize: input and output params must match");
  check(s >= 1, ErrorKind::kInvalidArgument, "bilinear scale must be >= 1");
  const Shape& in = x.shape();
  const Shape out_shape(in.n, in.h * s, in.w * s, in.c);
  std::vector<std::uint8_t> out(out_shape.size());
  const std::int64_t two_s = 2 * std::int64_t(s);
  const std::int64_t denom = two_s * two_s;
  const std::int32_t zp = x.qp().zero_point;
  const auto src = x.data();
  for (std::int64_t n = 0; n < out_shape.n; ++n) {
    for (std::int64_t y = 0; y < out_shape.h; ++y) {
      const BilinearTap ty = bilinear_tap(y, in.h, s);
      for (std::int64_t px = 0; px < out_shape.w; ++px) {
        const BilinearTap tx = bilinear_tap(px, in.w, s);
        const std::int64_t w00 = (two_s - ty.frac_num) * (two_s - tx.frac_num);
        const std::int64_t w01 = (two_s - ty.frac_num) * tx.frac_num;
        const std::int64_t w10 = ty.frac_num * (two_s - tx.frac_num);
        const std::int64_t w11 = ty.frac_num * tx.frac_num;
        for (std::int64_t c = 0; c < in.c; ++c) {
          const std::int64_t acc =
              w00 * (src[in.index(n, ty.lo, tx.lo, c)] - zp) +
              w01 * (src[in.index(n, ty.lo, tx.hi, c)] - zp) +
              w10 * (src[in.index(n, ty.hi, tx.lo, c)] - zp) +
              w11 * (src[in.index(n, ty.hi, tx.hi, c)] - zp);
          // Round half away from zero of acc / denom.
          const std::int64_t mag = acc < 0 ? -acc : acc;
          std::int64_t q = (2 * mag + denom) / (2 * denom);
          if (acc < 0) q = -q;
          out[out_shape.index(n, y, px, c)] = static_cast<std::uint8_t>(
              std::clamp<std::int64_t>(q + zp, out_qp.qmin, out_qp.qmax));
        }
      }
    }
  }
  return QTensor(out_shape, std::move(out), out_qp);
}

QTensor infer_int8(const QuantizedModel& qm, const QTensor& input,
                   const Int8Observer& observer) {
  check(input.shape().c == 3, ErrorKind::kShape,
        "infer_int8: input must have 3 channels");
  Int8Exec ex(qm, observer);
  return run_graph(qm.hyper, ex, input);
}

Image infer_int8(const QuantizedModel& qm, const Image& image) {
  const QTensor q = quantize<std::uint8_t>(tensor_from_image(image),
                                           lookup(qm.activations, node::kInput));
  const QTensor out = infer_int8(qm, q);
  const Shape& s = out.shape();
  check(out.qp() == QuantParams::identity(), ErrorKind::kUsage,
        "infer_int8: output params must be scale 1, zero point 0");
  Image result(static_cast<int>(s.h), static_cast<int>(s.w));
  std::copy(out.data().begin(), out.data().end(), result.pixels.begin());
  return result;
}

ModelGraphD dequantized_model(const QuantizedModel& qm) {
  ModelGraphD m;
  m.hyper = qm.hyper;
  for (const auto& l : qm.layers) {
    ConvWeights<double> w(l.k(), l.cin(), l.cout());
    const TensorD kernel = dequantize<double>(l.weights);
    std::copy(kernel.data().begin(), kernel.data().end(), w.kernel.begin());
    const double bias_scale = l.bias_params().scale;
    for (std::size_t i = 0; i < l.bias.size(); ++i) w.bias[i] = l.bias[i] * bias_scale;
    m.layers.push_back(std::move(w));
  }
  return m;
}

TensorD simulate_fake_quant(const QuantizedModel& qm, const TensorD& input) {
  const ModelGraphD m = dequantized_model(qm);
  FloatExec<double> ex(m);
  ex.set_fake_quant(&qm.activations);
  return run_graph(qm.hyper, ex, input);
}

}  // namespace abpn
