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

#include "abpn/tensor.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace abpn {

Shape::Shape(std::int64_t n_, std::int64_t h_, std::int64_t w_,
             std::int64_t c_)
    : n(n_), h(h_), w(w_), c(c_) {
  check(n > 0 && h > 0 && w > 0 && c > 0, ErrorKind::kShape,
        "shape extents must be positive: " + to_string());
  constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();
  bool overflow = h > kMax / n;
  overflow = overflow || w > kMax / (n * h);
  overflow = overflow || c > kMax / (n * h * w);
  check(!overflow, ErrorKind::kShape,
        "shape element count overflows: " + to_string());
}

std::string Shape::to_string() const {
  return "(" + std::to_string(n) + "," + std::to_string(h) + "," +
         std::to_string(w) + "," + std::to_string(c) + ")";
}

QuantParams QuantParams::activation(double scale, std::int32_t zero_point) {
  QuantParams qp{scale, zero_point, 0, 255};
  qp.validate();
  return qp;
}

QuantParams QuantParams::weight(double scale) {
  QuantParams qp{scale, 0, -127, 127};
  qp.validate();
  return qp;
}

bool QuantParams::valid() const {
  return std::isfinite(scale) && scale > 0.0 && qmin <= zero_point &&
         zero_point <= qmax;
}

void QuantParams::validate() const {
  check(valid(), ErrorKind::kInvalidArgument,
        "invalid quant params: scale=" + std::to_string(scale) +
            " zero_point=" + std::to_string(zero_point) + " range=[" +
            std::to_string(qmin) + "," + std::to_string(qmax) + "]");
}

double round_half_away(double v) { return std::round(v); }

std::int32_t quantize_value(double x, const QuantParams& qp) {
  const double q = round_half_away(x / qp.scale) + qp.zero_point;
  return static_cast<std::int32_t>(
      std::clamp(q, static_cast<double>(qp.qmin), static_cast<double>(qp.qmax)));
}

template <typename Q>
BasicQTensor<Q>::BasicQTensor(const Shape& shape, std::vector<Q> data,
                              const QuantParams& qp)
    : shape_(shape), data_(std::move(data)), qp_(qp) {
  qp_.validate();
  check(qp_.qmin >= std::numeric_limits<Q>::min() &&
            qp_.qmax <= std::numeric_limits<Q>::max(),
        ErrorKind::kInvalidArgument, "quant range exceeds storage type");
  check(data_.size() == shape_.size(), ErrorKind::kShape,
        "qtensor data length does not match shape " + shape_.to_string());
  for (Q q : data_) {
    check(q >= qp_.qmin && q <= qp_.qmax, ErrorKind::kInvalidArgument,
          "qtensor element outside [qmin, qmax]");
  }
}

template <typename Q, typename T>
BasicQTensor<Q> quantize(const BasicTensor<T>& x, const QuantParams& qp) {
  qp.validate();
  std::vector<Q> out(x.size());
  const auto src = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<Q>(quantize_value(src[i], qp));
  }
  return BasicQTensor<Q>(x.shape(), std::move(out), qp);
}

template <typename T, typename Q>
BasicTensor<T> dequantize(const BasicQTensor<Q>& q) {
  std::vector<T> out(q.size());
  const auto src = q.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<T>(dequantize_value(src[i], q.qp()));
  }
  return BasicTensor<T>(q.shape(), std::move(out));
}

template class BasicQTensor<std::uint8_t>;
template class BasicQTensor<std::int8_t>;
template QTensor quantize<std::uint8_t, float>(const Tensor&, const QuantParams&);
template QTensor quantize<std::uint8_t, double>(const TensorD&,
                                                const QuantParams&);
template QWeights quantize<std::int8_t, float>(const Tensor&, const QuantParams&);
template QWeights quantize<std::int8_t, double>(const TensorD&,
                                                const QuantParams&);
template Tensor dequantize<float, std::uint8_t>(const QTensor&);
template TensorD dequantize<double, std::uint8_t>(const QTensor&);
template Tensor dequantize<float, std::int8_t>(const QWeights&);
template TensorD dequantize<double, std::int8_t>(const QWeights&);

Tensor tensor_from_image(const Image& image) {
  check(image.height >= 1 && image.width >= 1, ErrorKind::kShape,
        "image must be at least 1x1");
  check(image.pixels.size() == std::size_t(image.height) * image.width * 3,
        ErrorKind::kShape, "image pixel buffer size mismatch");
  std::vector<float> data(image.pixels.begin(), image.pixels.end());
  return Tensor(Shape(1, image.height, image.width, 3), std::move(data));
}

Image image_from_tensor(const Tensor& t, std::int64_t n) {
  const Shape& s = t.shape();
  check(s.c == 3, ErrorKind::kShape,
        "image_from_tensor needs 3 channels, got " + s.to_string());
  check(n >= 0 && n < s.n, ErrorKind::kShape, "batch index out of range");
  Image image(static_cast<int>(s.h), static_cast<int>(s.w));
  const auto src = t.data().subspan(s.index(n, 0, 0, 0), image.pixels.size());
  for (std::size_t i = 0; i < image.pixels.size(); ++i) {
    const double v = std::clamp(static_cast<double>(src[i]), 0.0, 255.0);
    image.pixels[i] = static_cast<std::uint8_t>(round_half_away(v));
  }
  return image;
}

}  // namespace abpn
