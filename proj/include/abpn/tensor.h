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

#ifndef ABPN_TENSOR_H_
#define ABPN_TENSOR_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "abpn/error.h"

namespace abpn {

// Extents of a dense NHWC tensor. Element (n, y, x, c) lives at flat index
// ((n * h + y) * w + x) * c_extent + c.
struct Shape {
  std::int64_t n = 1;
  std::int64_t h = 1;
  std::int64_t w = 1;
  std::int64_t c = 1;

  Shape() = default;
  Shape(std::int64_t n_, std::int64_t h_, std::int64_t w_, std::int64_t c_);

  std::int64_t count() const { return n * h * w * c; }
  std::size_t size() const { return static_cast<std::size_t>(count()); }

  std::size_t index(std::int64_t in, std::int64_t y, std::int64_t x,
                    std::int64_t ch) const {
    return static_cast<std::size_t>(((in * h + y) * w + x) * c + ch);
  }

  bool same_spatial(const Shape& o) const {
    return n == o.n && h == o.h && w == o.w;
  }

  friend bool operator==(const Shape&, const Shape&) = default;

  std::string to_string() const;
};

// Immutable dense tensor. Ops build a fresh buffer and move it in.
template <typename T>
class BasicTensor {
 public:
  using value_type = T;

  BasicTensor() : shape_(), data_(1, T(0)) {}
  explicit BasicTensor(const Shape& shape, T fill = T(0))
      : shape_(shape), data_(shape.size(), fill) {}
  BasicTensor(const Shape& shape, std::vector<T> data)
      : shape_(shape), data_(std::move(data)) {
    check(data_.size() == shape_.size(), ErrorKind::kShape,
          "tensor data length " + std::to_string(data_.size()) +
              " does not match shape " + shape_.to_string());
  }

  const Shape& shape() const { return shape_; }
  std::span<const T> data() const { return data_; }
  std::size_t size() const { return data_.size(); }

  T operator[](std::size_t i) const { return data_[i]; }
  T at(std::int64_t n, std::int64_t y, std::int64_t x, std::int64_t c) const {
    return data_[shape_.index(n, y, x, c)];
  }

  // Moves the buffer out, leaving this tensor empty-shaped.
  std::vector<T> release() && { return std::move(data_); }

  template <typename U>
  BasicTensor<U> cast() const {
    return BasicTensor<U>(shape_, std::vector<U>(data_.begin(), data_.end()));
  }

  friend bool operator==(const BasicTensor&, const BasicTensor&) = default;

 private:
  Shape shape_;
  std::vector<T> data_;
};

using Tensor = BasicTensor<float>;
using TensorD = BasicTensor<double>;

// Affine quantization metadata: real = (q - zero_point) * scale.
struct QuantParams {
  double scale = 1.0;
  std::int32_t zero_point = 0;
  std::int32_t qmin = 0;
  std::int32_t qmax = 255;

  // Unsigned 8-bit activation range [0, 255].
  static QuantParams activation(double scale, std::int32_t zero_point);
  // Signed symmetric weight range [-127, 127], zero point 0.
  static QuantParams weight(double scale);
  // Network input and output: pixel bytes are represented exactly.
  static QuantParams identity() { return activation(1.0, 0); }

  bool valid() const;
  void validate() const;

  double real_min() const { return (qmin - zero_point) * scale; }
  double real_max() const { return (qmax - zero_point) * scale; }

  friend bool operator==(const QuantParams&, const QuantParams&) = default;
};

// Quantized tensor. Q is std::uint8_t for activations, std::int8_t for
// weights.
template <typename Q>
class BasicQTensor {
 public:
  BasicQTensor() = default;
  BasicQTensor(const Shape& shape, std::vector<Q> data, const QuantParams& qp);

  const Shape& shape() const { return shape_; }
  std::span<const Q> data() const { return data_; }
  const QuantParams& qp() const { return qp_; }
  std::size_t size() const { return data_.size(); }
  Q operator[](std::size_t i) const { return data_[i]; }

  friend bool operator==(const BasicQTensor&, const BasicQTensor&) = default;

 private:
  Shape shape_;
  std::vector<Q> data_;
  QuantParams qp_;
};

using QTensor = BasicQTensor<std::uint8_t>;
using QWeights = BasicQTensor<std::int8_t>;

// Round half away from zero, the single rounding mode used for quantization.
double round_half_away(double v);

std::int32_t quantize_value(double x, const QuantParams& qp);
inline double dequantize_value(std::int32_t q, const QuantParams& qp) {
  return static_cast<double>(q - qp.zero_point) * qp.scale;
}

template <typename Q = std::uint8_t, typename T>
BasicQTensor<Q> quantize(const BasicTensor<T>& x, const QuantParams& qp);

template <typename T = float, typename Q>
BasicTensor<T> dequantize(const BasicQTensor<Q>& q);

// 8-bit interleaved RGB image, row-major.
struct Image {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> pixels;

  Image() = default;
  Image(int h, int w) : height(h), width(w), pixels(std::size_t(h) * w * 3) {}

  friend bool operator==(const Image&, const Image&) = default;
};

// (1, H, W, 3) tensor holding the raw byte values in [0, 255].
Tensor tensor_from_image(const Image& image);
// Clamp to [0, 255], round half away from zero and narrow to bytes. Uses
// batch element `n`.
Image image_from_tensor(const Tensor& t, std::int64_t n = 0);

}  // namespace abpn

#endif  // ABPN_TENSOR_H_
