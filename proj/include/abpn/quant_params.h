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

// Quantization arithmetic shared by the float (fake-quant) and integer paths.

#ifndef ABPN_QUANT_PARAMS_H_
#define ABPN_QUANT_PARAMS_H_

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>

#include "abpn/tensor.h"

namespace abpn {

using ActivationParams = std::map<std::string, QuantParams, std::less<>>;

// Scales below this are clamped; a zero-valued tensor gets this scale.
inline constexpr double kMinScale = 1e-8;

// Symmetric per-tensor weight params: scale = max|w| / 127, floored at 1e-8.
QuantParams weight_params(std::span<const float> kernel);
QuantParams weight_params(std::span<const double> kernel);

// Asymmetric unsigned 8-bit params for an observed range. The range is first
// widened to include 0 so that 0.0 is exactly representable; a degenerate
// range gets the 1e-8 floor scale with a mid-range zero point.
QuantParams activation_params(double min, double max);

// dequantize(quantize(x)).
template <typename T>
BasicTensor<T> fake_quant(const BasicTensor<T>& x, const QuantParams& qp);

// Fixed-point form of a positive real multiplier:
//   M ~= m * 2^-31 * 2^-shift, m in [2^30, 2^31).
struct Multiplier {
  std::int32_t m = 0;
  int shift = 0;

  double value() const;
  friend bool operator==(const Multiplier&, const Multiplier&) = default;
};

Multiplier decompose_multiplier(double real);

// Round-half-away-from-zero value of acc * m * 2^-31 * 2^-shift computed in
// integer arithmetic, saturated to int32.
std::int32_t requantize(std::int32_t acc, const Multiplier& mult);
std::int32_t requantize(std::int32_t acc, std::int32_t m, int shift);

// Round-half-away-from-zero division by 2^exponent.
std::int64_t rounding_shift_right(std::int64_t v, int exponent);

}  // namespace abpn

#endif  // ABPN_QUANT_PARAMS_H_
