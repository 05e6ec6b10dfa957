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

#ifndef ABPN_OPS_H_
#define ABPN_OPS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "abpn/tensor.h"

namespace abpn {

// Square convolution filter bank. Kernel layout is (ky, kx, cin, cout) with
// cout minor, so the kernel is a row-major (k*k*cin) x cout matrix.
template <typename T>
struct ConvWeights {
  int k = 3;
  int cin = 1;
  int cout = 1;
  std::vector<T> kernel;
  std::vector<T> bias;

  ConvWeights() = default;
  ConvWeights(int k_, int cin_, int cout_)
      : k(k_), cin(cin_), cout(cout_),
        kernel(std::size_t(k_) * k_ * cin_ * cout_, T(0)),
        bias(std::size_t(cout_), T(0)) {}

  std::size_t kernel_index(int ky, int kx, int i, int o) const {
    return ((std::size_t(ky) * k + kx) * cin + i) * cout + o;
  }
  std::size_t param_count() const { return kernel.size() + bias.size(); }

  void validate() const;

  template <typename U>
  ConvWeights<U> cast() const {
    ConvWeights<U> out;
    out.k = k;
    out.cin = cin;
    out.cout = cout;
    out.kernel.assign(kernel.begin(), kernel.end());
    out.bias.assign(bias.begin(), bias.end());
    return out;
  }

  friend bool operator==(const ConvWeights&, const ConvWeights&) = default;
};

// Stride-1 convolution with "same" zero padding.
template <typename T>
BasicTensor<T> conv2d(const BasicTensor<T>& x, const ConvWeights<T>& w);

// Gradients of conv2d. grad_w / grad_b are accumulated (+=), grad_x is
// returned.
template <typename T>
BasicTensor<T> conv2d_backward(const BasicTensor<T>& x,
                               const ConvWeights<T>& w,
                               const BasicTensor<T>& grad_out,
                               ConvWeights<T>& grad_w);

template <typename T>
BasicTensor<T> relu(const BasicTensor<T>& x);

template <typename T>
BasicTensor<T> leaky_relu(const BasicTensor<T>& x, T alpha = T(0.01));

template <typename T>
BasicTensor<T> add(const BasicTensor<T>& a, const BasicTensor<T>& b);

template <typename T>
BasicTensor<T> multiply(const BasicTensor<T>& a, const BasicTensor<T>& b);

template <typename T>
BasicTensor<T> channel_concat(std::span<const BasicTensor<T>> parts);

template <typename T>
std::vector<BasicTensor<T>> channel_split(const BasicTensor<T>& x,
                                          std::span<const std::int64_t> sizes);

// Channels [offset, offset + count) of x.
template <typename T>
BasicTensor<T> channel_slice(const BasicTensor<T>& x, std::int64_t offset,
                             std::int64_t count);

template <typename T>
BasicTensor<T> global_max_pool(const BasicTensor<T>& x);

template <typename T>
BasicTensor<T> global_avg_pool(const BasicTensor<T>& x);

// Channel-last depth-to-space: out(n, y, x, o) =
//   in(n, y/s, x/s, (y%s)*s*C + (x%s)*C + o), with C = in.c / s^2.
template <typename T>
BasicTensor<T> pixel_shuffle(const BasicTensor<T>& x, int s);

// Exact inverse of pixel_shuffle.
template <typename T>
BasicTensor<T> space_to_depth(const BasicTensor<T>& x, int s);

// Repeats the pixel vector s^2 times along channels: output channel j*c + i
// holds input channel i. pixel_shuffle(anchor_concat(x, s), s) is exactly
// nearest_resize(x, s).
template <typename T>
BasicTensor<T> anchor_concat(const BasicTensor<T>& x, int s);

// Sums the s^2 anchor copies back onto the c input channels.
template <typename T>
BasicTensor<T> anchor_concat_backward(const BasicTensor<T>& grad_out, int s);

template <typename T>
BasicTensor<T> nearest_resize(const BasicTensor<T>& x, int s);

template <typename T>
BasicTensor<T> nearest_resize_backward(const BasicTensor<T>& grad_out, int s);

// Bilinear tap on one axis for integer scale s under half-pixel centers.
// The source coordinate is u = (dst + 0.5) / s - 0.5 clamped to [0, n - 1];
// it is represented exactly as lo + frac_num / (2 s).
struct BilinearTap {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  std::int64_t frac_num = 0;  // in [0, 2s)
};
BilinearTap bilinear_tap(std::int64_t dst, std::int64_t src_extent, int s);

template <typename T>
BasicTensor<T> bilinear_resize(const BasicTensor<T>& x, int s);

template <typename T>
BasicTensor<T> bilinear_resize_backward(const BasicTensor<T>& grad_out,
                                        const Shape& in_shape, int s);

template <typename T>
BasicTensor<T> clip_0_255(const BasicTensor<T>& x);

}  // namespace abpn

#endif  // ABPN_OPS_H_
