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

#ifndef ABPN_AUTOGRAD_H_
#define ABPN_AUTOGRAD_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "abpn/ops.h"
#include "abpn/tensor.h"

namespace abpn {

// Reverse-mode tape over the op vocabulary. Forward calls execute eagerly and
// record a node; backward() replays the nodes in exact reverse order.
//
// Parameters are registered by reference and must outlive the tape. A conv
// may run with "effective" weights (e.g. fake-quantized); the gradient then
// flows straight through to the registered parameter.
template <typename T>
class GradTape {
 public:
  using Var = std::size_t;
  using ParamId = std::size_t;

  ParamId register_param(const ConvWeights<T>& weights);

  Var leaf(BasicTensor<T> x);

  Var conv2d(Var x, ParamId p);
  Var conv2d(Var x, ParamId p, ConvWeights<T> effective);
  Var relu(Var x);
  Var leaky_relu(Var x, T alpha);
  Var add(Var a, Var b);
  Var multiply(Var a, Var b);
  Var channel_concat(std::span<const Var> parts);
  std::vector<Var> channel_split(Var x, std::span<const std::int64_t> sizes);
  Var global_max_pool(Var x);
  Var global_avg_pool(Var x);
  Var pixel_shuffle(Var x, int s);
  Var anchor_concat(Var x, int s);
  Var nearest_resize(Var x, int s);
  Var bilinear_resize(Var x, int s);
  Var clip_0_255(Var x);
  // Quantize-dequantize with the straight-through gradient: passes the
  // upstream gradient where x lies in [real_min, real_max], zero elsewhere.
  Var fake_quant(Var x, const QuantParams& qp);

  const BasicTensor<T>& value(Var v) const { return nodes_.at(v).value; }
  std::size_t size() const { return nodes_.size(); }

  // Seeds d(loss)/d(out) and propagates to every node and parameter. Resets
  // all gradients first, so each call yields exactly one gradient per
  // parameter.
  void backward(Var out, const BasicTensor<T>& grad_out);

  // Valid after backward().
  const ConvWeights<T>& param_grad(ParamId p) const;
  BasicTensor<T> grad(Var v) const;

 private:
  struct Node {
    BasicTensor<T> value;
    std::function<void(GradTape&, Var)> backward;
  };
  struct Param {
    const ConvWeights<T>* weights;
    ConvWeights<T> grad;
  };

  Var push(BasicTensor<T> value, std::function<void(GradTape&, Var)> backward);
  void accumulate(Var v, std::span<const T> g);
  BasicTensor<T> grad_tensor(Var v) const;
  const std::vector<T>& grad_vec(Var v) const { return grads_[v]; }

  std::vector<Node> nodes_;
  std::vector<std::vector<T>> grads_;
  std::vector<Param> params_;
  bool backward_done_ = false;
};

// Mean absolute error normalized by batch and per-sample element count:
// loss = sum |pred - target| / (N * elements). The gradient is
// sign(pred - target) / (N * elements) with sign(0) = 0.
template <typename T>
double l1_loss(const BasicTensor<T>& pred, const BasicTensor<T>& target,
               BasicTensor<T>* grad);

}  // namespace abpn

#endif  // ABPN_AUTOGRAD_H_
