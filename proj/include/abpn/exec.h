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

// Executors for run_graph(): eager float (optionally observed and/or
// fake-quantized) and taped float for training.

#ifndef ABPN_EXEC_H_
#define ABPN_EXEC_H_

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "abpn/autograd.h"
#include "abpn/model.h"
#include "abpn/ops.h"
#include "abpn/quant_params.h"
#include "abpn/tensor.h"

namespace abpn {

template <typename T>
class FloatExec {
 public:
  using Value = BasicTensor<T>;
  using Observer = std::function<void(std::string_view, const Value&)>;

  explicit FloatExec(const BasicModel<T>& model) : model_(model) {}

  void set_observer(Observer fn) { observer_ = std::move(fn); }
  void set_fake_quant(const ActivationParams* params) { fq_ = params; }

  Value input(Value x) { return finish(node::kInput, std::move(x)); }
  Value conv(const Value& x, int layer, bool with_relu, std::string_view name) {
    Value y = conv2d(x, model_.layers.at(layer));
    if (with_relu) y = relu(y);
    return finish(name, std::move(y));
  }
  Value add(const Value& a, const Value& b, std::string_view name) {
    return finish(name, abpn::add(a, b));
  }
  Value anchor(const Value& x, int s) { return anchor_concat(x, s); }
  Value nearest(const Value& x, int s) { return nearest_resize(x, s); }
  Value bilinear(const Value& x, int s, std::string_view name) {
    return finish(name, bilinear_resize(x, s));
  }
  Value pixel_shuffle(const Value& x, int s) { return abpn::pixel_shuffle(x, s); }
  Value clip(const Value& x, std::string_view name) {
    return finish(name, clip_0_255(x));
  }

 private:
  Value finish(std::string_view name, Value y) {
    if (observer_) observer_(name, y);
    if (fq_) {
      auto it = fq_->find(name);
      check(it != fq_->end(), ErrorKind::kUsage,
            "no quant params for node " + std::string(name));
      y = fake_quant(y, it->second);
    }
    return y;
  }

  const BasicModel<T>& model_;
  Observer observer_;
  const ActivationParams* fq_ = nullptr;
};

// Records the forward pass on a tape. With activation params set, every
// activation node and every conv weight tensor is fake-quantized with the
// straight-through gradient.
template <typename T>
class TapeExec {
 public:
  using Value = typename GradTape<T>::Var;

  TapeExec(GradTape<T>& tape, const BasicModel<T>& model) : tape_(tape) {
    for (const auto& l : model.layers) params_.push_back(tape.register_param(l));
    layers_ = &model.layers;
  }
  // Uses parameters already registered on `tape`, one id per layer.
  TapeExec(GradTape<T>& tape, const std::vector<ConvWeights<T>>& layers,
           std::vector<typename GradTape<T>::ParamId> ids)
      : tape_(tape), layers_(&layers), params_(std::move(ids)) {
    check(params_.size() == layers.size(), ErrorKind::kUsage,
          "one parameter id per layer required");
  }

  void set_fake_quant(const ActivationParams* params) { fq_ = params; }
  typename GradTape<T>::ParamId param(int layer) const { return params_.at(layer); }

  Value input(Value x) { return finish(node::kInput, x); }
  Value conv(Value x, int layer, bool with_relu, std::string_view name) {
    Value y{};
    if (fq_) {
      const ConvWeights<T>& w = layers_->at(layer);
      ConvWeights<T> eff = w;
      const QuantParams qp = weight_params(std::span<const T>(w.kernel));
      for (auto& v : eff.kernel) {
        v = T(dequantize_value(quantize_value(v, qp), qp));
      }
      y = tape_.conv2d(x, params_.at(layer), std::move(eff));
    } else {
      y = tape_.conv2d(x, params_.at(layer));
    }
    if (with_relu) y = tape_.relu(y);
    return finish(name, y);
  }
  Value add(Value a, Value b, std::string_view name) {
    return finish(name, tape_.add(a, b));
  }
  Value anchor(Value x, int s) { return tape_.anchor_concat(x, s); }
  Value nearest(Value x, int s) { return tape_.nearest_resize(x, s); }
  Value bilinear(Value x, int s, std::string_view name) {
    return finish(name, tape_.bilinear_resize(x, s));
  }
  Value pixel_shuffle(Value x, int s) { return tape_.pixel_shuffle(x, s); }
  Value clip(Value x, std::string_view name) {
    return finish(name, tape_.clip_0_255(x));
  }

 private:
  Value finish(std::string_view name, Value y) {
    if (!fq_) return y;
    auto it = fq_->find(name);
    check(it != fq_->end(), ErrorKind::kUsage,
          "no quant params for node " + std::string(name));
    return tape_.fake_quant(y, it->second);
  }

  GradTape<T>& tape_;
  const std::vector<ConvWeights<T>>* layers_ = nullptr;
  std::vector<typename GradTape<T>::ParamId> params_;
  const ActivationParams* fq_ = nullptr;
};

}  // namespace abpn

#endif  // ABPN_EXEC_H_
