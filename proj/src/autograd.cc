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

#include "abpn/autograd.h"

#include <cmath>
#include <memory>

namespace abpn {

template <typename T>
typename GradTape<T>::ParamId GradTape<T>::register_param(
    const ConvWeights<T>& weights) {
  weights.validate();
  params_.push_back(
      Param{&weights, ConvWeights<T>(weights.k, weights.cin, weights.cout)});
  return params_.size() - 1;
}

template <typename T>
typename GradTape<T>::Var GradTape<T>::push(
    BasicTensor<T> value, std::function<void(GradTape&, Var)> backward) {
  nodes_.push_back(Node{std::move(value), std::move(backward)});
  backward_done_ = false;
  return nodes_.size() - 1;
}

template <typename T>
void GradTape<T>::accumulate(Var v, std::span<const T> g) {
  auto& dst = grads_[v];
  if (dst.empty()) {
    dst.assign(g.begin(), g.end());
    return;
  }
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += g[i];
}

template <typename T>
BasicTensor<T> GradTape<T>::grad_tensor(Var v) const {
  const auto& g = grads_[v];
  if (g.empty()) return BasicTensor<T>(nodes_[v].value.shape());
  return BasicTensor<T>(nodes_[v].value.shape(), g);
}

template <typename T>
typename GradTape<T>::Var GradTape<T>::leaf(BasicTensor<T> x) {
  return push(std::move(x), nullptr);
}

template <typename T>
typename GradTape<T>::Var GradTape<T>::conv2d(Var x, ParamId p) {
  check(p < params_.size(), ErrorKind::kUsage, "unknown parameter id");
  const ConvWeights<T>* w = params_[p].weights;
  return push(abpn::conv2d(value(x), *w), [x, p](GradTape& t, Var self) {
    Param& param = t.params_[p];
    auto gx = conv2d_backward(t.value(x), *param.weights, t.grad_tensor(self),
                              param.grad);
    t.accumulate(x, gx.data());
  });
}

template <typename T>
typename GradTape<T>::Var GradTape<T>::conv2d(Var x, ParamId p,
                                              ConvWeights<T> effective) {
  check(p < params_.size(), ErrorKind::kUsage, "unknown parameter id");
  const ConvWeights<T>* w = params_[p].weights;
  check(effective.k == w->k && effective.cin == w->cin &&
            effective.cout == w->cout,
        ErrorKind::kShape, "effective weights do not match parameter");
  auto eff = std::make_shared<const ConvWeights<T>>(std::move(effective));
  return push(abpn::conv2d(value(x), *eff), [x, p, eff](GradTape& t, Var self) {
    auto gx =
        conv2d_backward(t.value(x), *eff, t.grad_tensor(self), t.params_[p].grad);
    t.accumulate(x, gx.data());
  });
}

template <typename T>
typename GradTape<T>::Var GradTape<T>::relu(Var x) {
  return push(abpn::relu(value(x)), [x](GradTape& t, Var self) {
    const auto in = t.value(x).data();
    std::vector<T> g = t.grad_vec(self);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!(in[i] > T(0))) g[i] = T(0);
    }
    t.accumulate(x, g);
  });
}

template <typename T>
typename GradTape<T>::Var GradTape<T>::leaky_relu(Var x, T alpha) {
  return push(abpn::leaky_relu(value(x), alpha), [x, alpha](GradTape& t, Var self) {
    const auto in = t.value(x).data();
    std::vector<T> g = t.grad_vec(self);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (in[i] < T(0)) g[i] *= alpha;
    }
    t.accumulate(x, g);
  });
}

template <typename T>
typename GradTape<T>::Var GradTape<T>::add(Var a, Var b) {
  return push(abpn::add(value(a), value(b)), [a, b](GradTape& t, Var self) {
    const std::vector<T> g = t.grad_vec(self);
    t.accumulate(a, g);
    t.accumulate(b, g);
  });
}

template <typename T>
typename GradTape<T>::Var GradTape<T>::multiply(Var a, Var b) {
  return push(abpn::multiply(value(a), value(b)), [a, b](GradTape& t, Var self) {
    const std::vector<T> g = t.grad_vec(self);
    const auto va = t.value(a).data();
    const auto vb = t.value(b).data();
    std::vector<T> ga(g.size());
    std::vector<T> gb(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      ga[i] = g[i] * vb[i];
      gb[i] = g[i] * va[i];
    }
    t.accumulate(a, ga);
    t.accumulate(b, gb);
  });
}

template <typename T>
typename GradTape<T>::Var GradTape<T>::channel_concat(std::span<const Var> parts) {
  std::vector<BasicTensor<T>> values;
  std::vector<std::int64_t> sizes;
  for (Var p : parts) {
    values.push_back(value(p));
    sizes.push_back(value(p).shape().c);
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return push(abpn::channel_concat<T>(values),
              [inputs, sizes](GradTape& t, Var self) {
                auto pieces = abpn::channel_split(t.grad_tensor(self),
                                                  std::span<const std::int64_t>(sizes));
                for (std::size_t i = 0; i < inputs.size(); ++i) {
                  t.accumulate(inputs[i], pieces[i].data());
                }
              });
}

template <typename T>
std::vector<typename GradTape<T>::Var> GradTape<T>::channel_split(
    Var x, std::span<const std::int64_t> sizes) {
  auto pieces = abpn::channel_split(value(x), sizes);
  std::vector<Var> out;
  std::int64_t offset = 0;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const std::int64_t count = sizes[i];
    out.push_back(push(std::move(pieces[i]), [x, offset, count](GradTape& t,
                                                                Var self) {
      const Shape& in = t.value(x).shape();
      const auto g = t.grad_vec(self);
      std::vector<T> full(in.size(), T(0));
      const std::int64_t pixels = in.n * in.h * in.w;
      for (std::int64_t p = 0; p < pixels; ++p) {
        for (std::int64_t c = 0; c < count; ++c) {
          full[p * in.c + offset + c] = g[p * count + c];
        }
      }
      t.accumulate(x, full);
    }));
    offset += count;
  }
  return out;
}

template <typename T>
typename GradTape<T>::Var GradTape<T>::global_max_pool(Var x) {
  return push(abpn::global_max_pool(value(x)), [x](GradTape& t, Var self) {
    // Ties route the gradient to the first maximal position.
    const BasicTensor<T>& in = t.value(x);
    const Shape& s = in.shape();
    const auto g = t.grad_vec(self);
    const auto pooled = t.value(self).data();
    std::vector<T> full(s.size(), T(0));
    for (std::int64_t n = 0; n < s.n; ++n) {
      for (std::int64_t c = 0; c < s.c; ++c) {
        for (std::int64_t p = 0; p < s.h * s.w; ++p) {
          const std::size_t idx = std::size_t((n * s.h * s.w + p) * s.c + c);
          if (in[idx] == pooled[n * s.c + c]) {
            full[idx] = g[n * s.c + c];
            break;
          }
        }
      }
    }
    t.accumulate(x, full);
  });
}

template <typename T>
typename GradTape<T>::Var GradTape<T>::global_avg_pool(Var x) {
  return push(abpn::global_avg_pool(value(x)), [x](GradTape& t, Var self) {
    const Shape& s = t.value(x).shape();
    const auto g = t.grad_vec(self);
    const T inv = T(1) / T(s.h * s.w);
    std::vector<T> full(s.size());
    for (std::int64_t n = 0; n < s.n; ++n) {
      for (std::int64_t p = 0; p < s.h * s.w; ++p) {
        for (std::int64_t c = 0; c < s.c; ++c) {
          full[(n * s.h * s.w + p) * s.c + c] = g[n * s.c + c] * inv;
        }
      }
    }
    t.accumulate(x, full);
  });
}

template <typename T>
typename GradTape<T>::Var GradTape<T>::pixel_shuffle(Var x, int s) {
  return push(abpn::pixel_shuffle(value(x), s), [x, s](GradTape& t, Var self) {
    t.accumulate(x, space_to_depth(t.grad_tensor(self), s).data());
  });
}

template <typename T>
typename GradTape<T>::Var GradTape<T>::anchor_concat(Var x, int s) {
  return push(abpn::anchor_concat(value(x), s), [x, s](GradTape& t, Var self) {
    t.accumulate(x, anchor_concat_backward(t.grad_tensor(self), s).data());
  });
}

template <typename T>
typename GradTape<T>::Var GradTape<T>::nearest_resize(Var x, int s) {
  return push(abpn::nearest_resize(value(x), s), [x, s](GradTape& t, Var self) {
    t.accumulate(x, nearest_resize_backward(t.grad_tensor(self), s).data());
  });
}

template <typename T>
typename GradTape<T>::Var GradTape<T>::bilinear_resize(Var x, int s) {
  return push(abpn::bilinear_resize(value(x), s), [x, s](GradTape& t, Var self) {
    t.accumulate(x, bilinear_resize_backward(t.grad_tensor(self),
                                             t.value(x).shape(), s)
                        .data());
  });
}

template <typename T>
typename GradTape<T>::Var GradTape<T>::clip_0_255(Var x) {
  return push(abpn::clip_0_255(value(x)), [x](GradTape& t, Var self) {
    const auto in = t.value(x).data();
    std::vector<T> g = t.grad_vec(self);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!(in[i] > T(0) && in[i] < T(255))) g[i] = T(0);
    }
    t.accumulate(x, g);
  });
}

template <typename T>
typename GradTape<T>::Var GradTape<T>::fake_quant(Var x, const QuantParams& qp) {
  qp.validate();
  const BasicTensor<T>& in = value(x);
  std::vector<T> out(in.size());
  const auto src = in.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = T(dequantize_value(quantize_value(src[i], qp), qp));
  }
  const T lo = T(qp.real_min());
  const T hi = T(qp.real_max());
  return push(BasicTensor<T>(in.shape(), std::move(out)),
              [x, lo, hi](GradTape& t, Var self) {
                const auto v = t.value(x).data();
                std::vector<T> g = t.grad_vec(self);
                for (std::size_t i = 0; i < g.size(); ++i) {
                  if (v[i] < lo || v[i] > hi) g[i] = T(0);
                }
                t.accumulate(x, g);
              });
}

template <typename T>
void GradTape<T>::backward(Var out, const BasicTensor<T>& grad_out) {
  check(!nodes_.empty() && out < nodes_.size(), ErrorKind::kUsage,
        "backward called without a recorded forward pass");
  check(grad_out.shape() == nodes_[out].value.shape(), ErrorKind::kShape,
        "backward: seed gradient shape mismatch");
  grads_.assign(nodes_.size(), {});
  for (auto& p : params_) {
    std::fill(p.grad.kernel.begin(), p.grad.kernel.end(), T(0));
    std::fill(p.grad.bias.begin(), p.grad.bias.end(), T(0));
  }
  accumulate(out, grad_out.data());
  for (Var v = out + 1; v-- > 0;) {
    if (grads_[v].empty() || !nodes_[v].backward) continue;
    nodes_[v].backward(*this, v);
  }
  backward_done_ = true;
}

template <typename T>
const ConvWeights<T>& GradTape<T>::param_grad(ParamId p) const {
  check(backward_done_, ErrorKind::kUsage,
        "param_grad requested before backward()");
  return params_.at(p).grad;
}

template <typename T>
BasicTensor<T> GradTape<T>::grad(Var v) const {
  check(backward_done_, ErrorKind::kUsage, "grad requested before backward()");
  return grad_tensor(v);
}

template <typename T>
double l1_loss(const BasicTensor<T>& pred, const BasicTensor<T>& target,
               BasicTensor<T>* grad) {
  check(pred.shape() == target.shape(), ErrorKind::kShape,
        "l1_loss: shape mismatch " + pred.shape().to_string() + " vs " +
            target.shape().to_string());
  const double denom = static_cast<double>(pred.size());
  const auto p = pred.data();
  const auto q = target.data();
  double sum = 0.0;
  std::vector<T> g(grad ? pred.size() : 0);
  const T unit = T(1.0 / denom);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = static_cast<double>(p[i]) - static_cast<double>(q[i]);
    sum += std::abs(d);
    if (grad) g[i] = d > 0 ? unit : (d < 0 ? -unit : T(0));
  }
  if (grad) *grad = BasicTensor<T>(pred.shape(), std::move(g));
  return sum / denom;
}

template class GradTape<float>;
template class GradTape<double>;
template double l1_loss(const Tensor&, const Tensor&, Tensor*);
template double l1_loss(const TensorD&, const TensorD&, TensorD*);

}  // namespace abpn
