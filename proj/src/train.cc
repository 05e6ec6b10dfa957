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

#include "abpn/train.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "abpn/autograd.h"

namespace abpn {
namespace {

// splitmix64 finalizer; used to derive independent per-sample seeds.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t sample_seed(std::uint64_t seed, std::int64_t step, int sample) {
  return mix(mix(mix(seed) ^ static_cast<std::uint64_t>(step)) ^
             static_cast<std::uint64_t>(sample));
}

Tensor crop(const Image& image, int y0, int x0, int size) {
  std::vector<float> data(std::size_t(size) * size * 3);
  for (int y = 0; y < size; ++y) {
    const std::uint8_t* row =
        image.pixels.data() + (std::size_t(y0 + y) * image.width + x0) * 3;
    std::copy(row, row + std::size_t(size) * 3, data.begin() + std::size_t(y) * size * 3);
  }
  return Tensor(Shape(1, size, size, 3), std::move(data));
}

Tensor stack(std::span<const Tensor> items) {
  const Shape& s0 = items[0].shape();
  std::vector<float> data;
  data.reserve(s0.size() * items.size());
  for (const auto& t : items) {
    data.insert(data.end(), t.data().begin(), t.data().end());
  }
  return Tensor(Shape(std::int64_t(items.size()), s0.h, s0.w, s0.c),
                std::move(data));
}

}  // namespace

void TrainConfig::validate() const {
  check(batch_size >= 1, ErrorKind::kConfig, "batch_size must be >= 1");
  check(lr0 >= 0.0, ErrorKind::kConfig, "lr0 must be >= 0");
  check(decay_every >= 1, ErrorKind::kConfig, "decay_every must be >= 1");
  check(decay_factor > 0.0, ErrorKind::kConfig, "decay_factor must be > 0");
  check(total_epochs >= 1, ErrorKind::kConfig, "total_epochs must be >= 1");
  check(beta1 > 0.0 && beta1 < 1.0 && beta2 > 0.0 && beta2 < 1.0,
        ErrorKind::kConfig, "ADAM betas must be in (0, 1)");
  check(eps > 0.0, ErrorKind::kConfig, "eps must be > 0");
  check(patch_size >= 1, ErrorKind::kConfig, "patch_size must be >= 1");
  check(steps_per_epoch >= 0, ErrorKind::kConfig,
        "steps_per_epoch must be >= 0");
}

TrainConfig qat_defaults() {
  TrainConfig cfg;
  cfg.lr0 = 1e-4;
  cfg.decay_every = 50;
  cfg.total_epochs = 200;
  return cfg;
}

std::string format_loss_log(std::span<const LossLogEntry> log) {
  std::ostringstream os;
  os << "epoch,step,lr,loss\n";
  char buf[128];
  for (const auto& e : log) {
    std::snprintf(buf, sizeof(buf), "%d,%lld,%.6g,%.6f\n", e.epoch,
                  static_cast<long long>(e.step), e.lr, e.loss);
    os << buf;
  }
  return os.str();
}

ConvWeights<float> he_init(int k, int cin, int cout, std::mt19937_64& rng) {
  ConvWeights<float> w(k, cin, cout);
  const double fan_in = double(k) * k * cin;
  std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / fan_in));
  for (auto& v : w.kernel) v = static_cast<float>(dist(rng));
  return w;
}

template <typename T>
void adam_update(std::span<T> params, std::span<const T> grads,
                 AdamMoments<T>& moments, std::int64_t t, double lr,
                 double beta1, double beta2, double eps) {
  check(params.size() == grads.size(), ErrorKind::kShape,
        "adam_update: parameter/gradient size mismatch");
  check(t >= 1, ErrorKind::kUsage, "adam_update: step must be >= 1");
  if (moments.m.size() != params.size()) {
    moments.m.assign(params.size(), T(0));
    moments.v.assign(params.size(), T(0));
  }
  const double c1 = 1.0 - std::pow(beta1, double(t));
  const double c2 = 1.0 - std::pow(beta2, double(t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    const double m = beta1 * moments.m[i] + (1.0 - beta1) * g;
    const double v = beta2 * moments.v[i] + (1.0 - beta2) * g * g;
    moments.m[i] = T(m);
    moments.v[i] = T(v);
    const double m_hat = m / c1;
    const double v_hat = v / c2;
    params[i] = T(params[i] - lr * m_hat / (std::sqrt(v_hat) + eps));
  }
}

void adam_step(TrainState& state, ModelGraph& model,
               std::span<const ConvWeights<float>> grads, double lr,
               const TrainConfig& cfg) {
  check(grads.size() == model.layers.size(), ErrorKind::kShape,
        "adam_step: gradient count does not match layers");
  state.kernel.resize(model.layers.size());
  state.bias.resize(model.layers.size());
  ++state.step;
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    auto& layer = model.layers[i];
    adam_update<float>(layer.kernel, grads[i].kernel, state.kernel[i],
                       state.step, lr, cfg.beta1, cfg.beta2, cfg.eps);
    adam_update<float>(layer.bias, grads[i].bias, state.bias[i], state.step,
                       lr, cfg.beta1, cfg.beta2, cfg.eps);
  }
}

double lr_at(int epoch, const TrainConfig& cfg) {
  return cfg.lr0 * std::pow(cfg.decay_factor, epoch / cfg.decay_every);
}

template <typename T>
BasicTensor<T> dihedral(const BasicTensor<T>& x, int code) {
  check(code >= 0 && code < 8, ErrorKind::kInvalidArgument,
        "dihedral code must be in [0, 8)");
  const Shape& s = x.shape();
  const bool swap = code == 1 || code == 3 || code == 6 || code == 7;
  const Shape out_shape = swap ? Shape(s.n, s.w, s.h, s.c) : s;
  std::vector<T> out(out_shape.size());
  const std::int64_t H = s.h;
  const std::int64_t W = s.w;
  for (std::int64_t n = 0; n < s.n; ++n) {
    for (std::int64_t y = 0; y < out_shape.h; ++y) {
      for (std::int64_t px = 0; px < out_shape.w; ++px) {
        std::int64_t sy = y;
        std::int64_t sx = px;
        switch (code) {
          case 1: sy = H - 1 - px; sx = y; break;
          case 2: sy = H - 1 - y; sx = W - 1 - px; break;
          case 3: sy = px; sx = W - 1 - y; break;
          case 4: sx = W - 1 - px; break;
          case 5: sy = H - 1 - y; break;
          case 6: sy = px; sx = y; break;
          case 7: sy = H - 1 - px; sx = W - 1 - y; break;
          default: break;
        }
        const auto src = x.data().subspan(s.index(n, sy, sx, 0), std::size_t(s.c));
        std::copy(src.begin(), src.end(),
                  out.begin() + out_shape.index(n, y, px, 0));
      }
    }
  }
  return BasicTensor<T>(out_shape, std::move(out));
}

template Tensor dihedral(const Tensor&, int);
template TensorD dihedral(const TensorD&, int);

PatchPair augment(const Tensor& lr_patch, const Tensor& hr_patch, int code) {
  return PatchPair{dihedral(lr_patch, code), dihedral(hr_patch, code)};
}

int steps_per_epoch(std::span<const ImagePair> data, const TrainConfig& cfg) {
  if (cfg.steps_per_epoch > 0) return cfg.steps_per_epoch;
  std::int64_t pixels = 0;
  for (const auto& p : data) pixels += std::int64_t(p.lr.height) * p.lr.width;
  const std::int64_t per_step =
      std::int64_t(cfg.batch_size) * cfg.patch_size * cfg.patch_size;
  return static_cast<int>(std::max<std::int64_t>(1, (pixels + per_step - 1) / per_step));
}

PatchPair sample_batch(std::span<const ImagePair> data, int scale,
                       const TrainConfig& cfg, std::int64_t step) {
  std::vector<Tensor> lrs;
  std::vector<Tensor> hrs;
  const int p = cfg.patch_size;
  for (int b = 0; b < cfg.batch_size; ++b) {
    std::mt19937_64 rng(sample_seed(cfg.seed, step, b));
    std::uniform_int_distribution<std::size_t> pick(0, data.size() - 1);
    const ImagePair& pair = data[pick(rng)];
    std::uniform_int_distribution<int> ys(0, pair.lr.height - p);
    std::uniform_int_distribution<int> xs(0, pair.lr.width - p);
    const int y0 = ys(rng);
    const int x0 = xs(rng);
    Tensor lr = crop(pair.lr, y0, x0, p);
    Tensor hr = crop(pair.hr, y0 * scale, x0 * scale, p * scale);
    if (cfg.augment) {
      std::uniform_int_distribution<int> codes(0, 7);
      PatchPair aug = augment(lr, hr, codes(rng));
      lr = std::move(aug.lr);
      hr = std::move(aug.hr);
    }
    lrs.push_back(std::move(lr));
    hrs.push_back(std::move(hr));
  }
  return PatchPair{stack(lrs), stack(hrs)};
}

double loss_and_grads(const ModelGraph& model, const PatchPair& batch,
                      std::vector<ConvWeights<float>>& grads,
                      const ActivationParams* fake_quant) {
  GradTape<float> tape;
  TapeExec<float> ex(tape, model);
  ex.set_fake_quant(fake_quant);
  const auto out = run_graph(model.hyper, ex, tape.leaf(batch.lr));
  Tensor seed;
  const double loss = l1_loss(tape.value(out), batch.hr, &seed);
  tape.backward(out, seed);
  grads.clear();
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    grads.push_back(tape.param_grad(ex.param(int(i))));
  }
  return loss;
}

std::vector<LossLogEntry> train(ModelGraph& model,
                                std::span<const ImagePair> data,
                                const TrainConfig& cfg,
                                const TrainOptions& options) {
  cfg.validate();
  model.validate();
  check(!data.empty(), ErrorKind::kConfig, "training set is empty");
  const int s = model.hyper.scale;
  for (const auto& pair : data) {
    check_pair(pair, s);
    check(cfg.patch_size <= std::min(pair.lr.height, pair.lr.width),
          ErrorKind::kConfig,
          "patch size " + std::to_string(cfg.patch_size) + " (HR " +
              std::to_string(cfg.patch_size * s) + ") exceeds image '" +
              pair.name + "'");
  }
  TrainState state;
  std::vector<LossLogEntry> log;
  std::vector<ConvWeights<float>> grads;
  const int steps = steps_per_epoch(data, cfg);
  for (int epoch = 0; epoch < cfg.total_epochs; ++epoch) {
    state.epoch = epoch;
    const double lr = lr_at(epoch, cfg);
    double sum = 0.0;
    for (int i = 0; i < steps; ++i) {
      const PatchPair batch = sample_batch(data, s, cfg, state.step);
      sum += loss_and_grads(model, batch, grads, options.fake_quant);
      adam_step(state, model, grads, lr, cfg);
    }
    log.push_back(LossLogEntry{epoch, state.step, lr, sum / steps});
    if (options.on_epoch) options.on_epoch(log.back());
  }
  return log;
}

template void adam_update<float>(std::span<float>, std::span<const float>,
                                 AdamMoments<float>&, std::int64_t, double,
                                 double, double, double);
template void adam_update<double>(std::span<double>, std::span<const double>,
                                  AdamMoments<double>&, std::int64_t, double,
                                  double, double, double);

}  // namespace abpn
