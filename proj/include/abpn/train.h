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

#ifndef ABPN_TRAIN_H_
#define ABPN_TRAIN_H_

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "abpn/data.h"
#include "abpn/exec.h"
#include "abpn/model.h"
#include "abpn/ops.h"

namespace abpn {

struct TrainConfig {
  int batch_size = 16;
  double lr0 = 1e-3;
  int decay_every = 200;
  double decay_factor = 0.5;
  int total_epochs = 1000;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int patch_size = 64;  // LR side
  std::uint64_t seed = 0;
  // 0 derives ceil(total LR pixels / (batch * patch^2)).
  int steps_per_epoch = 0;
  bool augment = true;

  void validate() const;
};

// Quantization-aware fine-tuning schedule defaults.
TrainConfig qat_defaults();

template <typename T>
struct AdamMoments {
  std::vector<T> m;
  std::vector<T> v;
};

struct TrainState {
  std::vector<AdamMoments<float>> kernel;
  std::vector<AdamMoments<float>> bias;
  std::int64_t step = 0;  // ADAM t; incremented before each update
  int epoch = 0;
};

struct LossLogEntry {
  int epoch = 0;
  std::int64_t step = 0;
  double lr = 0.0;
  double loss = 0.0;
};

// "epoch,step,lr,loss" lines with a header.
std::string format_loss_log(std::span<const LossLogEntry> log);

ConvWeights<float> he_init(int k, int cin, int cout, std::mt19937_64& rng);

// One bias-corrected ADAM update of `params` in place. `t` is the 1-based
// step number.
template <typename T>
void adam_update(std::span<T> params, std::span<const T> grads,
                 AdamMoments<T>& moments, std::int64_t t, double lr,
                 double beta1, double beta2, double eps);

// Applies adam_update to every layer; increments state.step.
void adam_step(TrainState& state, ModelGraph& model,
               std::span<const ConvWeights<float>> grads, double lr,
               const TrainConfig& cfg);

// lr0 * factor^floor(epoch / decay_every).
double lr_at(int epoch, const TrainConfig& cfg);

// Dihedral transform of a (N, H, W, C) tensor. Codes: 0 identity, 1 rot90,
// 2 rot180, 3 rot270, 4 horizontal flip, 5 vertical flip, 6 transpose,
// 7 anti-transpose.
template <typename T>
BasicTensor<T> dihedral(const BasicTensor<T>& x, int code);

struct PatchPair {
  Tensor lr;
  Tensor hr;
};
PatchPair augment(const Tensor& lr_patch, const Tensor& hr_patch, int code);

int steps_per_epoch(std::span<const ImagePair> data, const TrainConfig& cfg);

// Assembles the batch for global step `step`. Every sample draws from its own
// generator seeded by (seed, step, sample index).
PatchPair sample_batch(std::span<const ImagePair> data, int scale,
                       const TrainConfig& cfg, std::int64_t step);

struct TrainOptions {
  // Fake-quantize activations with these frozen params and weights with a
  // per-step symmetric scale.
  const ActivationParams* fake_quant = nullptr;
  // Called once per epoch with the log entry.
  std::function<void(const LossLogEntry&)> on_epoch;
};

// Runs cfg.total_epochs of patch-based L1 training with ADAM. Returns one log
// entry per epoch (mean loss of its steps).
std::vector<LossLogEntry> train(ModelGraph& model,
                                std::span<const ImagePair> data,
                                const TrainConfig& cfg,
                                const TrainOptions& options = {});

// One forward/backward pass on a batch; returns the loss and fills grads.
double loss_and_grads(const ModelGraph& model, const PatchPair& batch,
                      std::vector<ConvWeights<float>>& grads,
                      const ActivationParams* fake_quant = nullptr);

}  // namespace abpn

#endif  // ABPN_TRAIN_H_
