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

#ifndef ABPN_QAT_H_
#define ABPN_QAT_H_

#include <cstdint>
#include <span>
#include <vector>

#include "abpn/data.h"
#include "abpn/quant.h"
#include "abpn/train.h"

namespace abpn {

// `count` random LR patches of side `patch` (seeded), for calibration.
std::vector<Tensor> calibration_patches(std::span<const ImagePair> data,
                                        int count, int patch, std::uint64_t seed);

// Fine-tunes `model` in place with fake quantization: weights use a
// per-step symmetric scale, activations the ranges frozen from `stats`.
// Biases stay float during training and are quantized afterwards.
std::vector<LossLogEntry> qat(ModelGraph& model, const CalibStats& stats,
                              std::span<const ImagePair> data,
                              const TrainConfig& cfg = qat_defaults(),
                              const TrainOptions& options = {});

// qat() followed by ptq() with the same frozen activation params.
QuantizedModel qat_quantize(ModelGraph& model, const CalibStats& stats,
                            std::span<const ImagePair> data,
                            const TrainConfig& cfg = qat_defaults(),
                            const TrainOptions& options = {});

}  // namespace abpn

#endif  // ABPN_QAT_H_
