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

#include "abpn/qat.h"

#include <random>

namespace abpn {

std::vector<Tensor> calibration_patches(std::span<const ImagePair> data,
                                        int count, int patch, std::uint64_t seed) {
  check(!data.empty(), ErrorKind::kInvalidArgument, "calibration data is empty");
  check(count >= 1 && patch >= 1, ErrorKind::kInvalidArgument,
        "calibration count and patch must be positive");
  std::mt19937_64 rng(seed);
  std::vector<Tensor> out;
  for (int i = 0; i < count; ++i) {
    const Image& lr = data[std::uniform_int_distribution<std::size_t>(
        0, data.size() - 1)(rng)].lr;
    check(lr.height >= patch && lr.width >= patch, ErrorKind::kConfig,
          "calibration patch larger than an LR image");
    const int y0 = std::uniform_int_distribution<int>(0, lr.height - patch)(rng);
    const int x0 = std::uniform_int_distribution<int>(0, lr.width - patch)(rng);
    std::vector<float> v(std::size_t(patch) * patch * 3);
    for (int y = 0; y < patch; ++y) {
      const std::uint8_t* row =
          lr.pixels.data() + (std::size_t(y0 + y) * lr.width + x0) * 3;
      std::copy(row, row + std::size_t(patch) * 3, v.begin() + std::size_t(y) * patch * 3);
    }
    out.emplace_back(Shape(1, patch, patch, 3), std::move(v));
  }
  return out;
}

std::vector<LossLogEntry> qat(ModelGraph& model, const CalibStats& stats,
                              std::span<const ImagePair> data,
                              const TrainConfig& cfg, const TrainOptions& options) {
  const ActivationParams params = activation_params_for(model.hyper, stats);
  TrainOptions opts = options;
  opts.fake_quant = &params;
  return train(model, data, cfg, opts);
}

QuantizedModel qat_quantize(ModelGraph& model, const CalibStats& stats,
                            std::span<const ImagePair> data,
                            const TrainConfig& cfg, const TrainOptions& options) {
  qat(model, stats, data, cfg, options);
  return ptq(model, stats);
}

}  // namespace abpn
