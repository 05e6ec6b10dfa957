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

// Residual-learning ablation: trains every wiring variant under one config,
// quantizes each, and tabulates FP32 / INT8 PSNR.

#ifndef ABPN_ABLATION_H_
#define ABPN_ABLATION_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "abpn/data.h"
#include "abpn/model.h"
#include "abpn/quant.h"
#include "abpn/train.h"

namespace abpn {

// Mean PSNR over a paired set.
double evaluate_float(const ModelGraph& model, std::span<const ImagePair> data);
double evaluate_int8(const QuantizedModel& model, std::span<const ImagePair> data);
double evaluate_nearest(std::span<const ImagePair> data, int scale);

struct AblationConfig {
  Hyper hyper;  // variant field ignored
  TrainConfig train;
  std::vector<std::uint64_t> seeds{0, 1, 2};
  std::vector<Variant> variants{std::begin(kAllVariants), std::end(kAllVariants)};
  int calib_patches = 16;
  int calib_patch_size = 16;
  // Runs QAT after PTQ when > 0.
  int qat_epochs = 0;
  TrainConfig qat;
};

// Desk-scale defaults: 50 epochs of 16-pixel patches.
AblationConfig desk_ablation_config();

struct AblationRun {
  std::uint64_t seed = 0;
  double fp32 = 0.0;
  double int8 = 0.0;
  double qat_int8 = 0.0;  // NaN when QAT was not run
  double drop() const { return fp32 - int8; }
};

struct AblationRow {
  Variant variant = Variant::kBaseline;
  std::int64_t params = 0;
  std::vector<AblationRun> runs;
  double median_fp32() const;
  double median_int8() const;
  double median_drop() const;
  double median_qat_gain() const;  // median of (qat_int8 - int8)
};

struct AblationReport {
  std::vector<AblationRow> rows;
  double nearest_psnr = 0.0;
  bool has_qat = false;
};

using AblationProgress = std::function<void(const std::string&)>;

AblationReport run_ablation(const AblationConfig& cfg,
                            std::span<const ImagePair> train_set,
                            std::span<const ImagePair> val_set,
                            const AblationProgress& progress = {});

const AblationRow& find_row(const AblationReport& report, Variant v);

// Table in variant order plus the parameter-count footnote.
std::string render(const AblationReport& report);

double median(std::vector<double> v);

}  // namespace abpn

#endif  // ABPN_ABLATION_H_
