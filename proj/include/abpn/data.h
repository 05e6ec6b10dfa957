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

#ifndef ABPN_DATA_H_
#define ABPN_DATA_H_

#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "abpn/tensor.h"

namespace abpn {

struct ImagePair {
  std::string name;
  Image lr;
  Image hr;
};

// 8-bit RGB PNG only. Alpha, grayscale and 16-bit files are rejected.
Image read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Image& image);

struct PairedDataset {
  struct Entry {
    std::string stem;
    std::filesystem::path lr;
    std::filesystem::path hr;
  };
  std::vector<Entry> pairs;
  int scale = 3;

  // Decodes every pair, in list order.
  std::vector<ImagePair> load_images() const;
};

// Matches <lr_dir>/*.png with <hr_dir>/*.png by stem, sorted
// lexicographically, and checks hr dims == scale * lr dims.
PairedDataset load_dataset(const std::filesystem::path& lr_dir,
                           const std::filesystem::path& hr_dir, int scale);
// <root>/LR and <root>/HR.
PairedDataset load_dataset(const std::filesystem::path& root, int scale);

void check_pair(const ImagePair& pair, int scale);

// Non-overlapping s x s block means.
template <typename T>
BasicTensor<T> downscale_box(const BasicTensor<T>& hr, int s);

inline constexpr double kPsnrInfinity = std::numeric_limits<double>::infinity();

// 20 log10(255 / sqrt(MSE)) over all pixels and channels; identical images
// give +inf.
double psnr_rgb(const Image& a, const Image& b);
// "inf" for the identical-image sentinel, else fixed with 2 decimals.
std::string format_psnr(double db);

Image nearest_upsample(const Image& lr, int s);

// Smooth random colour fields with soft-edged shapes, box-downscaled to LR.
// HR sides are hr_size; LR sides are hr_size / scale.
std::vector<ImagePair> make_synthetic_pairs(int count, int hr_size, int scale,
                                            std::uint64_t seed);

// Writes <root>/LR/<name>.png and <root>/HR/<name>.png.
void write_dataset(const std::filesystem::path& root,
                   std::span<const ImagePair> pairs);

}  // namespace abpn

#endif  // ABPN_DATA_H_
