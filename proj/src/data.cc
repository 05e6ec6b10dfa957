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

#include "abpn/data.h"

#include "abpn/ops.h"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <random>

namespace abpn {
namespace fs = std::filesystem;
namespace {

struct PngHeader {
  int width = 0;
  int height = 0;
};

// Opens a PNG with libpng's simplified API and validates the format.
// On success `image` is ready for png_image_finish_read.
void begin_read(const fs::path& path, png_image& image) {
  image = {};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    const std::string msg = image.message;
    png_image_free(&image);
    fail(ErrorKind::kIo, "cannot read PNG " + path.string() + ": " + msg);
  }
  const auto format = image.format;
  std::string reason;
  if (format & PNG_FORMAT_FLAG_ALPHA) {
    reason = "has an alpha channel";
  } else if (!(format & PNG_FORMAT_FLAG_COLOR)) {
    reason = "is not RGB";
  } else if (format & PNG_FORMAT_FLAG_LINEAR) {
    reason = "is not 8-bit";
  }
  if (!reason.empty()) {
    png_image_free(&image);
    fail(ErrorKind::kFormat, path.string() + " " + reason +
                                 " (only 8-bit RGB PNG is supported)");
  }
}

PngHeader read_header(const fs::path& path) {
  png_image image;
  begin_read(path, image);
  PngHeader h{static_cast<int>(image.width), static_cast<int>(image.height)};
  png_image_free(&image);
  return h;
}

std::map<std::string, fs::path> list_pngs(const fs::path& dir) {
  check(fs::is_directory(dir), ErrorKind::kIo,
        "dataset directory not found: " + dir.string());
  std::map<std::string, fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
    if (ext != ".png") continue;
    out.emplace(entry.path().stem().string(), entry.path());
  }
  return out;
}

double smoothstep(double e0, double e1, double x) {
  const double t = std::clamp((x - e0) / (e1 - e0), 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

}  // namespace

Image read_png(const fs::path& path) {
  png_image image;
  begin_read(path, image);
  image.format = PNG_FORMAT_RGB;
  Image out(static_cast<int>(image.height), static_cast<int>(image.width));
  if (!png_image_finish_read(&image, nullptr, out.pixels.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    fail(ErrorKind::kIo, "cannot decode PNG " + path.string() + ": " + msg);
  }
  return out;
}

void write_png(const fs::path& path, const Image& image) {
  check(image.pixels.size() == std::size_t(image.height) * image.width * 3,
        ErrorKind::kShape, "image pixel buffer size mismatch");
  png_image png = {};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width);
  png.height = static_cast<png_uint_32>(image.height);
  png.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&png, path.c_str(), 0, image.pixels.data(), 0,
                               nullptr)) {
    const std::string msg = png.message;
    png_image_free(&png);
    fail(ErrorKind::kIo, "cannot write PNG " + path.string() + ": " + msg);
  }
}

std::vector<ImagePair> PairedDataset::load_images() const {
  std::vector<ImagePair> out;
  out.reserve(pairs.size());
  for (const auto& e : pairs) {
    ImagePair p{e.stem, read_png(e.lr), read_png(e.hr)};
    check_pair(p, scale);
    out.push_back(std::move(p));
  }
  return out;
}

PairedDataset load_dataset(const fs::path& lr_dir, const fs::path& hr_dir,
                           int scale) {
  check(scale >= 1, ErrorKind::kInvalidArgument, "scale must be >= 1");
  const auto lrs = list_pngs(lr_dir);
  const auto hrs = list_pngs(hr_dir);
  for (const auto& [stem, path] : lrs) {
    check(hrs.count(stem) == 1, ErrorKind::kConfig,
          "unmatched stem '" + stem + "': " + path.string() +
              " has no HR counterpart");
  }
  for (const auto& [stem, path] : hrs) {
    check(lrs.count(stem) == 1, ErrorKind::kConfig,
          "unmatched stem '" + stem + "': " + path.string() +
              " has no LR counterpart");
  }
  check(!lrs.empty(), ErrorKind::kConfig,
        "no PNG pairs found in " + lr_dir.string());
  PairedDataset ds;
  ds.scale = scale;
  for (const auto& [stem, lr_path] : lrs) {
    const fs::path& hr_path = hrs.at(stem);
    const PngHeader lh = read_header(lr_path);
    const PngHeader hh = read_header(hr_path);
    check(hh.width == lh.width * scale && hh.height == lh.height * scale,
          ErrorKind::kConfig,
          "dimension mismatch for '" + stem + "': HR " +
              std::to_string(hh.width) + "x" + std::to_string(hh.height) +
              " is not " + std::to_string(scale) + "x LR " +
              std::to_string(lh.width) + "x" + std::to_string(lh.height) +
              " (" + hr_path.string() + ")");
    ds.pairs.push_back({stem, lr_path, hr_path});
  }
  return ds;
}

PairedDataset load_dataset(const fs::path& root, int scale) {
  return load_dataset(root / "LR", root / "HR", scale);
}

void check_pair(const ImagePair& pair, int scale) {
  check(pair.hr.height == pair.lr.height * scale &&
            pair.hr.width == pair.lr.width * scale,
        ErrorKind::kConfig,
        "pair '" + pair.name + "': HR dims are not " + std::to_string(scale) +
            "x LR dims");
}

template <typename T>
BasicTensor<T> downscale_box(const BasicTensor<T>& hr, int s) {
  check(s >= 1, ErrorKind::kInvalidArgument, "downscale_box: scale must be >= 1");
  const Shape& in = hr.shape();
  check(in.h % s == 0 && in.w % s == 0, ErrorKind::kShape,
        "downscale_box: dims " + in.to_string() + " not divisible by scale");
  const Shape out_shape(in.n, in.h / s, in.w / s, in.c);
  std::vector<T> out(out_shape.size());
  const double inv = 1.0 / (double(s) * s);
  for (std::int64_t n = 0; n < out_shape.n; ++n) {
    for (std::int64_t y = 0; y < out_shape.h; ++y) {
      for (std::int64_t x = 0; x < out_shape.w; ++x) {
        for (std::int64_t c = 0; c < in.c; ++c) {
          double sum = 0.0;
          for (int dy = 0; dy < s; ++dy) {
            for (int dx = 0; dx < s; ++dx) {
              sum += hr.at(n, y * s + dy, x * s + dx, c);
            }
          }
          out[out_shape.index(n, y, x, c)] = T(sum * inv);
        }
      }
    }
  }
  return BasicTensor<T>(out_shape, std::move(out));
}

template Tensor downscale_box(const Tensor&, int);
template TensorD downscale_box(const TensorD&, int);

double psnr_rgb(const Image& a, const Image& b) {
  check(a.height == b.height && a.width == b.width &&
            a.pixels.size() == b.pixels.size(),
        ErrorKind::kShape,
        "psnr_rgb: dimension mismatch " + std::to_string(a.width) + "x" +
            std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
            std::to_string(b.height));
  double sse = 0.0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    const double d = double(a.pixels[i]) - double(b.pixels[i]);
    sse += d * d;
  }
  if (sse == 0.0) return kPsnrInfinity;
  const double mse = sse / double(a.pixels.size());
  return 20.0 * std::log10(255.0 / std::sqrt(mse));
}

std::string format_psnr(double db) {
  if (std::isinf(db)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", db);
  return buf;
}

Image nearest_upsample(const Image& lr, int s) {
  return image_from_tensor(nearest_resize(tensor_from_image(lr), s));
}

std::vector<ImagePair> make_synthetic_pairs(int count, int hr_size, int scale,
                                            std::uint64_t seed) {
  check(count >= 1, ErrorKind::kInvalidArgument, "count must be >= 1");
  check(hr_size >= scale && hr_size % scale == 0, ErrorKind::kInvalidArgument,
        "hr_size must be a positive multiple of scale");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<ImagePair> out;
  for (int k = 0; k < count; ++k) {
    struct Wave {
      double fx, fy, phase, amp[3];
    };
    struct Blob {
      double cx, cy, r, soft, color[3];
      bool square;
    };
    double base[3];
    for (double& b : base) b = 60.0 + 135.0 * u(rng);
    std::vector<Wave> waves(3);
    for (auto& w : waves) {
      const double wavelength = 12.0 + 60.0 * u(rng);
      const double angle = 2.0 * std::numbers::pi * u(rng);
      w.fx = std::cos(angle) * 2.0 * std::numbers::pi / wavelength;
      w.fy = std::sin(angle) * 2.0 * std::numbers::pi / wavelength;
      w.phase = 2.0 * std::numbers::pi * u(rng);
      for (double& a : w.amp) a = (u(rng) - 0.5) * 70.0;
    }
    std::vector<Blob> blobs(4);
    for (auto& b : blobs) {
      b.cx = hr_size * u(rng);
      b.cy = hr_size * u(rng);
      b.r = hr_size * (0.08 + 0.2 * u(rng));
      b.soft = 0.7 + 2.5 * u(rng);
      for (double& c : b.color) c = 255.0 * u(rng);
      b.square = u(rng) < 0.5;
    }
    std::vector<float> hr(std::size_t(hr_size) * hr_size * 3);
    for (int y = 0; y < hr_size; ++y) {
      for (int x = 0; x < hr_size; ++x) {
        double px[3] = {base[0], base[1], base[2]};
        for (const auto& w : waves) {
          const double v = std::sin(w.fx * x + w.fy * y + w.phase);
          for (int c = 0; c < 3; ++c) px[c] += w.amp[c] * v;
        }
        for (const auto& b : blobs) {
          const double dx = x + 0.5 - b.cx;
          const double dy = y + 0.5 - b.cy;
          const double dist = b.square ? std::max(std::abs(dx), std::abs(dy))
                                       : std::sqrt(dx * dx + dy * dy);
          const double alpha = 1.0 - smoothstep(b.r - b.soft, b.r + b.soft, dist);
          for (int c = 0; c < 3; ++c) px[c] += alpha * (b.color[c] - px[c]);
        }
        for (int c = 0; c < 3; ++c) {
          hr[(std::size_t(y) * hr_size + x) * 3 + c] =
              static_cast<float>(std::clamp(std::round(px[c]), 0.0, 255.0));
        }
      }
    }
    Tensor hr_tensor(Shape(1, hr_size, hr_size, 3), std::move(hr));
    ImagePair pair;
    char name[32];
    std::snprintf(name, sizeof(name), "img%03d", k);
    pair.name = name;
    pair.hr = image_from_tensor(hr_tensor);
    pair.lr = image_from_tensor(downscale_box(hr_tensor, scale));
    out.push_back(std::move(pair));
  }
  return out;
}

void write_dataset(const fs::path& root, std::span<const ImagePair> pairs) {
  fs::create_directories(root / "LR");
  fs::create_directories(root / "HR");
  for (const auto& p : pairs) {
    write_png(root / "LR" / (p.name + ".png"), p.lr);
    write_png(root / "HR" / (p.name + ".png"), p.hr);
  }
}

}  // namespace abpn
