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

#include "abpn/ops.h"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>

namespace abpn {
namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Target number of output pixels per im2col panel. Keeps the column buffer
// small for 1080p inputs while giving the GEMM enough rows.
constexpr std::int64_t kPanelPixels = 4096;

void check_same_shape(const Shape& a, const Shape& b, const char* op) {
  check(a == b, ErrorKind::kShape,
        std::string(op) + ": shape mismatch " + a.to_string() + " vs " +
            b.to_string());
}

// Iterates over panels of whole image rows. Rows are (n, y) pairs flattened
// to r = n * H + y, which are contiguous in NHWC memory.
template <typename Fn>
void for_each_panel(const Shape& s, Fn&& fn) {
  const std::int64_t rows = s.n * s.h;
  const std::int64_t per = std::max<std::int64_t>(1, kPanelPixels / s.w);
  for (std::int64_t r0 = 0; r0 < rows; r0 += per) {
    fn(r0, std::min(rows, r0 + per));
  }
}

template <typename T>
void im2col(const BasicTensor<T>& x, int k, std::int64_t r0, std::int64_t r1,
            RowMat<T>& col) {
  const Shape& s = x.shape();
  const int pad = k / 2;
  const std::int64_t cin = s.c;
  const std::int64_t kk = std::int64_t(k) * k * cin;
  col.resize((r1 - r0) * s.w, kk);
  const T* src = x.data().data();
  for (std::int64_t r = r0; r < r1; ++r) {
    const std::int64_t n = r / s.h;
    const std::int64_t y = r % s.h;
    for (std::int64_t px = 0; px < s.w; ++px) {
      T* dst = col.data() + ((r - r0) * s.w + px) * kk;
      for (int ky = 0; ky < k; ++ky) {
        const std::int64_t sy = y + ky - pad;
        for (int kx = 0; kx < k; ++kx, dst += cin) {
          const std::int64_t sx = px + kx - pad;
          if (sy < 0 || sy >= s.h || sx < 0 || sx >= s.w) {
            std::fill(dst, dst + cin, T(0));
          } else {
            const T* p = src + s.index(n, sy, sx, 0);
            std::copy(p, p + cin, dst);
          }
        }
      }
    }
  }
}

template <typename T>
void col2im_add(const RowMat<T>& gcol, int k, std::int64_t r0,
                std::int64_t r1, const Shape& s, T* grad) {
  const int pad = k / 2;
  const std::int64_t cin = s.c;
  const std::int64_t kk = std::int64_t(k) * k * cin;
  for (std::int64_t r = r0; r < r1; ++r) {
    const std::int64_t n = r / s.h;
    const std::int64_t y = r % s.h;
    for (std::int64_t px = 0; px < s.w; ++px) {
      const T* g = gcol.data() + ((r - r0) * s.w + px) * kk;
      for (int ky = 0; ky < k; ++ky) {
        const std::int64_t sy = y + ky - pad;
        for (int kx = 0; kx < k; ++kx, g += cin) {
          const std::int64_t sx = px + kx - pad;
          if (sy < 0 || sy >= s.h || sx < 0 || sx >= s.w) continue;
          T* d = grad + s.index(n, sy, sx, 0);
          for (std::int64_t i = 0; i < cin; ++i) d[i] += g[i];
        }
      }
    }
  }
}

template <typename T, typename Fn>
BasicTensor<T> map_unary(const BasicTensor<T>& x, Fn&& fn) {
  std::vector<T> out(x.size());
  const auto src = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fn(src[i]);
  return BasicTensor<T>(x.shape(), std::move(out));
}

template <typename T, typename Fn>
BasicTensor<T> map_binary(const BasicTensor<T>& a, const BasicTensor<T>& b,
                          const char* op, Fn&& fn) {
  check_same_shape(a.shape(), b.shape(), op);
  std::vector<T> out(a.size());
  const auto pa = a.data();
  const auto pb = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fn(pa[i], pb[i]);
  return BasicTensor<T>(a.shape(), std::move(out));
}

void check_scale(int s, int min_scale, const char* op) {
  check(s >= min_scale, ErrorKind::kInvalidArgument,
        std::string(op) + ": scale must be >= " + std::to_string(min_scale));
}

}  // namespace

template <typename T>
void ConvWeights<T>::validate() const {
  check(k == 1 || k == 3, ErrorKind::kInvalidArgument,
        "conv kernel size must be 1 or 3");
  check(cin >= 1 && cout >= 1, ErrorKind::kInvalidArgument,
        "conv channel counts must be positive");
  check(kernel.size() == std::size_t(k) * k * cin * cout &&
            bias.size() == std::size_t(cout),
        ErrorKind::kShape, "conv weight buffers do not match k/cin/cout");
}

template <typename T>
BasicTensor<T> conv2d(const BasicTensor<T>& x, const ConvWeights<T>& w) {
  w.validate();
  const Shape& s = x.shape();
  check(s.c == w.cin, ErrorKind::kShape,
        "conv2d: input has " + std::to_string(s.c) + " channels, kernel expects " +
            std::to_string(w.cin));
  const Shape out_shape(s.n, s.h, s.w, w.cout);
  std::vector<T> out(out_shape.size());
  const std::int64_t kk = std::int64_t(w.k) * w.k * w.cin;
  Eigen::Map<const RowMat<T>> kernel(w.kernel.data(), kk, w.cout);
  Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>> bias(w.bias.data(),
                                                             w.cout);
  RowMat<T> col;
  for_each_panel(s, [&](std::int64_t r0, std::int64_t r1) {
    const std::int64_t p = (r1 - r0) * s.w;
    Eigen::Map<RowMat<T>> dst(out.data() + r0 * s.w * w.cout, p, w.cout);
    if (w.k == 1) {
      Eigen::Map<const RowMat<T>> src(x.data().data() + r0 * s.w * s.c, p,
                                      s.c);
      dst.noalias() = src * kernel;
    } else {
      im2col(x, w.k, r0, r1, col);
      dst.noalias() = col * kernel;
    }
    dst.rowwise() += bias;
  });
  return BasicTensor<T>(out_shape, std::move(out));
}

template <typename T>
BasicTensor<T> conv2d_backward(const BasicTensor<T>& x,
                               const ConvWeights<T>& w,
                               const BasicTensor<T>& grad_out,
                               ConvWeights<T>& grad_w) {
  const Shape& s = x.shape();
  check(grad_out.shape() == Shape(s.n, s.h, s.w, w.cout), ErrorKind::kShape,
        "conv2d_backward: gradient shape mismatch");
  check(grad_w.k == w.k && grad_w.cin == w.cin && grad_w.cout == w.cout,
        ErrorKind::kShape, "conv2d_backward: gradient buffer mismatch");
  const std::int64_t kk = std::int64_t(w.k) * w.k * w.cin;
  Eigen::Map<const RowMat<T>> kernel(w.kernel.data(), kk, w.cout);
  Eigen::Map<RowMat<T>> gk(grad_w.kernel.data(), kk, w.cout);
  Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>> gb(grad_w.bias.data(),
                                                     w.cout);
  std::vector<T> gx(s.size(), T(0));
  RowMat<T> col;
  RowMat<T> gcol;
  for_each_panel(s, [&](std::int64_t r0, std::int64_t r1) {
    const std::int64_t p = (r1 - r0) * s.w;
    Eigen::Map<const RowMat<T>> gout(
        grad_out.data().data() + r0 * s.w * w.cout, p, w.cout);
    gb += gout.colwise().sum();
    if (w.k == 1) {
      Eigen::Map<const RowMat<T>> src(x.data().data() + r0 * s.w * s.c, p,
                                      s.c);
      gk.noalias() += src.transpose() * gout;
      Eigen::Map<RowMat<T>> gsrc(gx.data() + r0 * s.w * s.c, p, s.c);
      gsrc.noalias() = gout * kernel.transpose();
    } else {
      im2col(x, w.k, r0, r1, col);
      gk.noalias() += col.transpose() * gout;
      gcol.noalias() = gout * kernel.transpose();
      col2im_add(gcol, w.k, r0, r1, s, gx.data());
    }
  });
  return BasicTensor<T>(s, std::move(gx));
}

template <typename T>
BasicTensor<T> relu(const BasicTensor<T>& x) {
  return map_unary(x, [](T v) { return v > T(0) ? v : T(0); });
}

template <typename T>
BasicTensor<T> leaky_relu(const BasicTensor<T>& x, T alpha) {
  check(alpha > T(0) && alpha < T(1), ErrorKind::kInvalidArgument,
        "leaky_relu: alpha must be in (0, 1)");
  return map_unary(x, [alpha](T v) { return v >= T(0) ? v : alpha * v; });
}

template <typename T>
BasicTensor<T> add(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  return map_binary(a, b, "add", [](T u, T v) { return u + v; });
}

template <typename T>
BasicTensor<T> multiply(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  return map_binary(a, b, "multiply", [](T u, T v) { return u * v; });
}

template <typename T>
BasicTensor<T> channel_concat(std::span<const BasicTensor<T>> parts) {
  check(!parts.empty(), ErrorKind::kInvalidArgument,
        "channel_concat: no inputs");
  const Shape& s0 = parts[0].shape();
  std::int64_t total_c = 0;
  for (const auto& p : parts) {
    check(p.shape().same_spatial(s0), ErrorKind::kShape,
          "channel_concat: spatial mismatch " + p.shape().to_string() +
              " vs " + s0.to_string());
    total_c += p.shape().c;
  }
  const Shape out_shape(s0.n, s0.h, s0.w, total_c);
  std::vector<T> out(out_shape.size());
  const std::int64_t pixels = s0.n * s0.h * s0.w;
  std::int64_t offset = 0;
  for (const auto& p : parts) {
    const std::int64_t c = p.shape().c;
    const T* src = p.data().data();
    for (std::int64_t i = 0; i < pixels; ++i) {
      std::copy(src + i * c, src + (i + 1) * c, out.data() + i * total_c + offset);
    }
    offset += c;
  }
  return BasicTensor<T>(out_shape, std::move(out));
}

template <typename T>
BasicTensor<T> channel_slice(const BasicTensor<T>& x, std::int64_t offset,
                             std::int64_t count) {
  const Shape& s = x.shape();
  check(offset >= 0 && count >= 1 && offset + count <= s.c, ErrorKind::kShape,
        "channel_slice: range out of bounds");
  const Shape out_shape(s.n, s.h, s.w, count);
  std::vector<T> out(out_shape.size());
  const std::int64_t pixels = s.n * s.h * s.w;
  const T* src = x.data().data();
  for (std::int64_t i = 0; i < pixels; ++i) {
    std::copy(src + i * s.c + offset, src + i * s.c + offset + count,
              out.data() + i * count);
  }
  return BasicTensor<T>(out_shape, std::move(out));
}

template <typename T>
std::vector<BasicTensor<T>> channel_split(const BasicTensor<T>& x,
                                          std::span<const std::int64_t> sizes) {
  std::int64_t total = 0;
  for (std::int64_t v : sizes) {
    check(v >= 1, ErrorKind::kShape, "channel_split: sizes must be positive");
    total += v;
  }
  check(total == x.shape().c, ErrorKind::kShape,
        "channel_split: sizes sum to " + std::to_string(total) + ", tensor has " +
            std::to_string(x.shape().c) + " channels");
  std::vector<BasicTensor<T>> out;
  out.reserve(sizes.size());
  std::int64_t offset = 0;
  for (std::int64_t v : sizes) {
    out.push_back(channel_slice(x, offset, v));
    offset += v;
  }
  return out;
}

template <typename T>
BasicTensor<T> global_max_pool(const BasicTensor<T>& x) {
  const Shape& s = x.shape();
  const Shape out_shape(s.n, 1, 1, s.c);
  std::vector<T> out(out_shape.size(), -std::numeric_limits<T>::infinity());
  const T* src = x.data().data();
  for (std::int64_t n = 0; n < s.n; ++n) {
    T* dst = out.data() + n * s.c;
    for (std::int64_t p = 0; p < s.h * s.w; ++p) {
      const T* v = src + (n * s.h * s.w + p) * s.c;
      for (std::int64_t c = 0; c < s.c; ++c) dst[c] = std::max(dst[c], v[c]);
    }
  }
  return BasicTensor<T>(out_shape, std::move(out));
}

template <typename T>
BasicTensor<T> global_avg_pool(const BasicTensor<T>& x) {
  const Shape& s = x.shape();
  const Shape out_shape(s.n, 1, 1, s.c);
  std::vector<T> out(out_shape.size(), T(0));
  std::vector<double> acc(std::size_t(s.c));
  const T* src = x.data().data();
  const double inv = 1.0 / static_cast<double>(s.h * s.w);
  for (std::int64_t n = 0; n < s.n; ++n) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::int64_t p = 0; p < s.h * s.w; ++p) {
      const T* v = src + (n * s.h * s.w + p) * s.c;
      for (std::int64_t c = 0; c < s.c; ++c) acc[c] += v[c];
    }
    for (std::int64_t c = 0; c < s.c; ++c) out[n * s.c + c] = T(acc[c] * inv);
  }
  return BasicTensor<T>(out_shape, std::move(out));
}

template <typename T>
BasicTensor<T> pixel_shuffle(const BasicTensor<T>& x, int s) {
  check_scale(s, 1, "pixel_shuffle");
  const Shape& in = x.shape();
  const std::int64_t ss = std::int64_t(s) * s;
  check(in.c % ss == 0, ErrorKind::kShape,
        "pixel_shuffle: channels " + std::to_string(in.c) +
            " not divisible by s^2=" + std::to_string(ss));
  const std::int64_t co = in.c / ss;
  const Shape out_shape(in.n, in.h * s, in.w * s, co);
  std::vector<T> out(out_shape.size());
  const T* src = x.data().data();
  for (std::int64_t n = 0; n < out_shape.n; ++n) {
    for (std::int64_t y = 0; y < out_shape.h; ++y) {
      for (std::int64_t px = 0; px < out_shape.w; ++px) {
        const std::int64_t base = ((y % s) * s + (px % s)) * co;
        const T* p = src + in.index(n, y / s, px / s, base);
        std::copy(p, p + co, out.data() + out_shape.index(n, y, px, 0));
      }
    }
  }
  return BasicTensor<T>(out_shape, std::move(out));
}

template <typename T>
BasicTensor<T> space_to_depth(const BasicTensor<T>& x, int s) {
  check_scale(s, 1, "space_to_depth");
  const Shape& in = x.shape();
  check(in.h % s == 0 && in.w % s == 0, ErrorKind::kShape,
        "space_to_depth: spatial dims not divisible by scale");
  const Shape out_shape(in.n, in.h / s, in.w / s, in.c * s * s);
  std::vector<T> out(out_shape.size());
  const T* src = x.data().data();
  for (std::int64_t n = 0; n < in.n; ++n) {
    for (std::int64_t y = 0; y < in.h; ++y) {
      for (std::int64_t px = 0; px < in.w; ++px) {
        const std::int64_t base = ((y % s) * s + (px % s)) * in.c;
        const T* p = src + in.index(n, y, px, 0);
        std::copy(p, p + in.c,
                  out.data() + out_shape.index(n, y / s, px / s, base));
      }
    }
  }
  return BasicTensor<T>(out_shape, std::move(out));
}

template <typename T>
BasicTensor<T> anchor_concat(const BasicTensor<T>& x, int s) {
  check_scale(s, 2, "anchor_concat");
  const Shape& in = x.shape();
  const std::int64_t ss = std::int64_t(s) * s;
  const Shape out_shape(in.n, in.h, in.w, in.c * ss);
  std::vector<T> out(out_shape.size());
  const std::int64_t pixels = in.n * in.h * in.w;
  const T* src = x.data().data();
  T* dst = out.data();
  for (std::int64_t i = 0; i < pixels; ++i) {
    for (std::int64_t j = 0; j < ss; ++j, dst += in.c) {
      std::copy(src + i * in.c, src + (i + 1) * in.c, dst);
    }
  }
  return BasicTensor<T>(out_shape, std::move(out));
}

template <typename T>
BasicTensor<T> anchor_concat_backward(const BasicTensor<T>& grad_out, int s) {
  check_scale(s, 2, "anchor_concat_backward");
  const Shape& g = grad_out.shape();
  const std::int64_t ss = std::int64_t(s) * s;
  check(g.c % ss == 0, ErrorKind::kShape,
        "anchor_concat_backward: channels not divisible by s^2");
  const std::int64_t c = g.c / ss;
  const Shape in_shape(g.n, g.h, g.w, c);
  std::vector<T> out(in_shape.size(), T(0));
  const std::int64_t pixels = g.n * g.h * g.w;
  const T* src = grad_out.data().data();
  for (std::int64_t i = 0; i < pixels; ++i) {
    for (std::int64_t j = 0; j < ss; ++j) {
      for (std::int64_t k = 0; k < c; ++k) {
        out[i * c + k] += src[(i * ss + j) * c + k];
      }
    }
  }
  return BasicTensor<T>(in_shape, std::move(out));
}

template <typename T>
BasicTensor<T> nearest_resize(const BasicTensor<T>& x, int s) {
  check_scale(s, 1, "nearest_resize");
  const Shape& in = x.shape();
  const Shape out_shape(in.n, in.h * s, in.w * s, in.c);
  std::vector<T> out(out_shape.size());
  const T* src = x.data().data();
  for (std::int64_t n = 0; n < out_shape.n; ++n) {
    for (std::int64_t y = 0; y < out_shape.h; ++y) {
      for (std::int64_t px = 0; px < out_shape.w; ++px) {
        const T* p = src + in.index(n, y / s, px / s, 0);
        std::copy(p, p + in.c, out.data() + out_shape.index(n, y, px, 0));
      }
    }
  }
  return BasicTensor<T>(out_shape, std::move(out));
}

template <typename T>
BasicTensor<T> nearest_resize_backward(const BasicTensor<T>& grad_out, int s) {
  check_scale(s, 1, "nearest_resize_backward");
  const Shape& g = grad_out.shape();
  check(g.h % s == 0 && g.w % s == 0, ErrorKind::kShape,
        "nearest_resize_backward: dims not divisible by scale");
  const Shape in_shape(g.n, g.h / s, g.w / s, g.c);
  std::vector<T> out(in_shape.size(), T(0));
  const T* src = grad_out.data().data();
  for (std::int64_t n = 0; n < g.n; ++n) {
    for (std::int64_t y = 0; y < g.h; ++y) {
      for (std::int64_t px = 0; px < g.w; ++px) {
        const T* p = src + g.index(n, y, px, 0);
        T* d = out.data() + in_shape.index(n, y / s, px / s, 0);
        for (std::int64_t c = 0; c < g.c; ++c) d[c] += p[c];
      }
    }
  }
  return BasicTensor<T>(in_shape, std::move(out));
}

BilinearTap bilinear_tap(std::int64_t dst, std::int64_t src_extent, int s) {
  const std::int64_t two_s = 2 * std::int64_t(s);
  // 2s * u = 2 dst + 1 - s.
  std::int64_t num = 2 * dst + 1 - s;
  num = std::clamp<std::int64_t>(num, 0, two_s * (src_extent - 1));
  BilinearTap tap;
  tap.lo = num / two_s;
  tap.frac_num = num % two_s;
  tap.hi = std::min(tap.lo + 1, src_extent - 1);
  return tap;
}

template <typename T>
BasicTensor<T> bilinear_resize(const BasicTensor<T>& x, int s) {
  check_scale(s, 1, "bilinear_resize");
  const Shape& in = x.shape();
  const Shape out_shape(in.n, in.h * s, in.w * s, in.c);
  std::vector<T> out(out_shape.size());
  const T two_s = T(2 * s);
  const T* src = x.data().data();
  for (std::int64_t n = 0; n < out_shape.n; ++n) {
    for (std::int64_t y = 0; y < out_shape.h; ++y) {
      const BilinearTap ty = bilinear_tap(y, in.h, s);
      const T fy = T(ty.frac_num) / two_s;
      for (std::int64_t px = 0; px < out_shape.w; ++px) {
        const BilinearTap tx = bilinear_tap(px, in.w, s);
        const T fx = T(tx.frac_num) / two_s;
        const T* a = src + in.index(n, ty.lo, tx.lo, 0);
        const T* b = src + in.index(n, ty.lo, tx.hi, 0);
        const T* c = src + in.index(n, ty.hi, tx.lo, 0);
        const T* d = src + in.index(n, ty.hi, tx.hi, 0);
        T* o = out.data() + out_shape.index(n, y, px, 0);
        for (std::int64_t ch = 0; ch < in.c; ++ch) {
          const T top = a[ch] + (b[ch] - a[ch]) * fx;
          const T bot = c[ch] + (d[ch] - c[ch]) * fx;
          o[ch] = top + (bot - top) * fy;
        }
      }
    }
  }
  return BasicTensor<T>(out_shape, std::move(out));
}

template <typename T>
BasicTensor<T> bilinear_resize_backward(const BasicTensor<T>& grad_out,
                                        const Shape& in, int s) {
  check_scale(s, 1, "bilinear_resize_backward");
  const Shape& g = grad_out.shape();
  check(g == Shape(in.n, in.h * s, in.w * s, in.c), ErrorKind::kShape,
        "bilinear_resize_backward: gradient shape mismatch");
  std::vector<T> out(in.size(), T(0));
  const T two_s = T(2 * s);
  const T* src = grad_out.data().data();
  for (std::int64_t n = 0; n < g.n; ++n) {
    for (std::int64_t y = 0; y < g.h; ++y) {
      const BilinearTap ty = bilinear_tap(y, in.h, s);
      const T fy = T(ty.frac_num) / two_s;
      for (std::int64_t px = 0; px < g.w; ++px) {
        const BilinearTap tx = bilinear_tap(px, in.w, s);
        const T fx = T(tx.frac_num) / two_s;
        const T* go = src + g.index(n, y, px, 0);
        T* a = out.data() + in.index(n, ty.lo, tx.lo, 0);
        T* b = out.data() + in.index(n, ty.lo, tx.hi, 0);
        T* c = out.data() + in.index(n, ty.hi, tx.lo, 0);
        T* d = out.data() + in.index(n, ty.hi, tx.hi, 0);
        for (std::int64_t ch = 0; ch < g.c; ++ch) {
          a[ch] += go[ch] * (T(1) - fy) * (T(1) - fx);
          b[ch] += go[ch] * (T(1) - fy) * fx;
          c[ch] += go[ch] * fy * (T(1) - fx);
          d[ch] += go[ch] * fy * fx;
        }
      }
    }
  }
  return BasicTensor<T>(in, std::move(out));
}

template <typename T>
BasicTensor<T> clip_0_255(const BasicTensor<T>& x) {
  return map_unary(x, [](T v) { return std::clamp(v, T(0), T(255)); });
}

#define ABPN_INSTANTIATE_OPS(T)                                               \
  template struct ConvWeights<T>;                                             \
  template BasicTensor<T> conv2d(const BasicTensor<T>&, const ConvWeights<T>&); \
  template BasicTensor<T> conv2d_backward(const BasicTensor<T>&,              \
                                          const ConvWeights<T>&,              \
                                          const BasicTensor<T>&,              \
                                          ConvWeights<T>&);                   \
  template BasicTensor<T> relu(const BasicTensor<T>&);                        \
  template BasicTensor<T> leaky_relu(const BasicTensor<T>&, T);               \
  template BasicTensor<T> add(const BasicTensor<T>&, const BasicTensor<T>&);  \
  template BasicTensor<T> multiply(const BasicTensor<T>&,                     \
                                   const BasicTensor<T>&);                    \
  template BasicTensor<T> channel_concat(std::span<const BasicTensor<T>>);    \
  template std::vector<BasicTensor<T>> channel_split(                         \
      const BasicTensor<T>&, std::span<const std::int64_t>);                  \
  template BasicTensor<T> channel_slice(const BasicTensor<T>&, std::int64_t,  \
                                        std::int64_t);                        \
  template BasicTensor<T> global_max_pool(const BasicTensor<T>&);             \
  template BasicTensor<T> global_avg_pool(const BasicTensor<T>&);             \
  template BasicTensor<T> pixel_shuffle(const BasicTensor<T>&, int);          \
  template BasicTensor<T> space_to_depth(const BasicTensor<T>&, int);         \
  template BasicTensor<T> anchor_concat(const BasicTensor<T>&, int);          \
  template BasicTensor<T> anchor_concat_backward(const BasicTensor<T>&, int); \
  template BasicTensor<T> nearest_resize(const BasicTensor<T>&, int);         \
  template BasicTensor<T> nearest_resize_backward(const BasicTensor<T>&, int); \
  template BasicTensor<T> bilinear_resize(const BasicTensor<T>&, int);        \
  template BasicTensor<T> bilinear_resize_backward(const BasicTensor<T>&,     \
                                                   const Shape&, int);        \
  template BasicTensor<T> clip_0_255(const BasicTensor<T>&);

ABPN_INSTANTIATE_OPS(float)
ABPN_INSTANTIATE_OPS(double)

#undef ABPN_INSTANTIATE_OPS

// Index-only ops are also used on 8-bit payloads by the integer path.
template BasicTensor<std::uint8_t> channel_concat(
    std::span<const BasicTensor<std::uint8_t>>);
template BasicTensor<std::uint8_t> pixel_shuffle(
    const BasicTensor<std::uint8_t>&, int);
template BasicTensor<std::uint8_t> anchor_concat(
    const BasicTensor<std::uint8_t>&, int);
template BasicTensor<std::uint8_t> nearest_resize(
    const BasicTensor<std::uint8_t>&, int);

}  // namespace abpn
