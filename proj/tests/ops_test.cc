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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "abpn/ops.h"
#include "test_util.h"

namespace abpn {
namespace {

using testing::max_rel_error;
using testing::random_byte_tensor;
using testing::random_conv;
using testing::random_tensor;

Tensor make(const Shape& s, std::vector<float> v) { return Tensor(s, std::move(v)); }

TEST(Conv2d, ZeroKernelGivesBias) {
  std::mt19937_64 rng(1);
  ConvWeights<float> w(3, 2, 4);
  std::fill(w.bias.begin(), w.bias.end(), 5.0f);
  const Tensor y = conv2d(random_tensor(Shape(1, 5, 6, 2), rng), w);
  EXPECT_EQ(y, Tensor(Shape(1, 5, 6, 4), 5.0f));
}

TEST(Conv2d, IdentityKernel) {
  std::mt19937_64 rng(2);
  ConvWeights<float> w(3, 1, 1);
  w.kernel[w.kernel_index(1, 1, 0, 0)] = 1.0f;
  const Tensor x = random_tensor(Shape(2, 4, 7, 1), rng);
  EXPECT_EQ(conv2d(x, w), x);
}

TEST(Conv2d, MatchesNestedLoops) {
  std::mt19937_64 rng(3);
  for (int k : {1, 3}) {
    const Tensor x = random_tensor(Shape(1, 4, 4, 2), rng);
    const auto w = random_conv(k, 2, 3, rng);
    EXPECT_LE(max_rel_error(conv2d(x, w), testing::ref_conv2d(x, w)), 1e-5);
  }
}

TEST(Conv2d, LargeInputMatchesNestedLoops) {
  std::mt19937_64 rng(4);
  const Tensor x = random_tensor(Shape(2, 37, 81, 5), rng);
  const auto w = random_conv(3, 5, 7, rng);
  EXPECT_LE(max_rel_error(conv2d(x, w), testing::ref_conv2d(x, w)), 1e-5);
}

TEST(Conv2d, ChannelMismatch) {
  ConvWeights<float> w(3, 2, 1);
  try {
    conv2d(Tensor(Shape(1, 2, 2, 3)), w);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kShape);
  }
}

TEST(Conv2d, Linearity) {
  std::mt19937_64 rng(5);
  auto w = random_conv(3, 3, 4, rng);
  std::fill(w.bias.begin(), w.bias.end(), 0.0f);
  const Tensor a = random_tensor(Shape(1, 6, 6, 3), rng);
  const Tensor b = random_tensor(Shape(1, 6, 6, 3), rng);
  std::vector<float> mix(a.size());
  for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = 2.0f * a[i] - 0.5f * b[i];
  const Tensor lhs = conv2d(Tensor(a.shape(), mix), w);
  const Tensor ca = conv2d(a, w), cb = conv2d(b, w);
  std::vector<float> rhs(ca.size());
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = 2.0f * ca[i] - 0.5f * cb[i];
  EXPECT_LE(max_rel_error(lhs, Tensor(ca.shape(), rhs)), 1e-4);
}

TEST(Conv2d, LeavesInputsUnmodified) {
  std::mt19937_64 rng(6);
  const Tensor x = random_tensor(Shape(1, 4, 4, 2), rng);
  const auto w = random_conv(3, 2, 2, rng);
  const Tensor x0 = x;
  const auto w0 = w;
  conv2d(x, w);
  EXPECT_EQ(x, x0);
  EXPECT_EQ(w, w0);
}

TEST(Relu, Examples) {
  EXPECT_EQ(relu(make(Shape(1, 1, 1, 3), {-1, 0, 2})), make(Shape(1, 1, 1, 3), {0, 0, 2}));
  std::mt19937_64 rng(7);
  const Tensor pos = random_tensor(Shape(1, 3, 3, 2), rng, 0.0, 1.0);
  EXPECT_EQ(relu(pos), pos);
  const Tensor x = random_tensor(Shape(1, 3, 3, 2), rng);
  const Tensor y = relu(x);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(y[i], std::max(0.0f, x[i]));
}

TEST(LeakyRelu, Examples) {
  const Tensor y = leaky_relu(make(Shape(1, 1, 1, 2), {-1, 2}), 0.01f);
  EXPECT_FLOAT_EQ(y[0], -0.01f);
  EXPECT_EQ(y[1], 2.0f);
  std::mt19937_64 rng(8);
  const Tensor x = random_tensor(Shape(1, 3, 3, 2), rng);
  const Tensor z = leaky_relu(x, 0.2f);
  for (std::size_t i = 0; i < x.size(); ++i)
    EXPECT_EQ(z[i], x[i] >= 0 ? x[i] : 0.2f * x[i]);
}

TEST(AddMultiply, Identities) {
  std::mt19937_64 rng(9);
  const Tensor a = random_tensor(Shape(2, 3, 4, 5), rng);
  EXPECT_EQ(add(a, Tensor(a.shape(), 0.0f)), a);
  EXPECT_EQ(multiply(a, Tensor(a.shape(), 1.0f)), a);
  const Tensor b = random_tensor(a.shape(), rng);
  const Tensor s = add(a, b), p = multiply(a, b);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(s[i], a[i] + b[i]);
    EXPECT_EQ(p[i], a[i] * b[i]);
  }
  EXPECT_THROW(add(a, Tensor(Shape(2, 3, 4, 4))), Error);
}

TEST(Concat, SingleAndInverse) {
  std::mt19937_64 rng(10);
  const Tensor a = random_tensor(Shape(2, 3, 3, 2), rng);
  const Tensor b = random_tensor(Shape(2, 3, 3, 5), rng);
  const Tensor c = random_tensor(Shape(2, 3, 3, 1), rng);
  EXPECT_EQ(channel_concat<float>(std::vector<Tensor>{a}), a);
  const std::vector<Tensor> parts{a, b, c};
  const Tensor cat = channel_concat<float>(parts);
  EXPECT_EQ(cat, testing::ref_concat(parts));
  const std::int64_t sizes[] = {2, 5, 1};
  const auto split = channel_split(cat, sizes);
  ASSERT_EQ(split.size(), 3u);
  EXPECT_EQ(split[0], a);
  EXPECT_EQ(split[1], b);
  EXPECT_EQ(split[2], c);
  EXPECT_EQ(channel_slice(cat, 2, 5), b);
}

TEST(Concat, Errors) {
  const std::vector<Tensor> bad{Tensor(Shape(1, 2, 2, 1)), Tensor(Shape(1, 3, 2, 1))};
  EXPECT_THROW(channel_concat<float>(bad), Error);
  const std::int64_t sizes[] = {1, 1};
  EXPECT_THROW(channel_split(Tensor(Shape(1, 1, 1, 3)), sizes), Error);
}

TEST(Pool, Examples) {
  EXPECT_EQ(global_max_pool(Tensor(Shape(1, 4, 4, 2), 3.5f)), Tensor(Shape(1, 1, 1, 2), 3.5f));
  EXPECT_EQ(global_avg_pool(Tensor(Shape(1, 4, 4, 2), 3.5f)), Tensor(Shape(1, 1, 1, 2), 3.5f));
  std::vector<float> v(16, 0.0f);
  v[5] = 8.0f;
  const Tensor hot(Shape(1, 4, 4, 1), v);
  EXPECT_EQ(global_max_pool(hot)[0], 8.0f);
  EXPECT_FLOAT_EQ(global_avg_pool(hot)[0], 0.5f);
  std::mt19937_64 rng(11);
  const Tensor x = random_tensor(Shape(2, 5, 3, 4), rng);
  EXPECT_EQ(global_max_pool(x), testing::ref_pool(x, true));
  EXPECT_LE(max_rel_error(global_avg_pool(x), testing::ref_pool(x, false)), 1e-6);
}

TEST(PixelShuffle, Unrolled) {
  std::vector<float> v(9);
  for (int i = 0; i < 9; ++i) v[i] = float(i);
  const Tensor y = pixel_shuffle(Tensor(Shape(1, 1, 1, 9), v), 3);
  EXPECT_EQ(y.shape(), Shape(1, 3, 3, 1));
  for (int i = 0; i < 9; ++i) EXPECT_EQ(y[i], float(i));
}

TEST(PixelShuffle, ShapeLawInverseAndOracle) {
  std::mt19937_64 rng(12);
  const Tensor x = random_tensor(Shape(1, 4, 5, 27), rng);
  const Tensor y = pixel_shuffle(x, 3);
  EXPECT_EQ(y.shape(), Shape(1, 12, 15, 3));
  EXPECT_EQ(y, testing::ref_pixel_shuffle(x, 3));
  EXPECT_EQ(space_to_depth(y, 3), x);
  std::vector<float> a(x.data().begin(), x.data().end());
  std::vector<float> b(y.data().begin(), y.data().end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  EXPECT_EQ(a, b);
  EXPECT_THROW(pixel_shuffle(Tensor(Shape(1, 1, 1, 8)), 3), Error);
}

TEST(AnchorConcat, RepeatsPixelVector) {
  const Tensor x = make(Shape(1, 1, 1, 3), {1, 2, 3});
  const Tensor y = anchor_concat(x, 3);
  ASSERT_EQ(y.shape(), Shape(1, 1, 1, 27));
  for (int j = 0; j < 9; ++j)
    for (int i = 0; i < 3; ++i) EXPECT_EQ(y[j * 3 + i], float(i + 1));
  EXPECT_EQ(anchor_concat(Tensor(Shape(1, 2, 2, 3), 7.0f), 2),
            Tensor(Shape(1, 2, 2, 12), 7.0f));
}

TEST(AnchorConcat, EquivalentToNearest) {
  std::mt19937_64 rng(13);
  for (int s : {2, 3, 4}) {
    for (int i = 0; i < 10; ++i) {
      const Tensor x = random_byte_tensor(Shape(2, 5, 7, 3), rng);
      EXPECT_EQ(pixel_shuffle(anchor_concat(x, s), s), nearest_resize(x, s));
    }
  }
}

TEST(NearestResize, Examples) {
  EXPECT_EQ(nearest_resize(Tensor(Shape(1, 1, 1, 1), 4.0f), 3), Tensor(Shape(1, 3, 3, 1), 4.0f));
  const Tensor x = make(Shape(1, 2, 2, 1), {1, 2, 3, 4});
  const Tensor y = nearest_resize(x, 3);
  for (int yy = 0; yy < 6; ++yy)
    for (int xx = 0; xx < 6; ++xx) EXPECT_EQ(y.at(0, yy, xx, 0), x.at(0, yy / 3, xx / 3, 0));
  std::mt19937_64 rng(14);
  const Tensor r = random_tensor(Shape(1, 3, 4, 2), rng);
  EXPECT_EQ(nearest_resize(r, 2), testing::ref_nearest(r, 2));
}

TEST(BilinearResize, Examples) {
  EXPECT_EQ(bilinear_resize(Tensor(Shape(1, 3, 4, 3), 9.0f), 3), Tensor(Shape(1, 9, 12, 3), 9.0f));
  EXPECT_EQ(bilinear_resize(Tensor(Shape(1, 1, 1, 2), 2.0f), 4), Tensor(Shape(1, 4, 4, 2), 2.0f));
  std::mt19937_64 rng(15);
  for (int s : {2, 3, 4}) {
    const Tensor x = random_tensor(Shape(1, 4, 4, 2), rng);
    EXPECT_LE(max_rel_error(bilinear_resize(x, s), testing::ref_bilinear(x, s)), 1e-6);
  }
}

TEST(BilinearTap, ExactRational) {
  // s = 2: u = (dst + 0.5) / 2 - 0.5.
  const BilinearTap t0 = bilinear_tap(0, 4, 2);
  EXPECT_EQ(t0.lo, 0);
  EXPECT_EQ(t0.frac_num, 0);
  const BilinearTap t1 = bilinear_tap(1, 4, 2);
  EXPECT_EQ(t1.lo, 0);
  EXPECT_EQ(t1.hi, 1);
  EXPECT_EQ(t1.frac_num, 1);  // 0.25 = 1 / 4
  const BilinearTap t7 = bilinear_tap(7, 4, 2);
  EXPECT_EQ(t7.lo, 3);
  EXPECT_EQ(t7.frac_num, 0);
}

TEST(Clip, Examples) {
  EXPECT_EQ(clip_0_255(make(Shape(1, 1, 1, 3), {300, -5, 17})), make(Shape(1, 1, 1, 3), {255, 0, 17}));
  std::mt19937_64 rng(16);
  const Tensor in = random_tensor(Shape(1, 4, 4, 3), rng, 0.0, 255.0);
  EXPECT_EQ(clip_0_255(in), in);
  const Tensor x = random_tensor(Shape(1, 4, 4, 3), rng, -500.0, 500.0);
  const Tensor y = clip_0_255(x);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(y[i], std::clamp(x[i], 0.0f, 255.0f));
}

TEST(Ops, DoublePrecisionInstantiations) {
  std::mt19937_64 rng(17);
  const TensorD x = random_tensor<double>(Shape(1, 3, 3, 2), rng);
  const auto w = random_conv<double>(3, 2, 2, rng);
  EXPECT_LE(max_rel_error(conv2d(x, w), testing::ref_conv2d(x, w)), 1e-12);
}

}  // namespace
}  // namespace abpn
