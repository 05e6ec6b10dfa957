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

#include <cmath>
#include <random>
#include <set>

#include "abpn/train.h"
#include "test_util.h"

namespace abpn {
namespace {

TEST(HeInit, Statistics) {
  std::mt19937_64 rng(1);
  const auto w = he_init(3, 28, 500, rng);  // 126000 draws
  double sum = 0.0, sq = 0.0;
  for (float v : w.kernel) {
    sum += v;
    sq += double(v) * v;
  }
  const double n = double(w.kernel.size());
  const double std = std::sqrt(sq / n - (sum / n) * (sum / n));
  const double expect = std::sqrt(2.0 / (9.0 * 28.0));
  EXPECT_NEAR(std, expect, 0.05 * expect);
  for (float b : w.bias) EXPECT_EQ(b, 0.0f);
}

TEST(HeInit, BuildScalesOnlyTransition) {
  std::mt19937_64 rng(9);
  const Hyper h{};
  const ModelGraph g = build(h, 9);
  EXPECT_EQ(g.layers[0], he_init(3, 3, 28, rng));
  for (int i = 0; i < h.pairs; ++i) EXPECT_EQ(g.layers[1 + i], he_init(3, 28, 28, rng));
  auto t = he_init(3, 28, 27, rng);
  for (auto& v : t.kernel) v *= kTransitionInitScale;
  EXPECT_EQ(g.layers.back(), t);
}

TEST(HeInit, Deterministic) {
  std::mt19937_64 a(42), b(42);
  EXPECT_EQ(he_init(3, 4, 5, a), he_init(3, 4, 5, b));
}

TEST(Adam, ZeroGradientLeavesParams) {
  std::vector<double> p{1.0, -2.0};
  const std::vector<double> g{0.0, 0.0};
  AdamMoments<double> m;
  adam_update<double>(p, g, m, 1, 1e-3, 0.9, 0.999, 1e-8);
  EXPECT_EQ(p, (std::vector<double>{1.0, -2.0}));
}

TEST(Adam, FirstStep) {
  std::vector<double> p{1.0};
  const std::vector<double> g{0.5};
  AdamMoments<double> m;
  adam_update<double>(p, g, m, 1, 1e-3, 0.9, 0.999, 1e-8);
  EXPECT_NEAR(p[0], 1.0 - 1e-3 * (0.5 / (0.5 + 1e-8)), 1e-15);
}

TEST(Adam, ConstantGradientRecurrence) {
  std::vector<double> p{0.3};
  AdamMoments<double> mom;
  double ref = 0.3, m = 0.0, v = 0.0;
  const double g = -0.7, lr = 1e-2;
  for (int t = 1; t <= 3; ++t) {
    const std::vector<double> gv{g};
    adam_update<double>(p, gv, mom, t, lr, 0.9, 0.999, 1e-8);
    m = 0.9 * m + 0.1 * g;
    v = 0.999 * v + 0.001 * g * g;
    ref -= lr * (m / (1 - std::pow(0.9, t))) / (std::sqrt(v / (1 - std::pow(0.999, t))) + 1e-8);
  }
  EXPECT_NEAR(p[0], ref, 1e-10);
}

TEST(Adam, StepCounterIncrements) {
  ModelGraph g = build(Hyper{2, 2, 1, Variant::kAbrl}, 0);
  TrainState st;
  std::vector<ConvWeights<float>> grads;
  for (const auto& l : g.layers) grads.emplace_back(l.k, l.cin, l.cout);
  TrainConfig cfg;
  adam_step(st, g, grads, 1e-3, cfg);
  adam_step(st, g, grads, 1e-3, cfg);
  EXPECT_EQ(st.step, 2);
}

TEST(LrSchedule, Examples) {
  const TrainConfig cfg;
  EXPECT_DOUBLE_EQ(lr_at(0, cfg), 1e-3);
  EXPECT_DOUBLE_EQ(lr_at(200, cfg), 5e-4);
  EXPECT_DOUBLE_EQ(lr_at(999, cfg), 6.25e-5);
  const TrainConfig q = qat_defaults();
  EXPECT_DOUBLE_EQ(lr_at(0, q), 1e-4);
  EXPECT_DOUBLE_EQ(lr_at(50, q), 5e-5);
  EXPECT_EQ(q.total_epochs, 200);
}

// Marker patch with distinct values everywhere.
Tensor marker(int h, int w) {
  std::vector<float> v(std::size_t(h) * w * 3);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = float(i);
  return Tensor(Shape(1, h, w, 3), v);
}

TEST(Augment, IdentityAndInvolution) {
  const Tensor lr = marker(3, 4), hr = marker(9, 12);
  const PatchPair id = augment(lr, hr, 0);
  EXPECT_EQ(id.lr, lr);
  EXPECT_EQ(id.hr, hr);
  const PatchPair f = augment(lr, hr, 4);
  const PatchPair ff = augment(f.lr, f.hr, 4);
  EXPECT_EQ(ff.lr, lr);
  EXPECT_EQ(ff.hr, hr);
}

TEST(Augment, EightDistinctMatchingIndexMaps) {
  const int H = 3, W = 3;
  const Tensor x = marker(H, W);
  std::set<std::vector<float>> seen;
  for (int code = 0; code < 8; ++code) {
    const Tensor y = dihedral(x, code);
    for (int r = 0; r < H; ++r) {
      for (int c = 0; c < W; ++c) {
        int sr = r, sc = c;
        switch (code) {
          case 1: sr = H - 1 - c; sc = r; break;
          case 2: sr = H - 1 - r; sc = W - 1 - c; break;
          case 3: sr = c; sc = W - 1 - r; break;
          case 4: sc = W - 1 - c; break;
          case 5: sr = H - 1 - r; break;
          case 6: sr = c; sc = r; break;
          case 7: sr = H - 1 - c; sc = W - 1 - r; break;
          default: break;
        }
        for (int ch = 0; ch < 3; ++ch) EXPECT_EQ(y.at(0, r, c, ch), x.at(0, sr, sc, ch));
      }
    }
    seen.insert(std::vector<float>(y.data().begin(), y.data().end()));
  }
  EXPECT_EQ(seen.size(), 8u);
}

TEST(Augment, HrFollowsLr) {
  // Box-downscaling commutes with every dihedral transform.
  std::mt19937_64 rng(3);
  const auto hr = testing::random_tensor<float>(Shape(1, 12, 12, 3), rng, 0, 255);
  const Tensor lr = downscale_box(hr, 3);
  for (int code = 0; code < 8; ++code) {
    const PatchPair p = augment(lr, hr, code);
    EXPECT_LE(testing::max_rel_error(p.lr, downscale_box(p.hr, 3)), 1e-6);
  }
}

TEST(Epoch, StepsDerivedFromPixels) {
  const auto data = make_synthetic_pairs(3, 96, 3, 0);  // 32x32 LR each
  TrainConfig cfg;
  cfg.batch_size = 2;
  cfg.patch_size = 16;
  EXPECT_EQ(steps_per_epoch(data, cfg), 6);  // 3072 / 512
  cfg.steps_per_epoch = 4;
  EXPECT_EQ(steps_per_epoch(data, cfg), 4);
}

TEST(SampleBatch, AlignedAndDeterministic) {
  const auto data = make_synthetic_pairs(2, 48, 3, 5);
  TrainConfig cfg;
  cfg.batch_size = 4;
  cfg.patch_size = 8;
  cfg.augment = false;
  const PatchPair a = sample_batch(data, 3, cfg, 7);
  const PatchPair b = sample_batch(data, 3, cfg, 7);
  EXPECT_EQ(a.lr, b.lr);
  EXPECT_EQ(a.hr, b.hr);
  EXPECT_EQ(a.lr.shape(), Shape(4, 8, 8, 3));
  EXPECT_EQ(a.hr.shape(), Shape(4, 24, 24, 3));
  // Synthetic LR is the box mean of HR rounded to bytes.
  const Tensor ds = downscale_box(a.hr, 3);
  for (std::size_t i = 0; i < ds.size(); ++i) EXPECT_NEAR(ds[i], a.lr[i], 0.5 + 1e-4);
  EXPECT_NE(sample_batch(data, 3, cfg, 8).lr, a.lr);
}

TrainConfig tiny_config() {
  TrainConfig cfg;
  cfg.batch_size = 2;
  cfg.patch_size = 8;
  cfg.total_epochs = 2;
  cfg.steps_per_epoch = 3;
  return cfg;
}

TEST(Train, ZeroLearningRateKeepsWeights) {
  const auto data = make_synthetic_pairs(2, 48, 3, 1);
  ModelGraph g = build(Hyper{3, 4, 1, Variant::kAbrl}, 3);
  const ModelGraph init = g;
  TrainConfig cfg = tiny_config();
  cfg.total_epochs = 1;
  cfg.lr0 = 0.0;
  train(g, data, cfg);
  EXPECT_EQ(g, init);
}

TEST(Train, DeterministicLog) {
  const auto data = make_synthetic_pairs(2, 48, 3, 1);
  ModelGraph a = build(Hyper{3, 4, 1, Variant::kFsrl}, 3);
  ModelGraph b = a;
  const auto la = train(a, data, tiny_config());
  const auto lb = train(b, data, tiny_config());
  ASSERT_EQ(la.size(), 2u);
  EXPECT_EQ(format_loss_log(la), format_loss_log(lb));
  EXPECT_EQ(a, b);
  EXPECT_EQ(la[1].step, 6);
}

TEST(Train, PatchLargerThanImageIsConfigError) {
  const auto data = make_synthetic_pairs(1, 48, 3, 1);
  ModelGraph g = build(Hyper{3, 4, 1, Variant::kAbrl}, 0);
  TrainConfig cfg = tiny_config();
  cfg.patch_size = 32;
  try {
    train(g, data, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfig);
  }
}

TEST(Train, LossLogFormat) {
  const std::vector<LossLogEntry> log{{0, 10, 1e-3, 12.5}, {1, 20, 1e-3, 11.25}};
  EXPECT_EQ(format_loss_log(log), "epoch,step,lr,loss\n0,10,0.001,12.500000\n1,20,0.001,11.250000\n");
}

TEST(Train, LossDecreasesOnTinyProblem) {
  const auto data = make_synthetic_pairs(2, 48, 3, 2);
  ModelGraph g = build(Hyper{3, 8, 1, Variant::kBilinearIsrl}, 1);
  TrainConfig cfg = tiny_config();
  cfg.total_epochs = 20;
  const auto log = train(g, data, cfg);
  EXPECT_LT(log.back().loss, log.front().loss);
}

}  // namespace
}  // namespace abpn
