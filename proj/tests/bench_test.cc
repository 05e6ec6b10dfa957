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

#include <set>

#include "abpn/bench.h"
#include "abpn/ops.h"

namespace abpn {
namespace {

BenchSpec small_spec(const std::string& group, const std::string& name) {
  BenchSpec s;
  s.group = group;
  s.name = name;
  s.inputs = {Shape(1, 64, 64, 8)};
  s.op = [](std::span<const Tensor> in, Tensor& out) { out = relu(in[0]); };
  return s;
}

TEST(DefaultSuite, TwelveRowsInFourGroups) {
  const auto suite = default_suite();
  ASSERT_EQ(suite.size(), 12u);
  const std::vector<std::pair<std::string, std::string>> expect{
      {"Tensor operator nodes", "Channel split"},
      {"Tensor operator nodes", "Channel concat"},
      {"Tensor operator nodes", "Add two tensors"},
      {"Tensor operator nodes", "Multiply two tensors"},
      {"Tensor operator nodes", "Global max pooling"},
      {"Tensor operator nodes", "Global average pooling"},
      {"Convolution nodes", "3x3 Convolution"},
      {"Convolution nodes", "1x1 Convolution"},
      {"Activation nodes", "ReLU"},
      {"Activation nodes", "Leaky ReLU"},
      {"Resize nodes", "Nearest neighbor"},
      {"Resize nodes", "Bilinear"}};
  for (std::size_t i = 0; i < 12; ++i) {
    EXPECT_EQ(suite[i].group, expect[i].first);
    EXPECT_EQ(suite[i].name, expect[i].second);
    EXPECT_GE(suite[i].repetitions, 10);
    EXPECT_GE(suite[i].warmup, 3);
    EXPECT_NO_THROW(suite[i].validate());
  }
  EXPECT_EQ(suite[6].inputs, suite[7].inputs);
  EXPECT_EQ(suite[6].inputs[0], Shape(1, 1080, 1920, 28));
  EXPECT_EQ(suite[10].inputs[0], Shape(1, 360, 640, 3));
  EXPECT_EQ(suite[2].inputs[0].c, 3);
}

TEST(BenchSpec, Validation) {
  BenchSpec s = small_spec("g", "n");
  s.repetitions = 9;
  EXPECT_THROW(s.validate(), Error);
  s.repetitions = 10;
  s.warmup = 2;
  EXPECT_THROW(s.validate(), Error);
}

TEST(Run, OneRowPerSpecInOrderWithStableChecksums) {
  std::vector<BenchSpec> suite{small_spec("B", "second"), small_spec("A", "first"),
                               small_spec("B", "third")};
  int callbacks = 0;
  const BenchReport a = run(suite, 3, [&](const BenchResult&) { ++callbacks; });
  const BenchReport b = run(suite, 3);
  ASSERT_EQ(a.rows.size(), 3u);
  EXPECT_EQ(callbacks, 3);
  EXPECT_EQ(a.rows[0].name, "second");
  EXPECT_EQ(a.rows[2].name, "third");
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_GT(a.rows[i].median_ms, 0.0);
    EXPECT_EQ(a.rows[i].repetitions, 10);
    EXPECT_EQ(a.rows[i].checksum, b.rows[i].checksum);
    EXPECT_EQ(a.rows[i].output_shape, "(1,64,64,8)");
  }
}

TEST(Run, NoopIsNearZero) {
  const std::vector<BenchSpec> suite{noop_spec()};
  const BenchReport r = run(suite);
  EXPECT_LT(r.rows[0].median_ms, 0.05);
}

TEST(Render, GroupsInOrderWithOneDecimal) {
  BenchReport r;
  r.rows.push_back({"Resize nodes", "Bilinear", "(1,2,2,3)", "(1,6,6,3)", 1.25, 1.3, 0.01, 0, 10});
  r.rows.push_back({"Tensor operator nodes", "Add two tensors", "(1,2,2,3)", "(1,2,2,3)", 12.34,
                    12.5, 0.02, 0, 10});
  const std::string text = render(r);
  EXPECT_LT(text.find("Tensor operator nodes"), text.find("Resize nodes"));
  EXPECT_NE(text.find("12.3"), std::string::npos);
  EXPECT_EQ(text.find("12.34"), std::string::npos);
  EXPECT_NE(text.find("methodology reproduction"), std::string::npos);
  const std::string csv = render_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "group,node,median_ms,mean_ms,cv,input_shape,output_shape,checksum");
}

TEST(Render, EmptyReportIsHeaderOnly) {
  const std::string text = render(BenchReport{});
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
}

}  // namespace
}  // namespace abpn
