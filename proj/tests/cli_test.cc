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

// Drives the abpn binary end to end.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "abpn/data.h"
#include "abpn/model.h"
#include "abpn/serialize.h"

namespace abpn {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code = -1;
  std::string out;
};

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    std::random_device rd;
    dir_ = new fs::path(fs::temp_directory_path() / ("abpn_cli_" + std::to_string(rd())));
    fs::create_directories(*dir_);
    // 64x64 HR at s = 3 is not divisible; use 48.
    write_dataset(*dir_ / "data", make_synthetic_pairs(2, 48, 3, 11));
    ModelGraph zero = build(Hyper{}, 0);
    for (auto& l : zero.layers) {
      std::fill(l.kernel.begin(), l.kernel.end(), 0.0f);
      std::fill(l.bias.begin(), l.bias.end(), 0.0f);
    }
    save(*dir_ / "zero.abpn", zero);
  }
  static void TearDownTestSuite() {
    fs::remove_all(*dir_);
    delete dir_;
  }

  static std::string p(const std::string& name) { return (*dir_ / name).string(); }

  static Result run(const std::string& args) {
    const std::string log = p("last_output.txt");
    const std::string cmd = std::string(ABPN_CLI_PATH) + " " + args + " > " + log + " 2>&1";
    const int status = std::system(cmd.c_str());
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
  }

  static std::vector<std::uint8_t> bytes(const std::string& path) { return read_file(path); }

  static std::string tiny_train() {
    return " --data " + p("data") + " --channels 4 --pairs 1 --patch 8 --batch 2 --epochs 2";
  }

  static fs::path* dir_;
};

fs::path* Cli::dir_ = nullptr;

TEST_F(Cli, HelpListsDefaults) {
  const Result r = run("train --help");
  EXPECT_EQ(r.code, 0);
  for (const char* flag : {"--scale", "--channels", "--pairs", "--variant", "--seed", "--out",
                           "--epochs", "--lr", "--batch", "--patch", "--config"})
    EXPECT_NE(r.out.find(flag), std::string::npos) << flag;
  EXPECT_NE(r.out.find("28"), std::string::npos);
  EXPECT_NE(r.out.find("0.001"), std::string::npos);
}

TEST_F(Cli, TrainEchoesDefaults) {
  const Result r = run("train --data " + p("data") + " --epochs 1 --patch 8 --lr 0 --out " +
                       p("echo.abpn"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("batch=16"), std::string::npos);
  EXPECT_NE(r.out.find("patch=8"), std::string::npos);
  const Result d = run("train --help");
  EXPECT_NE(d.out.find("64"), std::string::npos);
}

TEST_F(Cli, TrainWithZeroLrSavesFreshBuild) {
  const Result r = run("train --data " + p("data") + " --epochs 1 --lr 0 --patch 8 --seed 5 --out " +
                       p("lr0.abpn"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(bytes(p("lr0.abpn")), encode(build(Hyper{}, 5)));
}

TEST_F(Cli, TrainIsDeterministic) {
  ASSERT_EQ(run("train" + tiny_train() + " --seed 3 --out " + p("a.abpn")).code, 0);
  ASSERT_EQ(run("train" + tiny_train() + " --seed 3 --out " + p("b.abpn") + " --log " +
                p("b.csv")).code, 0);
  EXPECT_EQ(bytes(p("a.abpn")), bytes(p("b.abpn")));
  std::ifstream log(p("b.csv"));
  std::string header;
  std::getline(log, header);
  EXPECT_EQ(header, "epoch,step,lr,loss");
}

TEST_F(Cli, JsonConfigAndOverride) {
  std::ofstream(p("cfg.json")) << R"({"channels": 4, "pairs": 1, "patch": 8, "batch": 2,
                                     "epochs": 1, "lr": 0.5})";
  const Result r = run("train --config " + p("cfg.json") + " --lr 0 --data " + p("data") +
                       " --out " + p("cfg.abpn"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("lr0=0 "), std::string::npos);
  EXPECT_NE(r.out.find("channels=4"), std::string::npos);
  std::ofstream(p("bad.json")) << R"({"colour": 1})";
  const Result bad = run("train --config " + p("bad.json") + " --data " + p("data") +
                         " --out " + p("bad.abpn"));
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.out.find("error: config:"), std::string::npos);
}

TEST_F(Cli, QuantizeZeroModelAndRejectQuantized) {
  const Result r = run("quantize --model " + p("zero.abpn") + " --data " + p("data") +
                       " --calib-count 2 --calib-patch 8 --out " + p("zero_q.abpn"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("1e-08"), std::string::npos);
  const QuantizedModel qm = load_quantized(p("zero_q.abpn"));
  for (const auto& l : qm.layers) EXPECT_EQ(l.weights.qp().scale, 1e-8);
  const Result again = run("quantize --model " + p("zero_q.abpn") + " --data " + p("data") +
                           " --out " + p("zero_qq.abpn"));
  EXPECT_EQ(again.code, 1);
  EXPECT_NE(again.out.find("already quantized"), std::string::npos);
  EXPECT_FALSE(fs::exists(p("zero_qq.abpn")));
}

TEST_F(Cli, QatEchoesDefaultsAndSaves) {
  const Result r = run("qat --model " + p("zero.abpn") + " --data " + p("data") +
                       " --epochs 1 --patch 8 --batch 2 --calib-count 2 --calib-patch 8 --out " +
                       p("qat.abpn"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("lr0=0.0001"), std::string::npos);
  const Result h = run("qat --help");
  EXPECT_NE(h.out.find("200"), std::string::npos);
  EXPECT_NO_THROW(load_quantized(p("qat.abpn")));
}

TEST_F(Cli, InferZeroAbrlIsNearestAndDeterministic) {
  const std::string lr = p("data") + "/LR/img000.png";
  ASSERT_EQ(run("infer --model " + p("zero.abpn") + " --input " + lr + " --out " + p("sr1.png")).code, 0);
  ASSERT_EQ(run("infer --model " + p("zero.abpn") + " --input " + lr + " --out " + p("sr2.png")).code, 0);
  const Image in = read_png(lr);
  const Image sr = read_png(p("sr1.png"));
  EXPECT_EQ(sr.width, 3 * in.width);
  EXPECT_EQ(sr, nearest_upsample(in, 3));
  EXPECT_EQ(bytes(p("sr1.png")), bytes(p("sr2.png")));
  // Integer path.
  ASSERT_EQ(run("quantize --model " + p("zero.abpn") + " --data " + p("data") +
                " --calib-count 2 --calib-patch 8 --out " + p("zq.abpn")).code, 0);
  const Result r = run("infer --model " + p("zq.abpn") + " --input " + lr + " --out " + p("sr3.png"));
  EXPECT_NE(r.out.find("int8"), std::string::npos);
  EXPECT_EQ(read_png(p("sr3.png")), sr);
}

TEST_F(Cli, Eval) {
  const Result self = run("eval --sr-dir " + p("data") + "/HR --hr-dir " + p("data") + "/HR");
  ASSERT_EQ(self.code, 0) << self.out;
  EXPECT_NE(self.out.find("img000,inf"), std::string::npos);
  EXPECT_NE(self.out.find("mean,inf"), std::string::npos);

  const Result model = run("eval --model " + p("zero.abpn") + " --data " + p("data"));
  const Result nearest = run("eval --nearest --data " + p("data"));
  ASSERT_EQ(model.code, 0) << model.out;
  EXPECT_EQ(model.out, nearest.out);
  const auto pairs = load_dataset(fs::path(p("data")), 3).load_images();
  double sum = 0.0;
  for (const auto& pr : pairs) sum += psnr_rgb(nearest_upsample(pr.lr, 3), pr.hr);
  EXPECT_NE(nearest.out.find("mean," + format_psnr(sum / 2)), std::string::npos);
  EXPECT_NE(nearest.out.find("img001," + format_psnr(psnr_rgb(nearest_upsample(pairs[1].lr, 3),
                                                               pairs[1].hr))),
            std::string::npos);
}

TEST_F(Cli, TinyAblation) {
  const Result r = run("ablate --images 2 --val-images 1 --hr-size 48 --channels 4 --pairs 1 "
                       "--epochs 1 --patch 8 --batch 2 --seeds 0 --calib-count 2 --calib-patch 8");
  ASSERT_EQ(r.code, 0) << r.out;
  for (const char* row : {"Baseline ", "Baseline+nearest", "Baseline+bilinear", "Baseline+FSRL",
                          "Baseline+ABRL"})
    EXPECT_NE(r.out.find(row), std::string::npos) << row;
  EXPECT_NE(r.out.find("42.54K"), std::string::npos);
}

TEST_F(Cli, Errors) {
  const Result missing = run("infer --model " + p("nope.abpn") + " --input x.png --out " + p("o.png"));
  EXPECT_EQ(missing.code, 1);
  EXPECT_EQ(missing.out.rfind("error: io:", 0), 0u) << missing.out;
  const Result usage = run("train --bogus");
  EXPECT_EQ(usage.code, 2);
  EXPECT_EQ(usage.out.rfind("error: usage:", 0), 0u);
  const Result nodata = run("train --out " + p("x.abpn"));
  EXPECT_EQ(nodata.code, 1);
  EXPECT_FALSE(fs::exists(p("x.abpn")));
  const Result baddir = run("train --data " + p("data") + " --out /nonexistent/dir/m.abpn");
  EXPECT_EQ(baddir.code, 1);
  std::ofstream(p("trunc.abpn")) << "ABPN";
  const Result trunc = run("infer --model " + p("trunc.abpn") + " --input " + p("data") +
                           "/LR/img000.png --out " + p("t.png"));
  EXPECT_EQ(trunc.code, 1);
  EXPECT_NE(trunc.out.find("error: format:"), std::string::npos);
  EXPECT_FALSE(fs::exists(p("t.png")));
}

TEST_F(Cli, Synth) {
  ASSERT_EQ(run("synth --count 3 --hr-size 30 --seed 2 --out " + p("syn")).code, 0);
  EXPECT_EQ(load_dataset(fs::path(p("syn")), 3).pairs.size(), 3u);
}

}  // namespace
}  // namespace abpn
