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

// abpn: train / quantize / qat / infer / eval / bench / ablate / synth.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "abpn/ablation.h"
#include "abpn/bench.h"
#include "abpn/data.h"
#include "abpn/model.h"
#include "abpn/qat.h"
#include "abpn/quant.h"
#include "abpn/runtime.h"
#include "abpn/serialize.h"
#include "abpn/train.h"

namespace fs = std::filesystem;
using namespace abpn;

namespace {

// Applies a flat JSON object of long-flag values to `app`. Options already
// given on the command line keep their values.
void apply_json_config(CLI::App* app, const std::string& path) {
  std::ifstream in(path);
  check(bool(in), ErrorKind::kIo, "cannot open config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kConfig, "config " + path + " is not valid JSON: " + e.what());
  }
  check(j.is_object(), ErrorKind::kConfig, "config must be a JSON object");
  auto text = [](const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return std::string(v.get<bool>() ? "true" : "false");
    return v.dump();
  };
  for (auto it = j.begin(); it != j.end(); ++it) {
    CLI::Option* opt = app->get_option_no_throw("--" + it.key());
    check(opt != nullptr && it.key() != "config", ErrorKind::kConfig,
          "unknown config key '" + it.key() + "' for " + app->get_name());
    if (opt->count() > 0) continue;
    std::vector<std::string> values;
    if (it->is_array()) {
      for (const auto& e : *it) values.push_back(text(e));
    } else {
      values.push_back(text(*it));
    }
    try {
      for (const auto& v : values) opt->add_result(v);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      fail(ErrorKind::kConfig, "config key '" + it.key() + "': " + e.what());
    }
  }
}

struct Common {
  int scale = 3;
  int channels = 28;
  int pairs = 5;
  std::string variant = "abrl";
  std::uint64_t seed = 0;
  std::string out;

  Hyper hyper() const {
    Hyper h;
    h.scale = scale;
    h.channels = channels;
    h.pairs = pairs;
    h.variant = parse_variant(variant);
    h.validate();
    return h;
  }
};

struct DataFlags {
  std::string data;
  std::string lr_dir;
  std::string hr_dir;

  bool given() const { return !data.empty() || !lr_dir.empty(); }
  PairedDataset load(int scale) const {
    if (!data.empty()) {
      check(lr_dir.empty() && hr_dir.empty(), ErrorKind::kUsage,
            "use either --data or --lr-dir/--hr-dir");
      return load_dataset(fs::path(data), scale);
    }
    check(!lr_dir.empty() && !hr_dir.empty(), ErrorKind::kUsage,
          "a dataset is required: --data <root> or --lr-dir and --hr-dir");
    return load_dataset(fs::path(lr_dir), fs::path(hr_dir), scale);
  }
};

struct TrainFlags {
  int epochs = 1000;
  double lr = 1e-3;
  int batch = 16;
  int patch = 64;
  int decay_every = 200;
  double decay_factor = 0.5;
  int steps_per_epoch = 0;
  bool no_augment = false;
  std::string log;

  TrainConfig config(std::uint64_t seed) const {
    TrainConfig c;
    c.total_epochs = epochs;
    c.lr0 = lr;
    c.batch_size = batch;
    c.patch_size = patch;
    c.decay_every = decay_every;
    c.decay_factor = decay_factor;
    c.steps_per_epoch = steps_per_epoch;
    c.augment = !no_augment;
    c.seed = seed;
    c.validate();
    return c;
  }
};

void add_common(CLI::App* app, Common& c, bool model_flags) {
  if (model_flags) {
    app->add_option("--scale", c.scale, "upscaling factor s")->capture_default_str();
    app->add_option("--channels", c.channels, "kernels per conv layer")
        ->capture_default_str();
    app->add_option("--pairs", c.pairs, "Conv-ReLU pairs")->capture_default_str();
    app->add_option("--variant", c.variant,
                    "residual wiring: baseline|nearest|bilinear|fsrl|abrl")
        ->capture_default_str();
  }
  app->add_option("--seed", c.seed, "random seed")->capture_default_str();
  app->add_option("--config", "JSON file with flag values (flags override)");
}

void add_data(CLI::App* app, DataFlags& d) {
  app->add_option("--data", d.data, "dataset root holding LR/ and HR/");
  app->add_option("--lr-dir", d.lr_dir, "LR image directory");
  app->add_option("--hr-dir", d.hr_dir, "HR image directory");
}

void add_train(CLI::App* app, TrainFlags& t) {
  app->add_option("--epochs", t.epochs, "total epochs")->capture_default_str();
  app->add_option("--lr", t.lr, "initial learning rate")->capture_default_str();
  app->add_option("--batch", t.batch, "patches per step")->capture_default_str();
  app->add_option("--patch", t.patch, "LR patch side")->capture_default_str();
  app->add_option("--decay-every", t.decay_every, "epochs per LR decay")
      ->capture_default_str();
  app->add_option("--decay-factor", t.decay_factor, "LR decay factor")
      ->capture_default_str();
  app->add_option("--steps-per-epoch", t.steps_per_epoch,
                  "steps per epoch (0: LR pixels / (batch * patch^2))")
      ->capture_default_str();
  app->add_flag("--no-augment", t.no_augment, "disable flip/rotate augmentation");
  app->add_option("--log", t.log, "loss log CSV path");
}

void echo_train(const TrainConfig& c, int steps) {
  std::printf(
      "config: batch=%d patch=%d lr0=%g decay_every=%d decay_factor=%g "
      "epochs=%d betas=(%g,%g) eps=%g seed=%llu steps_per_epoch=%d augment=%s\n",
      c.batch_size, c.patch_size, c.lr0, c.decay_every, c.decay_factor,
      c.total_epochs, c.beta1, c.beta2, c.eps,
      static_cast<unsigned long long>(c.seed), steps, c.augment ? "on" : "off");
}

void require_output(const std::string& path, const char* flag) {
  check(!path.empty(), ErrorKind::kUsage, std::string(flag) + " is required");
  const fs::path p(path);
  const fs::path parent = p.parent_path().empty() ? fs::path(".") : p.parent_path();
  check(fs::is_directory(parent), ErrorKind::kIo,
        "output directory does not exist: " + parent.string());
}

void require_file(const std::string& path, const char* flag) {
  check(!path.empty(), ErrorKind::kUsage, std::string(flag) + " is required");
  check(fs::is_regular_file(path), ErrorKind::kIo, "no such file: " + path);
}

void write_text_atomic(const std::string& path, const std::string& text) {
  write_file_atomic(path, std::span<const std::uint8_t>(
                              reinterpret_cast<const std::uint8_t*>(text.data()),
                              text.size()));
}

void write_png_atomic(const fs::path& path, const Image& image) {
  fs::path tmp = path;
  tmp += ".tmp.png";
  write_png(tmp, image);
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    fail(ErrorKind::kIo, "cannot rename onto " + path.string());
  }
}

void print_quant_summary(const QuantizedModel& qm) {
  std::printf("%-12s %14s %14s %14s %12s %6s\n", "layer", "input scale",
              "weight scale", "output scale", "multiplier", "shift");
  for (std::size_t i = 0; i < qm.layers.size(); ++i) {
    const auto& l = qm.layers[i];
    std::printf("%-12s %14.6g %14.6g %14.6g %12d %6d\n",
                layer_name(qm.hyper, int(i)).c_str(), l.input.scale,
                l.weights.qp().scale, l.output.scale, l.multiplier.m,
                l.multiplier.shift);
  }
  for (const auto& [name, qp] : qm.activations) {
    std::printf("act %-12s scale=%.6g zero_point=%d\n", name.c_str(), qp.scale,
                qp.zero_point);
  }
}

std::vector<Tensor> calib_set(const std::vector<ImagePair>& images, int count,
                              int patch, std::uint64_t seed) {
  return calibration_patches(images, count, patch, seed);
}

}  // namespace

int main(int argc, char** argv) {
  abpn::tune_allocator();
  CLI::App app{"ABPN training, quantization and integer inference"};
  app.require_subcommand(1);

  // train
  Common train_c;
  DataFlags train_d;
  TrainFlags train_t;
  auto* train_cmd = app.add_subcommand("train", "train a float model");
  add_common(train_cmd, train_c, true);
  add_data(train_cmd, train_d);
  add_train(train_cmd, train_t);
  train_cmd->add_option("--out", train_c.out, "output .abpn path")->required();

  // quantize
  Common quant_c;
  DataFlags quant_d;
  std::string quant_model;
  int calib_count = 16;
  int calib_patch = 64;
  auto* quant_cmd = app.add_subcommand("quantize", "post-training quantization");
  add_common(quant_cmd, quant_c, false);
  add_data(quant_cmd, quant_d);
  quant_cmd->add_option("--model", quant_model, "float .abpn model")->required();
  quant_cmd->add_option("--calib-count", calib_count, "calibration patches")
      ->capture_default_str();
  quant_cmd->add_option("--calib-patch", calib_patch, "calibration patch side")
      ->capture_default_str();
  quant_cmd->add_option("--out", quant_c.out, "output quantized .abpn path")
      ->required();

  // qat
  Common qat_c;
  DataFlags qat_d;
  TrainFlags qat_t;
  const TrainConfig qd = qat_defaults();
  qat_t.epochs = qd.total_epochs;
  qat_t.lr = qd.lr0;
  qat_t.decay_every = qd.decay_every;
  std::string qat_model;
  std::string qat_float_out;
  int qat_calib_count = 16;
  int qat_calib_patch = 64;
  auto* qat_cmd = app.add_subcommand("qat", "PTQ followed by quantization-aware training");
  add_common(qat_cmd, qat_c, false);
  add_data(qat_cmd, qat_d);
  add_train(qat_cmd, qat_t);
  qat_cmd->add_option("--model", qat_model, "float .abpn model")->required();
  qat_cmd->add_option("--calib-count", qat_calib_count, "calibration patches")
      ->capture_default_str();
  qat_cmd->add_option("--calib-patch", qat_calib_patch, "calibration patch side")
      ->capture_default_str();
  qat_cmd->add_option("--float-out", qat_float_out, "also save the fine-tuned float model");
  qat_cmd->add_option("--out", qat_c.out, "output quantized .abpn path")->required();

  // infer
  Common infer_c;
  std::string infer_model;
  std::string infer_input;
  auto* infer_cmd = app.add_subcommand("infer", "super-resolve one PNG");
  add_common(infer_cmd, infer_c, false);
  infer_cmd->add_option("--model", infer_model, "float or quantized .abpn")->required();
  infer_cmd->add_option("--input", infer_input, "LR PNG")->required();
  infer_cmd->add_option("--out", infer_c.out, "SR PNG path")->required();

  // eval
  Common eval_c;
  DataFlags eval_d;
  std::string eval_model;
  std::string eval_sr_dir;
  bool eval_nearest = false;
  auto* eval_cmd = app.add_subcommand("eval", "RGB PSNR over a paired set");
  add_common(eval_cmd, eval_c, false);
  add_data(eval_cmd, eval_d);
  eval_cmd->add_option("--model", eval_model, "float or quantized .abpn");
  eval_cmd->add_option("--sr-dir", eval_sr_dir,
                       "compare precomputed SR PNGs in this directory to --hr-dir");
  eval_cmd->add_flag("--nearest", eval_nearest, "evaluate nearest-neighbor upsampling");
  eval_cmd->add_option("--eval-scale", eval_c.scale, "scale for --nearest / datasets")
      ->capture_default_str();
  eval_cmd->add_option("--out", eval_c.out, "also write the report to this file");

  // bench
  Common bench_c;
  int bench_reps = kMinRepetitions;
  int bench_warmup = kMinWarmup;
  std::string bench_csv;
  auto* bench_cmd = app.add_subcommand("bench", "meta-node latency table");
  add_common(bench_cmd, bench_c, false);
  bench_cmd->add_option("--scale", bench_c.scale, "resize factor")->capture_default_str();
  bench_cmd->add_option("--reps", bench_reps, "timed repetitions (>= 10)")
      ->capture_default_str();
  bench_cmd->add_option("--warmup", bench_warmup, "warmup runs (>= 3)")
      ->capture_default_str();
  bench_cmd->add_option("--csv", bench_csv, "also write comma-separated results");
  bench_cmd->add_option("--out", bench_c.out, "also write the table to this file");

  // ablate
  Common abl_c;
  DataFlags abl_d;
  AblationConfig abl = desk_ablation_config();
  TrainFlags abl_t;
  abl_t.epochs = abl.train.total_epochs;
  abl_t.patch = abl.train.patch_size;
  abl_t.batch = abl.train.batch_size;
  abl_t.decay_every = abl.train.decay_every;
  abl_t.lr = abl.train.lr0;
  abl_t.steps_per_epoch = abl.train.steps_per_epoch;
  std::vector<std::uint64_t> abl_seeds = abl.seeds;
  int abl_images = 10;
  int abl_val = 4;
  int abl_hr = 192;
  int abl_qat_epochs = 0;
  auto* abl_cmd = app.add_subcommand(
      "ablate", "train, quantize and compare all residual-learning variants");
  add_common(abl_cmd, abl_c, false);
  abl_cmd->add_option("--scale", abl_c.scale, "upscaling factor s")->capture_default_str();
  abl_cmd->add_option("--channels", abl_c.channels, "kernels per conv layer")
      ->capture_default_str();
  abl_cmd->add_option("--pairs", abl_c.pairs, "Conv-ReLU pairs")->capture_default_str();
  add_data(abl_cmd, abl_d);
  add_train(abl_cmd, abl_t);
  abl_cmd->add_option("--seeds", abl_seeds, "training seeds")->capture_default_str();
  abl_cmd->add_option("--images", abl_images, "synthetic training images")
      ->capture_default_str();
  abl_cmd->add_option("--val-images", abl_val, "synthetic validation images")
      ->capture_default_str();
  abl_cmd->add_option("--hr-size", abl_hr, "synthetic HR side")->capture_default_str();
  abl_cmd->add_option("--calib-count", abl.calib_patches, "calibration patches")
      ->capture_default_str();
  abl_cmd->add_option("--calib-patch", abl.calib_patch_size, "calibration patch side")
      ->capture_default_str();
  abl_cmd->add_option("--qat-epochs", abl_qat_epochs, "QAT epochs after PTQ (0: skip)")
      ->capture_default_str();
  abl_cmd->add_option("--out", abl_c.out, "also write the table to this file");

  // synth
  Common synth_c;
  int synth_count = 10;
  int synth_hr = 192;
  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic paired dataset");
  add_common(synth_cmd, synth_c, false);
  synth_cmd->add_option("--scale", synth_c.scale, "upscaling factor")->capture_default_str();
  synth_cmd->add_option("--count", synth_count, "image pairs")->capture_default_str();
  synth_cmd->add_option("--hr-size", synth_hr, "HR side")->capture_default_str();
  synth_cmd->add_option("--out", synth_c.out, "dataset root (LR/ and HR/)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    for (auto& ch : msg) {
      if (ch == '\n') ch = ' ';
    }
    std::fprintf(stderr, "error: usage: %s\n", msg.c_str());
    return 2;
  }

  try {
    for (CLI::App* sub : app.get_subcommands()) {
      const CLI::Option* cfg = sub->get_option("--config");
      if (cfg->count() > 0) apply_json_config(sub, cfg->as<std::string>());
    }
    if (*train_cmd) {
      const Hyper h = train_c.hyper();
      const TrainConfig cfg = train_t.config(train_c.seed);
      require_output(train_c.out, "--out");
      if (!train_t.log.empty()) require_output(train_t.log, "--log");
      const auto images = train_d.load(h.scale).load_images();
      const int steps = steps_per_epoch(images, cfg);
      echo_train(cfg, steps);
      std::printf("model: variant=%s scale=%d channels=%d pairs=%d params=%lld\n",
                  std::string(variant_name(h.variant)).c_str(), h.scale,
                  h.channels, h.pairs, static_cast<long long>(param_count(h)));
      ModelGraph model = build(h, train_c.seed);
      TrainOptions opts;
      opts.on_epoch = [](const LossLogEntry& e) {
        std::printf("epoch %d step %lld lr %g loss %.6f\n", e.epoch,
                    static_cast<long long>(e.step), e.lr, e.loss);
        std::fflush(stdout);
      };
      const auto log = train(model, images, cfg, opts);
      save(train_c.out, model);
      if (!train_t.log.empty()) write_text_atomic(train_t.log, format_loss_log(log));
      std::printf("saved %s\n", train_c.out.c_str());
    } else if (*quant_cmd) {
      require_file(quant_model, "--model");
      require_output(quant_c.out, "--out");
      const AnyModel any = load(quant_model);
      check(std::holds_alternative<ModelGraph>(any), ErrorKind::kUsage,
            quant_model + " is already quantized");
      const ModelGraph& model = std::get<ModelGraph>(any);
      const auto images = quant_d.load(model.hyper.scale).load_images();
      std::printf("calibration: %d patches of %dx%d, seed %llu\n", calib_count,
                  calib_patch, calib_patch,
                  static_cast<unsigned long long>(quant_c.seed));
      const CalibStats stats =
          calibrate(model, calib_set(images, calib_count, calib_patch, quant_c.seed));
      const QuantizedModel qm = ptq(model, stats);
      print_quant_summary(qm);
      save(quant_c.out, qm);
      std::printf("saved %s\n", quant_c.out.c_str());
    } else if (*qat_cmd) {
      require_file(qat_model, "--model");
      require_output(qat_c.out, "--out");
      if (!qat_float_out.empty()) require_output(qat_float_out, "--float-out");
      if (!qat_t.log.empty()) require_output(qat_t.log, "--log");
      const TrainConfig cfg = qat_t.config(qat_c.seed);
      const AnyModel any = load(qat_model);
      check(std::holds_alternative<ModelGraph>(any), ErrorKind::kUsage,
            qat_model + " is already quantized; qat needs the float model");
      ModelGraph model = std::get<ModelGraph>(any);
      const auto images = qat_d.load(model.hyper.scale).load_images();
      echo_train(cfg, steps_per_epoch(images, cfg));
      const CalibStats stats = calibrate(
          model, calib_set(images, qat_calib_count, qat_calib_patch, qat_c.seed));
      TrainOptions opts;
      opts.on_epoch = [](const LossLogEntry& e) {
        std::printf("epoch %d step %lld lr %g loss %.6f\n", e.epoch,
                    static_cast<long long>(e.step), e.lr, e.loss);
        std::fflush(stdout);
      };
      const auto log = qat(model, stats, images, cfg, opts);
      const QuantizedModel qm = ptq(model, stats);
      print_quant_summary(qm);
      save(qat_c.out, qm);
      if (!qat_float_out.empty()) save(qat_float_out, model);
      if (!qat_t.log.empty()) write_text_atomic(qat_t.log, format_loss_log(log));
      std::printf("saved %s\n", qat_c.out.c_str());
    } else if (*infer_cmd) {
      require_file(infer_model, "--model");
      require_file(infer_input, "--input");
      require_output(infer_c.out, "--out");
      const AnyModel any = load(infer_model);
      const Image lr = read_png(infer_input);
      Image sr;
      if (const auto* qm = std::get_if<QuantizedModel>(&any)) {
        sr = infer_int8(*qm, lr);
        std::printf("path: int8\n");
      } else {
        sr = image_from_tensor(forward(std::get<ModelGraph>(any), tensor_from_image(lr)));
        std::printf("path: float\n");
      }
      write_png_atomic(infer_c.out, sr);
      std::printf("wrote %s (%dx%d)\n", infer_c.out.c_str(), sr.width, sr.height);
    } else if (*eval_cmd) {
      if (!eval_c.out.empty()) require_output(eval_c.out, "--out");
      const int modes = int(!eval_model.empty()) + int(!eval_sr_dir.empty()) +
                        int(eval_nearest);
      check(modes == 1, ErrorKind::kUsage,
            "eval needs exactly one of --model, --sr-dir, --nearest");
      std::ostringstream os;
      os << "image,psnr_db\n";
      std::vector<double> rows;
      auto add_row = [&](const std::string& name, double db) {
        rows.push_back(db);
        os << name << "," << format_psnr(db) << "\n";
      };
      if (!eval_sr_dir.empty()) {
        check(!eval_d.hr_dir.empty(), ErrorKind::kUsage, "--sr-dir needs --hr-dir");
        const auto set = load_dataset(eval_sr_dir, eval_d.hr_dir, 1);
        for (const auto& p : set.load_images()) add_row(p.name, psnr_rgb(p.lr, p.hr));
      } else if (eval_nearest) {
        const auto set = eval_d.load(eval_c.scale).load_images();
        for (const auto& p : set) {
          add_row(p.name, psnr_rgb(nearest_upsample(p.lr, eval_c.scale), p.hr));
        }
      } else {
        require_file(eval_model, "--model");
        const AnyModel any = load(eval_model);
        const int s = std::visit([](const auto& m) { return m.hyper.scale; }, any);
        const auto set = eval_d.load(s).load_images();
        for (const auto& p : set) {
          Image sr;
          if (const auto* qm = std::get_if<QuantizedModel>(&any)) {
            sr = infer_int8(*qm, p.lr);
          } else {
            sr = image_from_tensor(
                forward(std::get<ModelGraph>(any), tensor_from_image(p.lr)));
          }
          add_row(p.name, psnr_rgb(sr, p.hr));
        }
      }
      double sum = 0.0;
      for (double v : rows) sum += v;
      os << "mean," << format_psnr(sum / double(rows.size())) << "\n";
      std::fputs(os.str().c_str(), stdout);
      if (!eval_c.out.empty()) write_text_atomic(eval_c.out, os.str());
    } else if (*bench_cmd) {
      if (!bench_csv.empty()) require_output(bench_csv, "--csv");
      if (!bench_c.out.empty()) require_output(bench_c.out, "--out");
      const auto suite = default_suite(bench_c.scale, bench_reps, bench_warmup);
      for (const auto& s : suite) s.validate();
      const BenchReport report = run(suite, bench_c.seed);
      const std::string table = render(report);
      std::fputs(table.c_str(), stdout);
      if (!bench_c.out.empty()) write_text_atomic(bench_c.out, table);
      if (!bench_csv.empty()) write_text_atomic(bench_csv, render_csv(report));
    } else if (*abl_cmd) {
      if (!abl_c.out.empty()) require_output(abl_c.out, "--out");
      abl.hyper.scale = abl_c.scale;
      abl.hyper.channels = abl_c.channels;
      abl.hyper.pairs = abl_c.pairs;
      abl.hyper.validate();
      abl.train = abl_t.config(0);
      abl.seeds = abl_seeds;
      abl.qat_epochs = abl_qat_epochs;
      abl.qat.patch_size = abl.train.patch_size;
      abl.qat.batch_size = abl.train.batch_size;
      abl.qat.steps_per_epoch = abl.train.steps_per_epoch;
      std::vector<ImagePair> train_set;
      std::vector<ImagePair> val_set;
      if (abl_d.given()) {
        train_set = abl_d.load(abl.hyper.scale).load_images();
        val_set = train_set;
      } else {
        train_set = make_synthetic_pairs(abl_images, abl_hr, abl.hyper.scale, abl_c.seed);
        val_set = make_synthetic_pairs(abl_val, abl_hr, abl.hyper.scale,
                                       abl_c.seed + 0x5eed);
      }
      std::printf(
          "DESK-SCALE ABLATION (not the full-scale training protocol): %zu train / "
          "%zu val images, %d epochs, patch %d, batch %d, lr0 %g halved every %d "
          "epochs, %zu seeds\n",
          train_set.size(), val_set.size(), abl.train.total_epochs,
          abl.train.patch_size, abl.train.batch_size, abl.train.lr0,
          abl.train.decay_every, abl.seeds.size());
      std::fflush(stdout);
      const AblationReport report =
          run_ablation(abl, train_set, val_set, [](const std::string& line) {
            std::printf("%s\n", line.c_str());
            std::fflush(stdout);
          });
      const std::string table = render(report);
      std::fputs(table.c_str(), stdout);
      if (!abl_c.out.empty()) write_text_atomic(abl_c.out, table);
    } else if (*synth_cmd) {
      check(!synth_c.out.empty(), ErrorKind::kUsage, "--out is required");
      const auto pairs = make_synthetic_pairs(synth_count, synth_hr, synth_c.scale,
                                              synth_c.seed);
      write_dataset(synth_c.out, pairs);
      std::printf("wrote %d pairs to %s\n", synth_count, synth_c.out.c_str());
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s: %s\n",
                 std::string(error_kind_name(e.kind())).c_str(), e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: internal: %s\n", e.what());
    return 1;
  }
  return 0;
}
