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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "abpn/data.h"
#include "abpn/error.h"
#include "abpn/model.h"
#include "abpn/quant.h"
#include "abpn/serialize.h"

namespace py = pybind11;

namespace abpn {
namespace {

using ImageArray = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;
using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

Image to_image(const ImageArray& a) {
  check(a.ndim() == 3 && a.shape(2) == 3, ErrorKind::kShape,
        "expected a (H, W, 3) uint8 array");
  Image img(int(a.shape(0)), int(a.shape(1)));
  std::memcpy(img.pixels.data(), a.data(), img.pixels.size());
  return img;
}

ImageArray from_image(const Image& img) {
  ImageArray a({py::ssize_t(img.height), py::ssize_t(img.width), py::ssize_t(3)});
  std::memcpy(a.mutable_data(), img.pixels.data(), img.pixels.size());
  return a;
}

Tensor to_tensor(const FloatArray& a) {
  check(a.ndim() == 4, ErrorKind::kShape, "expected an NHWC float32 array");
  const Shape s(a.shape(0), a.shape(1), a.shape(2), a.shape(3));
  return Tensor(s, std::vector<float>(a.data(), a.data() + s.size()));
}

FloatArray from_tensor(const Tensor& t) {
  const Shape& s = t.shape();
  FloatArray a({py::ssize_t(s.n), py::ssize_t(s.h), py::ssize_t(s.w), py::ssize_t(s.c)});
  std::memcpy(a.mutable_data(), t.data().data(), t.size() * sizeof(float));
  return a;
}

py::dict hyper_dict(const Hyper& h) {
  py::dict d;
  d["scale"] = h.scale;
  d["channels"] = h.channels;
  d["pairs"] = h.pairs;
  d["variant"] = std::string(variant_name(h.variant));
  return d;
}

}  // namespace
}  // namespace abpn

PYBIND11_MODULE(_abpn, m) {
  using namespace abpn;
  m.doc() = "ABPN super-resolution engine";

  static py::exception<Error> error(m, "AbpnError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const std::string msg = std::string(error_kind_name(e.kind())) + ": " + e.what();
      PyErr_SetString(error.ptr(), msg.c_str());
    }
  });

  py::class_<ModelGraph>(m, "FloatModel")
      .def_property_readonly("hyper", [](const ModelGraph& g) { return hyper_dict(g.hyper); })
      .def_property_readonly("param_count", [](const ModelGraph& g) { return param_count(g); })
      .def("forward", [](const ModelGraph& g, const FloatArray& x) {
        return from_tensor(forward(g, to_tensor(x)));
      }, py::arg("x"), "NHWC float32 in [0, 255] to the upscaled tensor.")
      .def("upscale", [](const ModelGraph& g, const ImageArray& img) {
        return from_image(image_from_tensor(forward(g, tensor_from_image(to_image(img)))));
      }, py::arg("image"))
      .def("save", [](const ModelGraph& g, const std::filesystem::path& p) { save(p, g); })
      .def("to_bytes", [](const ModelGraph& g) {
        const auto b = encode(g);
        return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
      });

  py::class_<QuantizedModel>(m, "QuantizedModel")
      .def_property_readonly("hyper",
                             [](const QuantizedModel& q) { return hyper_dict(q.hyper); })
      .def_property_readonly("activation_scales", [](const QuantizedModel& q) {
        py::dict d;
        for (const auto& [name, qp] : q.activations)
          d[py::str(name)] = py::make_tuple(qp.scale, qp.zero_point);
        return d;
      })
      .def("upscale", [](const QuantizedModel& q, const ImageArray& img) {
        return from_image(infer_int8(q, to_image(img)));
      }, py::arg("image"))
      .def("save", [](const QuantizedModel& q, const std::filesystem::path& p) { save(p, q); })
      .def("to_bytes", [](const QuantizedModel& q) {
        const auto b = encode(q);
        return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
      });

  m.def("build", [](int scale, int channels, int pairs, const std::string& variant,
                    std::uint64_t seed) {
    return build(Hyper{scale, channels, pairs, parse_variant(variant)}, seed);
  }, py::arg("scale") = 3, py::arg("channels") = 28, py::arg("pairs") = 5,
     py::arg("variant") = "abrl", py::arg("seed") = 0);

  m.def("param_count", [](int scale, int channels, int pairs) {
    return param_count(Hyper{scale, channels, pairs, Variant::kAbrl});
  }, py::arg("scale") = 3, py::arg("channels") = 28, py::arg("pairs") = 5);

  m.def("variants", [] {
    std::vector<std::string> v;
    for (Variant x : kAllVariants) v.emplace_back(variant_name(x));
    return v;
  });

  m.def("load", [](const std::filesystem::path& p) -> py::object {
    AnyModel any = load(p);
    if (auto* g = std::get_if<ModelGraph>(&any)) return py::cast(std::move(*g));
    return py::cast(std::get<QuantizedModel>(std::move(any)));
  }, py::arg("path"));

  m.def("quantize", [](const ModelGraph& g, const std::vector<ImageArray>& calib) {
    std::vector<Tensor> samples;
    for (const auto& a : calib) samples.push_back(tensor_from_image(to_image(a)));
    return ptq(g, calibrate(g, samples));
  }, py::arg("model"), py::arg("calibration_images"),
     "Post-training quantization from min/max ranges over the images.");

  m.def("psnr", [](const ImageArray& a, const ImageArray& b) {
    return psnr_rgb(to_image(a), to_image(b));
  });
  m.def("nearest_upsample", [](const ImageArray& img, int s) {
    return from_image(nearest_upsample(to_image(img), s));
  }, py::arg("image"), py::arg("scale"));
  m.def("read_png", [](const std::filesystem::path& p) { return from_image(read_png(p)); });
  m.def("write_png", [](const std::filesystem::path& p, const ImageArray& img) {
    write_png(p, to_image(img));
  });
}
