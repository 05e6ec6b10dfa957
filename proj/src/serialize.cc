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

#include "abpn/serialize.h"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <optional>
#include <string>

namespace abpn {
namespace {

constexpr char kMagic[4] = {'A', 'B', 'P', 'N'};
constexpr std::uint8_t kFlagHasQp = 1;

enum class DType : std::uint8_t { kF32 = 0, kI8 = 1, kI32 = 2, kU8 = 3 };

std::size_t dtype_size(DType t) {
  switch (t) {
    case DType::kF32:
    case DType::kI32:
      return 4;
    case DType::kI8:
    case DType::kU8:
      return 1;
  }
  fail(ErrorKind::kFormat, "unknown dtype tag");
}

QuantParams range_for(DType t, double scale, std::int32_t zp) {
  switch (t) {
    case DType::kI8:
      return QuantParams{scale, zp, -127, 127};
    case DType::kI32:
      return QuantParams{scale, zp, std::numeric_limits<std::int32_t>::min(),
                         std::numeric_limits<std::int32_t>::max()};
    default:
      return QuantParams{scale, zp, 0, 255};
  }
}

class Writer {
 public:
  template <typename T>
  void put(T v) {
    using U = std::make_unsigned_t<
        std::conditional_t<std::is_floating_point_v<T>,
                           std::conditional_t<sizeof(T) == 8, std::uint64_t,
                                              std::uint32_t>,
                           T>>;
    const U u = std::bit_cast<U>(v);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      bytes_.push_back(static_cast<std::uint8_t>(u >> (8 * i)));
    }
  }
  void put_bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    bytes_.insert(bytes_.end(), b, b + n);
  }

  template <typename T>
  void record(std::string_view name, DType dtype, std::span<const std::uint32_t> dims,
              const QuantParams* qp, std::span<const T> payload) {
    check(name.size() <= 0xFFFF, ErrorKind::kInvalidArgument, "record name too long");
    put<std::uint16_t>(static_cast<std::uint16_t>(name.size()));
    put_bytes(name.data(), name.size());
    put<std::uint8_t>(static_cast<std::uint8_t>(dtype));
    put<std::uint8_t>(qp ? kFlagHasQp : 0);
    put<std::uint8_t>(static_cast<std::uint8_t>(dims.size()));
    put<std::uint8_t>(0);
    for (std::uint32_t d : dims) put<std::uint32_t>(d);
    if (qp) {
      put<double>(qp->scale);
      put<std::int32_t>(qp->zero_point);
    }
    for (T v : payload) put<T>(v);
    ++records_;
  }

  std::vector<std::uint8_t> finish(ModelKind kind, const Hyper& h) {
    Writer head;
    head.put_bytes(kMagic, 4);
    head.put<std::uint32_t>(kFormatVersion);
    head.put<std::uint8_t>(static_cast<std::uint8_t>(kind));
    head.put<std::uint8_t>(static_cast<std::uint8_t>(h.variant));
    head.put<std::uint16_t>(0);
    head.put<std::uint32_t>(static_cast<std::uint32_t>(h.scale));
    head.put<std::uint32_t>(static_cast<std::uint32_t>(h.channels));
    head.put<std::uint32_t>(static_cast<std::uint32_t>(h.pairs));
    head.put<std::uint32_t>(records_);
    std::vector<std::uint8_t> out = std::move(head.bytes_);
    out.insert(out.end(), bytes_.begin(), bytes_.end());
    const uLong crc = crc32(crc32(0L, Z_NULL, 0), out.data(),
                            static_cast<uInt>(out.size()));
    Writer tail;
    tail.put<std::uint32_t>(static_cast<std::uint32_t>(crc));
    out.insert(out.end(), tail.bytes_.begin(), tail.bytes_.end());
    return out;
  }

 private:
  std::vector<std::uint8_t> bytes_;
  std::uint32_t records_ = 0;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : b_(b) {}

  template <typename T>
  T get() {
    using U = std::make_unsigned_t<
        std::conditional_t<std::is_floating_point_v<T>,
                           std::conditional_t<sizeof(T) == 8, std::uint64_t,
                                              std::uint32_t>,
                           T>>;
    need(sizeof(T));
    U u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) u |= U(b_[pos_ + i]) << (8 * i);
    pos_ += sizeof(T);
    return std::bit_cast<T>(u);
  }
  std::span<const std::uint8_t> take(std::size_t n) {
    need(n);
    auto s = b_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return b_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    check(n <= b_.size() - pos_, ErrorKind::kFormat, "truncated model file");
  }
  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
};

struct Record {
  std::string name;
  DType dtype = DType::kF32;
  std::vector<std::uint32_t> dims;
  std::optional<QuantParams> qp;
  std::span<const std::uint8_t> payload;

  std::size_t count() const {
    std::size_t n = 1;
    for (auto d : dims) n *= d;
    return n;
  }

  template <typename T>
  std::vector<T> values() const {
    Reader r(payload);
    std::vector<T> out(count());
    for (auto& v : out) v = r.get<T>();
    return out;
  }
};

struct Parsed {
  ModelKind kind = ModelKind::kFloat;
  Hyper hyper;
  std::vector<Record> records;
};

Parsed parse(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  auto magic = r.take(4);
  check(std::memcmp(magic.data(), kMagic, 4) == 0, ErrorKind::kFormat,
        "not an .abpn file (bad magic)");
  const auto version = r.get<std::uint32_t>();
  check(version == kFormatVersion, ErrorKind::kFormat,
        "unsupported .abpn version " + std::to_string(version));
  Parsed p;
  const auto kind = r.get<std::uint8_t>();
  check(kind <= 1, ErrorKind::kFormat, "unknown model kind");
  p.kind = static_cast<ModelKind>(kind);
  const auto variant = r.get<std::uint8_t>();
  check(variant <= 4, ErrorKind::kFormat, "unknown variant tag");
  p.hyper.variant = static_cast<Variant>(variant);
  r.get<std::uint16_t>();
  const auto scale = r.get<std::uint32_t>();
  const auto channels = r.get<std::uint32_t>();
  const auto pairs = r.get<std::uint32_t>();
  check(scale <= 64 && channels <= 1u << 16 && pairs <= 1u << 16,
        ErrorKind::kFormat, "implausible hyperparameters");
  p.hyper.scale = int(scale);
  p.hyper.channels = int(channels);
  p.hyper.pairs = int(pairs);
  const auto n_records = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < n_records; ++i) {
    Record rec;
    const auto name_len = r.get<std::uint16_t>();
    auto name = r.take(name_len);
    rec.name.assign(name.begin(), name.end());
    const auto dtype = r.get<std::uint8_t>();
    check(dtype <= 3, ErrorKind::kFormat, "unknown dtype tag in " + rec.name);
    rec.dtype = static_cast<DType>(dtype);
    const auto flags = r.get<std::uint8_t>();
    const auto rank = r.get<std::uint8_t>();
    r.get<std::uint8_t>();
    check(rank <= 4, ErrorKind::kFormat, "rank > 4 in " + rec.name);
    std::uint64_t count = 1;
    for (int d = 0; d < rank; ++d) {
      rec.dims.push_back(r.get<std::uint32_t>());
      count *= rec.dims.back();
      check(count <= bytes.size(), ErrorKind::kFormat, "truncated model file");
    }
    if (flags & kFlagHasQp) {
      const double s = r.get<double>();
      const auto zp = r.get<std::int32_t>();
      rec.qp = range_for(rec.dtype, s, zp);
    }
    rec.payload = r.take(count * dtype_size(rec.dtype));
    p.records.push_back(std::move(rec));
  }
  const std::size_t body = bytes.size() - r.remaining();
  const auto stored = r.get<std::uint32_t>();
  check(r.remaining() == 0, ErrorKind::kFormat, "trailing bytes after checksum");
  const uLong crc =
      crc32(crc32(0L, Z_NULL, 0), bytes.data(), static_cast<uInt>(body));
  check(stored == static_cast<std::uint32_t>(crc), ErrorKind::kFormat,
        "checksum mismatch");
  return p;
}

const Record& expect(const Parsed& p, std::size_t i, const std::string& name,
                     DType dtype, std::size_t rank) {
  check(i < p.records.size(), ErrorKind::kFormat, "missing record " + name);
  const Record& r = p.records[i];
  check(r.name == name, ErrorKind::kFormat,
        "expected record " + name + ", found " + r.name);
  check(r.dtype == dtype && r.dims.size() == rank, ErrorKind::kFormat,
        "record " + name + " has the wrong dtype or rank");
  return r;
}

ModelGraph build_float(const Parsed& p) {
  ModelGraph m;
  m.hyper = p.hyper;
  const int n_layers = p.hyper.pairs + 2;
  check(p.records.size() == std::size_t(2 * n_layers), ErrorKind::kFormat,
        "float model has the wrong number of records");
  for (int i = 0; i < n_layers; ++i) {
    const std::string name = layer_name(p.hyper, i);
    const Record& k = expect(p, 2 * i, name + ".kernel", DType::kF32, 4);
    const Record& b = expect(p, 2 * i + 1, name + ".bias", DType::kF32, 1);
    check(k.dims[0] == k.dims[1] && b.dims[0] == k.dims[3], ErrorKind::kFormat,
          "inconsistent dims for layer " + name);
    ConvWeights<float> w(int(k.dims[0]), int(k.dims[2]), int(k.dims[3]));
    w.kernel = k.values<float>();
    w.bias = b.values<float>();
    m.layers.push_back(std::move(w));
  }
  m.validate();
  return m;
}

QuantizedModel build_quantized(const Parsed& p) {
  QuantizedModel qm;
  qm.hyper = p.hyper;
  const Hyper& h = p.hyper;
  const auto nodes = activation_nodes(h);
  const int n_layers = h.pairs + 2;
  check(p.records.size() == nodes.size() + 2 * std::size_t(n_layers),
        ErrorKind::kFormat, "quantized model has the wrong number of records");
  std::size_t i = 0;
  for (const std::string& node : nodes) {
    const Record& r = expect(p, i++, "act." + node, DType::kU8, 1);
    check(r.dims[0] == 0, ErrorKind::kFormat, "act." + node + " must be empty");
    check(r.qp.has_value(), ErrorKind::kFormat, "act." + node + " lacks params");
    check(r.qp->valid(), ErrorKind::kFormat, "act." + node + " has invalid params");
    qm.activations.emplace(node, *r.qp);
  }
  for (int l = 0; l < n_layers; ++l) {
    const std::string name = layer_name(h, l);
    const Record& k = expect(p, i++, name + ".kernel", DType::kI8, 4);
    const Record& b = expect(p, i++, name + ".bias", DType::kI32, 1);
    check(k.qp && b.qp && k.qp->valid(), ErrorKind::kFormat,
          "layer " + name + " lacks params");
    check(k.dims[0] == k.dims[1] && b.dims[0] == k.dims[3], ErrorKind::kFormat,
          "inconsistent dims for layer " + name);
    QuantizedConv c;
    c.weights = QWeights(Shape(k.dims[0], k.dims[1], k.dims[2], k.dims[3]),
                         k.values<std::int8_t>(), *k.qp);
    c.bias = b.values<std::int32_t>();
    c.input = qm.activations.at(layer_input_node(h, l));
    c.output = qm.activations.at(layer_output_node(h, l));
    c.relu = l <= h.pairs;
    c.multiplier =
        decompose_multiplier(c.input.scale * c.weights.qp().scale / c.output.scale);
    check(*b.qp == c.bias_params(), ErrorKind::kFormat,
          "bias params of layer " + name + " disagree with input/weight scales");
    qm.layers.push_back(std::move(c));
  }
  qm.validate();
  return qm;
}

}  // namespace

std::vector<std::uint8_t> encode(const ModelGraph& model) {
  model.validate();
  Writer w;
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    const auto& l = model.layers[i];
    const std::string name = layer_name(model.hyper, int(i));
    const std::uint32_t kd[] = {std::uint32_t(l.k), std::uint32_t(l.k),
                                std::uint32_t(l.cin), std::uint32_t(l.cout)};
    const std::uint32_t bd[] = {std::uint32_t(l.cout)};
    w.record<float>(name + ".kernel", DType::kF32, kd, nullptr, l.kernel);
    w.record<float>(name + ".bias", DType::kF32, bd, nullptr, l.bias);
  }
  return w.finish(ModelKind::kFloat, model.hyper);
}

std::vector<std::uint8_t> encode(const QuantizedModel& model) {
  model.validate();
  Writer w;
  for (const std::string& node : activation_nodes(model.hyper)) {
    const QuantParams& qp = model.activations.at(node);
    // Params-only record: an empty u8 vector.
    const std::uint32_t dims[] = {0};
    w.record<std::uint8_t>("act." + node, DType::kU8, dims, &qp, {});
  }
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    const auto& l = model.layers[i];
    const std::string name = layer_name(model.hyper, int(i));
    const Shape& s = l.weights.shape();
    const std::uint32_t kd[] = {std::uint32_t(s.n), std::uint32_t(s.h),
                                std::uint32_t(s.w), std::uint32_t(s.c)};
    const std::uint32_t bd[] = {std::uint32_t(l.bias.size())};
    const QuantParams bqp = l.bias_params();
    w.record<std::int8_t>(name + ".kernel", DType::kI8, kd, &l.weights.qp(),
                          l.weights.data());
    w.record<std::int32_t>(name + ".bias", DType::kI32, bd, &bqp, l.bias);
  }
  return w.finish(ModelKind::kInt8, model.hyper);
}

AnyModel decode(std::span<const std::uint8_t> bytes) {
  const Parsed p = parse(bytes);
  try {
    p.hyper.validate();
    if (p.kind == ModelKind::kFloat) return build_float(p);
    return build_quantized(p);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kFormat) throw;
    fail(ErrorKind::kFormat, std::string("invalid model contents: ") + e.what());
  }
}

std::int64_t serialized_param_count(std::span<const std::uint8_t> bytes) {
  const Parsed p = parse(bytes);
  std::int64_t n = 0;
  for (const Record& r : p.records) {
    if (r.name.ends_with(".kernel") || r.name.ends_with(".bias")) {
      n += static_cast<std::int64_t>(r.count());
    }
  }
  return n;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  check(bool(in), ErrorKind::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  check(!in.bad(), ErrorKind::kIo, "read failed: " + path.string());
  return bytes;
}

void write_file_atomic(const std::filesystem::path& path,
                       std::span<const std::uint8_t> bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    check(bool(out), ErrorKind::kIo, "cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    out.flush();
    check(bool(out), ErrorKind::kIo, "write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    fail(ErrorKind::kIo, "cannot rename onto " + path.string() + ": " + ec.message());
  }
}

void save(const std::filesystem::path& path, const ModelGraph& model) {
  write_file_atomic(path, encode(model));
}

void save(const std::filesystem::path& path, const QuantizedModel& model) {
  write_file_atomic(path, encode(model));
}

AnyModel load(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  try {
    return decode(bytes);
  } catch (const Error& e) {
    fail(e.kind(), path.string() + ": " + e.what());
  }
}

ModelGraph load_float(const std::filesystem::path& path) {
  AnyModel m = load(path);
  check(std::holds_alternative<ModelGraph>(m), ErrorKind::kUsage,
        path.string() + " holds a quantized model, expected a float model");
  return std::get<ModelGraph>(std::move(m));
}

QuantizedModel load_quantized(const std::filesystem::path& path) {
  AnyModel m = load(path);
  check(std::holds_alternative<QuantizedModel>(m), ErrorKind::kUsage,
        path.string() + " holds a float model, expected a quantized model");
  return std::get<QuantizedModel>(std::move(m));
}

}  // namespace abpn
