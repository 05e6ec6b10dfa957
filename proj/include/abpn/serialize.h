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

// The .abpn container. Byte layout is documented in docs/abpn_format.md.

#ifndef ABPN_SERIALIZE_H_
#define ABPN_SERIALIZE_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <variant>
#include <vector>

#include "abpn/model.h"
#include "abpn/quant.h"

namespace abpn {

inline constexpr std::uint32_t kFormatVersion = 1;

enum class ModelKind : std::uint8_t { kFloat = 0, kInt8 = 1 };

using AnyModel = std::variant<ModelGraph, QuantizedModel>;

std::vector<std::uint8_t> encode(const ModelGraph& model);
std::vector<std::uint8_t> encode(const QuantizedModel& model);

// Parses and validates a whole container. Truncation, bad magic/version and
// checksum failures raise ErrorKind::kFormat; nothing partial is returned.
AnyModel decode(std::span<const std::uint8_t> bytes);

// Writes to a sibling temporary file and renames it over `path`.
void save(const std::filesystem::path& path, const ModelGraph& model);
void save(const std::filesystem::path& path, const QuantizedModel& model);

AnyModel load(const std::filesystem::path& path);
ModelGraph load_float(const std::filesystem::path& path);
QuantizedModel load_quantized(const std::filesystem::path& path);

// Number of scalar payload elements in the weight records of a float model.
std::int64_t serialized_param_count(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
// Atomic replace via temporary file + rename.
void write_file_atomic(const std::filesystem::path& path,
                       std::span<const std::uint8_t> bytes);

}  // namespace abpn

#endif  // ABPN_SERIALIZE_H_
