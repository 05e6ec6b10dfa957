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

#ifndef ABPN_ERROR_H_
#define ABPN_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace abpn {

enum class ErrorKind {
  kShape,
  kInvalidArgument,
  kConfig,
  kUsage,
  kIo,
  kFormat,
};

constexpr std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kShape:
      return "shape";
    case ErrorKind::kInvalidArgument:
      return "invalid_argument";
    case ErrorKind::kConfig:
      return "config";
    case ErrorKind::kUsage:
      return "usage";
    case ErrorKind::kIo:
      return "io";
    case ErrorKind::kFormat:
      return "format";
  }
  return "unknown";
}

// Every failure raised by the library carries a kind so the CLI can emit a
// single machine-parsable line ("error: <kind>: <message>").
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void check(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

}  // namespace abpn

#endif  // ABPN_ERROR_H_
