/*
Copyright 2026 The trigrid Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>

namespace trigrid {

/// Failure categories. The CLI maps these onto process exit codes.
enum class ErrorKind {
  usage,
  io,
  malformed_input,
  invalid_permutation,
  decode,
  protocol,
  configuration,
  overflow,
  undefined_metric,
  invariant,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::usage: return "usage";
    case ErrorKind::io: return "io";
    case ErrorKind::malformed_input: return "malformed-input";
    case ErrorKind::invalid_permutation: return "invalid-permutation";
    case ErrorKind::decode: return "decode";
    case ErrorKind::protocol: return "protocol";
    case ErrorKind::configuration: return "configuration";
    case ErrorKind::overflow: return "overflow";
    case ErrorKind::undefined_metric: return "undefined-metric";
    case ErrorKind::invariant: return "invariant";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + " error: " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace trigrid
