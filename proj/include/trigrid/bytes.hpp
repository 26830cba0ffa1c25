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

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "trigrid/error.hpp"

namespace trigrid {

using Bytes = std::vector<std::uint8_t>;

// Little-endian fixed-width word helpers. All wire formats in this library
// are sequences of 64-bit LE words (plus the 4-byte magic of graph files).

inline void put_u64(Bytes& out, std::uint64_t value) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
}

inline void put_u64_at(std::uint8_t* dst, std::uint64_t value) {
  for (int i = 0; i < 8; ++i) dst[i] = static_cast<std::uint8_t>(value >> (8 * i));
}

inline std::uint64_t get_u64_at(const std::uint8_t* src) {
  std::uint64_t value = 0;
  for (int i = 0; i < 8; ++i) value |= static_cast<std::uint64_t>(src[i]) << (8 * i);
  return value;
}

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint64_t u64() {
    require(8);
    std::uint64_t v = get_u64_at(data_.data() + pos_);
    pos_ += 8;
    return v;
  }

  void u64s(std::vector<std::uint64_t>& out, std::size_t count) {
    if (count > remaining() / 8) fail(ErrorKind::decode, "truncated buffer");
    out.resize(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = get_u64_at(data_.data() + pos_ + 8 * i);
    pos_ += 8 * count;
  }

  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }
  bool done() const { return pos_ == data_.size(); }

 private:
  void require(std::size_t n) const {
    if (remaining() < n) fail(ErrorKind::decode, "truncated buffer");
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

inline Bytes encode_u64s(std::span<const std::uint64_t> words) {
  Bytes out(words.size() * 8);
  for (std::size_t i = 0; i < words.size(); ++i) put_u64_at(out.data() + 8 * i, words[i]);
  return out;
}

inline std::vector<std::uint64_t> decode_u64s(std::span<const std::uint8_t> bytes) {
  if (bytes.size() % 8 != 0) fail(ErrorKind::decode, "buffer length is not a multiple of 8");
  std::vector<std::uint64_t> words(bytes.size() / 8);
  for (std::size_t i = 0; i < words.size(); ++i) words[i] = get_u64_at(bytes.data() + 8 * i);
  return words;
}

}  // namespace trigrid
