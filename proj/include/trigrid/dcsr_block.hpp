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

#include <algorithm>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "trigrid/bytes.hpp"
#include "trigrid/graph.hpp"

namespace trigrid {

/// Position on the grid_side x grid_side processor grid. For a block, the
/// coordinate is its (row class, column class) in the cyclic decomposition.
struct GridCoord {
  std::uint32_t x = 0;
  std::uint32_t y = 0;

  auto operator<=>(const GridCoord&) const = default;
};

inline GridCoord coord_of_rank(int rank, std::uint32_t grid_side) {
  return {static_cast<std::uint32_t>(rank) / grid_side, static_cast<std::uint32_t>(rank) % grid_side};
}

inline int rank_of_coord(GridCoord c, std::uint32_t grid_side) {
  return static_cast<int>(c.x * grid_side + c.y);
}

enum class Orientation : std::uint8_t { row_major = 0, column_major = 1 };

/// Which side of the diagonal the stored entries live on, in (major, minor)
/// terms. U row-major and L column-major blocks both store minor > major.
enum class Triangle : std::uint8_t { minor_above_major, minor_below_major };

/// Number of local majors for global ids g < n with g % grid_side == residue.
inline VertexId local_major_count(VertexId n, std::uint32_t grid_side, std::uint32_t residue) {
  return n > residue ? (n - residue + grid_side - 1) / grid_side : 0;
}

/// Doubly compressed sparse block of one cyclic class of U or L.
///
/// Only non-empty majors are listed. A major is addressed by its local index
/// (global id / grid_side); minors are global ids, sorted within each major.
/// `offsets` always has present_majors.size() + 1 entries.
struct DcsrBlock {
  std::uint32_t grid_side = 1;
  GridCoord coord;
  Orientation orientation = Orientation::row_major;
  VertexId n = 0;
  std::vector<VertexId> present_majors;
  std::vector<EdgeCount> offsets{0};
  std::vector<VertexId> minors;

  EdgeCount nnz() const { return minors.size(); }
  bool empty() const { return minors.empty(); }

  std::uint32_t major_residue() const {
    return orientation == Orientation::row_major ? coord.x : coord.y;
  }
  std::uint32_t minor_residue() const {
    return orientation == Orientation::row_major ? coord.y : coord.x;
  }
  VertexId global_major(VertexId local) const { return local * grid_side + major_residue(); }
  VertexId major_capacity() const { return local_major_count(n, grid_side, major_residue()); }

  /// Minors of the slot-th present major.
  std::span<const VertexId> entries(std::size_t slot) const {
    return {minors.data() + offsets[slot], static_cast<std::size_t>(offsets[slot + 1] - offsets[slot])};
  }

  bool operator==(const DcsrBlock&) const = default;
};

/// Builds a block from (major, minor) pairs of global ids. Pairs are sorted;
/// duplicates are rejected.
inline DcsrBlock make_block(std::uint32_t grid_side, GridCoord coord, Orientation orientation, VertexId n,
                            std::vector<std::pair<VertexId, VertexId>> entries) {
  DcsrBlock b;
  b.grid_side = grid_side;
  b.coord = coord;
  b.orientation = orientation;
  b.n = n;
  std::sort(entries.begin(), entries.end());
  b.minors.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto [major, minor] = entries[i];
    if (i > 0 && entries[i - 1] == entries[i]) {
      fail(ErrorKind::invariant, "duplicate block entry (" + std::to_string(major) + ", " +
                                     std::to_string(minor) + ")");
    }
    const VertexId local = major / grid_side;
    if (b.present_majors.empty() || b.present_majors.back() != local) {
      if (!b.present_majors.empty()) b.offsets.push_back(b.minors.size());
      b.present_majors.push_back(local);
    }
    b.minors.push_back(minor);
  }
  if (!b.present_majors.empty()) b.offsets.push_back(b.minors.size());
  return b;
}

/// Expands a block back into (major, minor) global pairs.
inline std::vector<std::pair<VertexId, VertexId>> block_entries(const DcsrBlock& b) {
  std::vector<std::pair<VertexId, VertexId>> out;
  out.reserve(b.nnz());
  for (std::size_t s = 0; s < b.present_majors.size(); ++s) {
    const VertexId major = b.global_major(b.present_majors[s]);
    for (VertexId minor : b.entries(s)) out.emplace_back(major, minor);
  }
  return out;
}

/// Structural checks only: sorted majors, non-empty extents, sorted minors.
inline void check_structure(const DcsrBlock& b) {
  auto bad = [](const std::string& what) { fail(ErrorKind::invariant, "malformed block: " + what); };
  if (b.grid_side == 0) bad("grid side 0");
  if (b.coord.x >= b.grid_side || b.coord.y >= b.grid_side) bad("coordinate outside grid");
  if (b.offsets.size() != b.present_majors.size() + 1) bad("offset count");
  if (b.offsets.front() != 0 || b.offsets.back() != b.minors.size()) bad("offset bounds");
  for (std::size_t s = 0; s < b.present_majors.size(); ++s) {
    if (s > 0 && b.present_majors[s - 1] >= b.present_majors[s]) bad("majors not strictly increasing");
    if (b.offsets[s] >= b.offsets[s + 1]) bad("empty or inverted major extent");
    if (b.global_major(b.present_majors[s]) >= b.n) bad("major beyond n");
    auto list = b.entries(s);
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (list[i] >= b.n) bad("minor beyond n");
      if (i > 0 && list[i - 1] >= list[i]) bad("minors not strictly increasing");
    }
  }
}

/// Full invariant check: structure, residue classes, and triangle side.
inline void check_block(const DcsrBlock& b, Triangle side) {
  check_structure(b);
  const std::uint32_t s = b.grid_side;
  for (std::size_t slot = 0; slot < b.present_majors.size(); ++slot) {
    const VertexId major = b.global_major(b.present_majors[slot]);
    for (VertexId minor : b.entries(slot)) {
      if (minor % s != b.minor_residue()) {
        fail(ErrorKind::invariant, "minor " + std::to_string(minor) + " outside residue class");
      }
      const bool above = minor > major;
      if (above != (side == Triangle::minor_above_major) || minor == major) {
        fail(ErrorKind::invariant, "entry (" + std::to_string(major) + ", " + std::to_string(minor) +
                                       ") on the wrong side of the diagonal");
      }
    }
  }
}

// Blob layout, all 64-bit little-endian words:
//   [0] magic "TGBK" | version << 32
//   [1] grid_side  [2] coord.x  [3] coord.y  [4] orientation
//   [5] n          [6] present major count P  [7] nnz
//   then P present majors, P + 1 offsets (omitted when P == 0), nnz minors.

inline constexpr std::uint64_t kBlobMagic = 0x4B424754;  // "TGBK"
inline constexpr std::uint64_t kBlobVersion = 1;
inline constexpr std::size_t kBlobHeaderWords = 8;
inline constexpr std::size_t kBlobWordSize = 8;
inline constexpr std::size_t kBlobHeaderBytes = kBlobHeaderWords * kBlobWordSize;

inline std::size_t blob_size(const DcsrBlock& b) {
  const std::size_t p = b.present_majors.size();
  return kBlobHeaderBytes + (p + (p == 0 ? 0 : p + 1) + b.minors.size()) * kBlobWordSize;
}

inline void blob_append(Bytes& out, const DcsrBlock& b) {
  const std::size_t start = out.size();
  out.resize(start + blob_size(b));
  std::uint8_t* w = out.data() + start;
  auto put = [&w](std::uint64_t v) {
    put_u64_at(w, v);
    w += 8;
  };
  put(kBlobMagic | (kBlobVersion << 32));
  put(b.grid_side);
  put(b.coord.x);
  put(b.coord.y);
  put(static_cast<std::uint64_t>(b.orientation));
  put(b.n);
  put(b.present_majors.size());
  put(b.minors.size());
  for (VertexId v : b.present_majors) put(v);
  if (!b.present_majors.empty()) {
    for (EdgeCount o : b.offsets) put(o);
  }
  for (VertexId v : b.minors) put(v);
}

inline Bytes blob_encode(const DcsrBlock& b) {
  Bytes out;
  blob_append(out, b);
  return out;
}

/// Decodes one blob from the front of `data`; returns the block and the
/// number of bytes consumed.
inline std::pair<DcsrBlock, std::size_t> blob_decode_prefix(std::span<const std::uint8_t> data) {
  ByteReader r(data);
  const std::uint64_t tag = r.u64();
  if ((tag & 0xFFFFFFFFu) != kBlobMagic) fail(ErrorKind::decode, "bad block magic");
  if ((tag >> 32) != kBlobVersion) {
    fail(ErrorKind::decode, "unsupported block version " + std::to_string(tag >> 32));
  }
  DcsrBlock b;
  const std::uint64_t side = r.u64();
  const std::uint64_t x = r.u64();
  const std::uint64_t y = r.u64();
  const std::uint64_t orientation = r.u64();
  if (side == 0 || side > 0xFFFFFFFFu || x >= side || y >= side || orientation > 1) {
    fail(ErrorKind::decode, "bad block header");
  }
  b.grid_side = static_cast<std::uint32_t>(side);
  b.coord = {static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y)};
  b.orientation = static_cast<Orientation>(orientation);
  b.n = r.u64();
  const std::uint64_t present = r.u64();
  const std::uint64_t nnz = r.u64();
  if ((present == 0) != (nnz == 0)) fail(ErrorKind::decode, "inconsistent block counts");
  r.u64s(b.present_majors, present);
  if (present > 0) {
    r.u64s(b.offsets, present + 1);
  } else {
    b.offsets.assign(1, 0);
  }
  r.u64s(b.minors, nnz);
  try {
    check_structure(b);
  } catch (const Error& e) {
    fail(ErrorKind::decode, e.what());
  }
  return {std::move(b), r.position()};
}

inline DcsrBlock blob_decode(std::span<const std::uint8_t> data) {
  auto [block, used] = blob_decode_prefix(data);
  if (used != data.size()) fail(ErrorKind::decode, "trailing bytes after block");
  return std::move(block);
}

}  // namespace trigrid
