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
#include <bit>
#include <chrono>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "trigrid/dcsr_block.hpp"
#include "trigrid/preprocess.hpp"
#include "trigrid/transport.hpp"

namespace trigrid {

/// Triangle enumeration order. jik takes tasks from L (hashing the higher
/// endpoint's U row), ijk takes tasks from U.
enum class Enumeration : std::uint8_t { jik, ijk };

inline const char* to_string(Enumeration e) { return e == Enumeration::jik ? "jik" : "ijk"; }

struct EngineOptions {
  bool direct_hash = true;
  bool doubly_sparse = true;
  bool prune = true;
  Enumeration enumeration = Enumeration::jik;
  /// Scratch capacity is the next power of two >= factor * longest hashed row.
  unsigned scratch_factor = 2;

  bool operator==(const EngineOptions&) const = default;
};

/// U column class (and L row class) that rank (x, y) works on at shift z.
inline std::uint32_t cannon_operand_class(std::uint32_t x, std::uint32_t y, std::uint32_t z,
                                          std::uint32_t grid_side) {
  return static_cast<std::uint32_t>((static_cast<std::uint64_t>(x) + y + z) % grid_side);
}

/// Lookup table for one hashed adjacency row, reset in O(1) by bumping a
/// generation stamp.
///
/// Direct mode applies when the row's local indices (id / grid_side) span no
/// more than the capacity: slot = local & mask, so distinct keys never
/// collide and lookups never probe. Otherwise the row goes into an
/// open-addressing table with multiplicative hashing and linear probing; the
/// capacity keeps its load factor at or below 0.5.
class HashScratch {
 public:
  enum class Mode : std::uint8_t { direct, open_addressing };

  void reserve(std::size_t longest_row, unsigned factor = 2) {
    if (factor < 2) fail(ErrorKind::configuration, "scratch factor must be >= 2");
    const std::size_t want = std::max<std::size_t>(2, std::bit_ceil(std::max<std::size_t>(1, longest_row * factor)));
    if (want > keys_.size()) {
      keys_.assign(want, 0);
      stamps_.assign(want, 0);
      generation_ = 0;
      mask_ = want - 1;
      shift_ = 64 - std::countr_zero(want);
    }
  }

  void build(std::span<const VertexId> sorted_keys, bool allow_direct, std::uint32_t grid_side) {
    if (sorted_keys.empty()) fail(ErrorKind::invariant, "hashing an empty row");
    if (sorted_keys.size() * 2 > keys_.size()) fail(ErrorKind::invariant, "scratch too small for row");
    next_generation();
    grid_side_ = grid_side;
    min_key_ = sorted_keys.front();
    const VertexId lo = sorted_keys.front() / grid_side;
    const VertexId hi = sorted_keys.back() / grid_side;
    mode_ = allow_direct && hi - lo < keys_.size() ? Mode::direct : Mode::open_addressing;
    for (VertexId k : sorted_keys) {
      std::size_t slot = home_slot(k);
      if (mode_ == Mode::open_addressing) {
        while (stamps_[slot] == generation_) slot = (slot + 1) & mask_;
      }
      keys_[slot] = k;
      stamps_[slot] = generation_;
    }
  }

  bool contains(VertexId k) {
    std::size_t slot = home_slot(k);
    if (mode_ == Mode::direct) return stamps_[slot] == generation_ && keys_[slot] == k;
    while (stamps_[slot] == generation_) {
      if (keys_[slot] == k) return true;
      ++collisions_;
      slot = (slot + 1) & mask_;
    }
    return false;
  }

  Mode mode() const { return mode_; }
  std::size_t capacity() const { return keys_.size(); }
  VertexId min_key() const { return min_key_; }
  /// Extra slots inspected by open-addressing lookups since construction.
  std::uint64_t collisions() const { return collisions_; }

 private:
  std::size_t home_slot(VertexId k) const {
    const VertexId local = k / grid_side_;
    if (mode_ == Mode::direct) return static_cast<std::size_t>(local & mask_);
    return static_cast<std::size_t>((local * 0x9E3779B97F4A7C15ull) >> shift_);
  }

  void next_generation() {
    if (++generation_ == 0) {
      std::fill(stamps_.begin(), stamps_.end(), 0);
      generation_ = 1;
    }
  }

  std::vector<VertexId> keys_;
  std::vector<std::uint32_t> stamps_;
  std::uint32_t generation_ = 0;
  std::size_t mask_ = 0;
  int shift_ = 64;
  std::uint32_t grid_side_ = 1;
  Mode mode_ = Mode::open_addressing;
  VertexId min_key_ = 0;
  std::uint64_t collisions_ = 0;
};

/// Dense major -> extent index over a block, so any row (or column) is
/// reachable by its global id in O(1).
class BlockIndex {
 public:
  explicit BlockIndex(const DcsrBlock& b) : block_(&b), start_(b.major_capacity() + 1, 0) {
    for (std::size_t slot = 0; slot < b.present_majors.size(); ++slot) {
      start_[b.present_majors[slot] + 1] = b.offsets[slot + 1] - b.offsets[slot];
    }
    for (std::size_t a = 1; a < start_.size(); ++a) start_[a] += start_[a - 1];
  }

  std::span<const VertexId> list(VertexId global) const {
    const VertexId local = global / block_->grid_side;
    if (local + 1 >= start_.size()) return {};
    return {block_->minors.data() + start_[local], static_cast<std::size_t>(start_[local + 1] - start_[local])};
  }

  VertexId majors() const { return start_.size() - 1; }

 private:
  const DcsrBlock* block_;
  std::vector<EdgeCount> start_;
};

/// Work counters for one block multiplication. All are deterministic.
struct BlockCount {
  std::uint64_t triangles = 0;
  std::uint64_t probes = 0;         // scratch lookups
  std::uint64_t tasks_touched = 0;  // tasks that ran an intersection
  std::uint64_t rows_visited = 0;   // task rows iterated
  std::uint64_t direct_builds = 0;
  std::uint64_t open_builds = 0;
  std::uint64_t collisions = 0;

  BlockCount& operator+=(const BlockCount& o) {
    triangles += o.triangles;
    probes += o.probes;
    tasks_touched += o.tasks_touched;
    rows_visited += o.rows_visited;
    direct_builds += o.direct_builds;
    open_builds += o.open_builds;
    collisions += o.collisions;
    return *this;
  }
};

inline std::size_t longest_row(const DcsrBlock& b) {
  std::size_t longest = 0;
  for (std::size_t s = 0; s < b.present_majors.size(); ++s) longest = std::max(longest, b.entries(s).size());
  return longest;
}

/// Counts, for every task (a, b) of `task`, the common entries of row a of
/// `upper` and column b of `lower`. The scratch must already be reserved
/// for the longest row of `upper`.
///
/// Each task row's U row is hashed once and reused for all of its tasks.
/// Lookup columns are walked from their largest id down; with pruning the
/// walk stops at the first id below the smallest hashed id.
inline BlockCount count_block(const DcsrBlock& task, const DcsrBlock& upper, const DcsrBlock& lower,
                              HashScratch& scratch, const EngineOptions& opts) {
  if (task.orientation != Orientation::row_major || upper.orientation != Orientation::row_major ||
      lower.orientation != Orientation::column_major) {
    fail(ErrorKind::invariant, "count_block operand orientation");
  }
  if (task.grid_side != upper.grid_side || task.grid_side != lower.grid_side ||
      upper.coord.x != task.coord.x || lower.coord.y != task.coord.y || upper.coord.y != lower.coord.x) {
    fail(ErrorKind::invariant, "count_block operands are not aligned: task (" + std::to_string(task.coord.x) + "," +
                                   std::to_string(task.coord.y) + ") U (" + std::to_string(upper.coord.x) + "," +
                                   std::to_string(upper.coord.y) + ") L (" + std::to_string(lower.coord.x) + "," +
                                   std::to_string(lower.coord.y) + ")");
  }
  BlockCount out;
  if (upper.empty() || lower.empty()) {
    out.rows_visited = opts.doubly_sparse ? task.present_majors.size() : task.major_capacity();
    return out;
  }
  const BlockIndex rows(upper);
  const BlockIndex cols(lower);
  const std::uint64_t collisions_before = scratch.collisions();

  auto process_row = [&](VertexId row, std::span<const VertexId> row_tasks) {
    ++out.rows_visited;
    const auto hashed = rows.list(row);
    if (hashed.empty()) return;
    if (hashed.front() <= row) {
      fail(ErrorKind::invariant, "U row " + std::to_string(row) + " holds id " + std::to_string(hashed.front()));
    }
    bool built = false;
    const VertexId floor = hashed.front();
    for (VertexId col : row_tasks) {
      const auto lookup = cols.list(col);
      if (lookup.empty()) continue;
      if (!built) {
        scratch.build(hashed, opts.direct_hash, upper.grid_side);
        ++(scratch.mode() == HashScratch::Mode::direct ? out.direct_builds : out.open_builds);
        built = true;
      }
      ++out.tasks_touched;
      for (auto it = lookup.rbegin(); it != lookup.rend(); ++it) {
        if (opts.prune && *it < floor) break;
        ++out.probes;
        if (scratch.contains(*it)) ++out.triangles;
      }
    }
  };

  if (opts.doubly_sparse) {
    for (std::size_t slot = 0; slot < task.present_majors.size(); ++slot) {
      process_row(task.global_major(task.present_majors[slot]), task.entries(slot));
    }
  } else {
    const BlockIndex task_rows(task);
    for (VertexId a = 0; a < task_rows.majors(); ++a) {
      const VertexId row = task.global_major(a);
      const auto row_tasks = task_rows.list(row);
      if (row_tasks.empty()) {
        ++out.rows_visited;
        continue;
      }
      process_row(row, row_tasks);
    }
  }
  out.collisions = scratch.collisions() - collisions_before;
  return out;
}

/// Blocks a rank holds during the shift loop.
struct ShiftState {
  std::uint32_t z = 0;
  DcsrBlock upper;
  DcsrBlock lower;
  std::uint64_t local_count = 0;
};

namespace detail {

inline DcsrBlock receive_block(Comm& h, int src, Orientation expect, std::uint32_t z) {
  try {
    DcsrBlock b = blob_decode(h.recv_bytes(src));
    if (b.orientation != expect) fail(ErrorKind::decode, "unexpected block orientation");
    return b;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::decode) throw;
    fail(ErrorKind::protocol, "rank " + std::to_string(h.rank()) + " shift " + std::to_string(z) +
                                  ": bad block from rank " + std::to_string(src) + ": " + e.what());
  }
}

inline DcsrBlock exchange(Comm& h, DcsrBlock block, GridCoord to, GridCoord from, std::uint32_t s, std::uint32_t z) {
  const int dest = rank_of_coord(to, s);
  const int src = rank_of_coord(from, s);
  if (dest == h.rank()) return block;
  const Orientation o = block.orientation;
  h.send_bytes(dest, blob_encode(block));
  return receive_block(h, src, o, z);
}

}  // namespace detail

/// Cannon pre-skew: afterwards rank (x, y) holds U_{x, (x+y) mod s} and
/// L_{(x+y) mod s, y}.
inline ShiftState initial_align(Comm& h, DcsrBlock upper, DcsrBlock lower) {
  const std::uint32_t s = grid_side_for(h.size());
  const GridCoord me = coord_of_rank(h.rank(), s);
  const std::uint32_t x = me.x;
  const std::uint32_t y = me.y;
  ShiftState st;
  // U_{x,c} belongs at (x, c - x); L_{r,y} belongs at (r - y, y).
  st.upper = detail::exchange(h, std::move(upper), {x, (y + s - x % s) % s}, {x, (x + y) % s}, s, 0);
  st.lower = detail::exchange(h, std::move(lower), {(x + s - y % s) % s, y}, {(x + y) % s, y}, s, 0);
  return st;
}

/// One Cannon shift: U moves left along the grid row, L moves up the grid
/// column, each as a single blob.
inline ShiftState shift_step(Comm& h, ShiftState st) {
  const std::uint32_t s = grid_side_for(h.size());
  if (st.z + 1 >= s) fail(ErrorKind::invariant, "shift past the last step");
  const GridCoord me = coord_of_rank(h.rank(), s);
  const std::uint32_t next = st.z + 1;
  st.upper = detail::exchange(h, std::move(st.upper), {me.x, (me.y + s - 1) % s}, {me.x, (me.y + 1) % s}, s, next);
  st.lower = detail::exchange(h, std::move(st.lower), {(me.x + s - 1) % s, me.y}, {(me.x + 1) % s, me.y}, s, next);
  st.z = next;
  return st;
}

struct ShiftMetrics {
  std::uint32_t z = 0;
  std::uint32_t u_class = 0;  // column class of the held U block
  std::uint32_t l_class = 0;  // row class of the held L block
  std::uint32_t expected_class = 0;
  BlockCount work;
  double compute_seconds = 0.0;
  double wait_seconds = 0.0;  // time in the following shift, 0 on the last
  std::uint64_t bytes_sent = 0;
};

struct DistributedCount {
  std::uint64_t global_count = 0;
  std::uint64_t local_count = 0;
  std::uint64_t task_nnz = 0;
  std::uint64_t align_bytes = 0;
  std::vector<ShiftMetrics> shifts;
};

/// Alignment, sqrt(p) rounds of count + shift, then a global sum.
inline DistributedCount count_triangles_distributed(Comm& h, const RankBlocks& blocks, const EngineOptions& opts) {
  using Clock = std::chrono::steady_clock;
  const std::uint32_t s = grid_side_for(h.size());
  const GridCoord me = coord_of_rank(h.rank(), s);
  const DcsrBlock& task = opts.enumeration == Enumeration::jik ? blocks.tasks : blocks.upper;

  DistributedCount out;
  out.task_nnz = task.nnz();
  const std::uint64_t bytes0 = h.counters()[h.phase()].bytes_sent;
  ShiftState st = initial_align(h, blocks.upper, blocks.lower);
  out.align_bytes = h.counters()[h.phase()].bytes_sent - bytes0;

  HashScratch scratch;
  for (std::uint32_t z = 0; z < s; ++z) {
    ShiftMetrics m;
    m.z = z;
    m.u_class = st.upper.coord.y;
    m.l_class = st.lower.coord.x;
    m.expected_class = cannon_operand_class(me.x, me.y, z, s);
    if (st.z != z || m.u_class != m.expected_class || m.l_class != m.expected_class ||
        st.upper.coord.x != me.x || st.lower.coord.y != me.y) {
      fail(ErrorKind::invariant, "rank " + std::to_string(h.rank()) + " shift " + std::to_string(z) +
                                     " holds classes U " + std::to_string(m.u_class) + " / L " +
                                     std::to_string(m.l_class) + ", expected " + std::to_string(m.expected_class));
    }
    const auto t0 = Clock::now();
    scratch.reserve(longest_row(st.upper), opts.scratch_factor);
    m.work = count_block(task, st.upper, st.lower, scratch, opts);
    const auto t1 = Clock::now();
    m.compute_seconds = std::chrono::duration<double>(t1 - t0).count();
    st.local_count += m.work.triangles;
    if (z + 1 < s) {
      const std::uint64_t before = h.counters()[h.phase()].bytes_sent;
      st = shift_step(h, std::move(st));
      m.bytes_sent = h.counters()[h.phase()].bytes_sent - before;
      m.wait_seconds = std::chrono::duration<double>(Clock::now() - t1).count();
    }
    out.shifts.push_back(m);
  }
  out.local_count = st.local_count;
  out.global_count = h.allreduce_sum_u64(st.local_count);
  return out;
}

}  // namespace trigrid
