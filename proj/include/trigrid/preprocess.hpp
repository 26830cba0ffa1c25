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
#include <array>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "trigrid/dcsr_block.hpp"
#include "trigrid/graph.hpp"
#include "trigrid/transport.hpp"

namespace trigrid {

/// The vertices one rank owns together with their full adjacency lists.
struct LocalSlice {
  int owner = 0;
  VertexId n = 0;
  std::vector<VertexId> vertices;
  std::vector<EdgeCount> offsets{0};
  std::vector<VertexId> adjacency;

  std::size_t size() const { return vertices.size(); }
  EdgeCount nnz() const { return adjacency.size(); }

  std::span<const VertexId> neighbors(std::size_t i) const {
    return {adjacency.data() + offsets[i], static_cast<std::size_t>(offsets[i + 1] - offsets[i])};
  }

  void append(VertexId v, std::span<const VertexId> nbrs) {
    vertices.push_back(v);
    adjacency.insert(adjacency.end(), nbrs.begin(), nbrs.end());
    offsets.push_back(adjacency.size());
  }
};

/// Contiguous 1-D block of the graph for `rank`: ids [r*c, (r+1)*c) with
/// c = ceil(n / p). This is the layout the pipeline starts from.
inline LocalSlice block_slice(const CsrGraph& g, int rank, int p) {
  LocalSlice s;
  s.owner = rank;
  s.n = g.n;
  const VertexId chunk = (g.n + p - 1) / static_cast<VertexId>(p);
  const VertexId begin = std::min<VertexId>(g.n, chunk * rank);
  const VertexId end = std::min<VertexId>(g.n, begin + chunk);
  for (VertexId v = begin; v < end; ++v) s.append(v, g.adjacency(v));
  return s;
}

/// Position of v when cyclic ownership is laid out contiguously:
/// (v mod p) * ceil(n/p) + v / p. Ordering vertices by this label is the
/// (owner rank, local order) order used to break degree ties.
inline VertexId cyclic_label(VertexId v, VertexId n, int p) {
  const VertexId chunk = (n + p - 1) / static_cast<VertexId>(p);
  return (v % static_cast<VertexId>(p)) * chunk + v / static_cast<VertexId>(p);
}

namespace detail {

inline void put_words(Bytes& out, std::span<const VertexId> words) {
  for (VertexId w : words) put_u64(out, w);
}

}  // namespace detail

/// Moves vertex v (with its adjacency) to rank v mod p. The input slices
/// must tile [0, n) contiguously in rank order.
inline LocalSlice cyclic_redistribute(Comm& h, const LocalSlice& input) {
  const int p = h.size();
  const int me = h.rank();

  bool contiguous = true;
  for (std::size_t i = 1; i < input.vertices.size(); ++i) {
    contiguous = contiguous && input.vertices[i] == input.vertices[i - 1] + 1;
  }
  const VertexId begin = input.vertices.empty() ? 0 : input.vertices.front();
  const VertexId end = input.vertices.empty() ? 0 : input.vertices.back() + 1;
  const std::array<std::uint64_t, 5> range{contiguous ? 1u : 0u, input.vertices.empty() ? 0u : 1u, begin, end,
                                           input.n};
  std::vector<Bytes> announce(p, encode_u64s(range));
  const auto ranges = h.alltoallv_bytes(std::move(announce));
  VertexId expect = 0;
  bool ok = true;
  for (int r = 0; r < p; ++r) {
    const auto w = decode_u64s(ranges[r]);
    ok = ok && w.size() == 5 && w[0] == 1 && w[4] == input.n;
    if (ok && w[1] == 1) {
      ok = w[2] == expect;
      expect = w[3];
    }
  }
  if (!ok || expect != input.n) {
    fail(ErrorKind::malformed_input, "input slices do not partition [0, n) contiguously in rank order");
  }

  std::vector<Bytes> outgoing(p);
  for (std::size_t i = 0; i < input.size(); ++i) {
    const VertexId v = input.vertices[i];
    auto nbrs = input.neighbors(i);
    Bytes& buf = outgoing[v % static_cast<VertexId>(p)];
    put_u64(buf, v);
    put_u64(buf, nbrs.size());
    detail::put_words(buf, nbrs);
  }
  const auto incoming = h.alltoallv_bytes(std::move(outgoing));

  std::vector<std::pair<VertexId, std::vector<VertexId>>> received;
  for (const Bytes& buf : incoming) {
    ByteReader r(buf);
    while (!r.done()) {
      const VertexId v = r.u64();
      const std::uint64_t deg = r.u64();
      std::vector<VertexId> nbrs;
      r.u64s(nbrs, deg);
      received.emplace_back(v, std::move(nbrs));
    }
  }
  std::sort(received.begin(), received.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  LocalSlice out;
  out.owner = me;
  out.n = input.n;
  VertexId want = static_cast<VertexId>(me);
  for (auto& [v, nbrs] : received) {
    if (v != want) fail(ErrorKind::malformed_input, "cyclic redistribution lost or duplicated vertex " + std::to_string(want));
    out.append(v, nbrs);
    want += static_cast<VertexId>(p);
  }
  if (want < input.n) fail(ErrorKind::malformed_input, "cyclic redistribution lost vertex " + std::to_string(want));
  return out;
}

/// Old-id -> new-id mapping for the vertices one rank owns (old id mod p).
struct RelabelMap {
  int owner = 0;
  int p = 1;
  VertexId n = 0;
  EdgeCount d_max = 0;
  std::vector<VertexId> old_ids;
  std::vector<VertexId> new_ids;

  bool owns(VertexId old_id) const {
    return old_id < n && old_id % static_cast<VertexId>(p) == static_cast<VertexId>(owner);
  }

  VertexId lookup(VertexId old_id) const {
    if (!owns(old_id)) {
      fail(ErrorKind::protocol, "rank " + std::to_string(owner) + " asked for unknown vertex " + std::to_string(old_id));
    }
    return new_ids[old_id / static_cast<VertexId>(p)];
  }
};

/// Distributed counting sort by degree. New id of v = number of vertices of
/// smaller degree + number of equal-degree vertices before v in
/// (owner rank, owned order).
inline RelabelMap degree_relabel(Comm& h, const LocalSlice& slice) {
  const int p = h.size();
  RelabelMap map;
  map.owner = h.rank();
  map.p = p;
  map.n = slice.n;
  map.old_ids = slice.vertices;
  for (std::size_t i = 0; i < slice.size(); ++i) {
    if (slice.vertices[i] != static_cast<VertexId>(map.owner) + i * static_cast<VertexId>(p)) {
      fail(ErrorKind::malformed_input, "degree relabel expects a cyclically distributed slice");
    }
  }

  EdgeCount local_max = 0;
  for (std::size_t i = 0; i < slice.size(); ++i) local_max = std::max<EdgeCount>(local_max, slice.neighbors(i).size());
  map.d_max = h.allreduce_max_u64(local_max);

  std::vector<std::uint64_t> histogram(map.d_max + 1, 0);
  for (std::size_t i = 0; i < slice.size(); ++i) ++histogram[slice.neighbors(i).size()];
  const auto before = h.exscan_sum_vec(histogram);
  const auto totals = h.allreduce_sum_vec(histogram);

  std::vector<std::uint64_t> cursor(totals.size());
  std::exclusive_scan(totals.begin(), totals.end(), cursor.begin(), std::uint64_t{0});
  for (std::size_t d = 0; d < cursor.size(); ++d) cursor[d] += before[d];

  map.new_ids.resize(slice.size());
  for (std::size_t i = 0; i < slice.size(); ++i) map.new_ids[i] = cursor[slice.neighbors(i).size()]++;
  return map;
}

struct ResolveStats {
  std::uint64_t remote_queries = 0;
};

/// Translates the slice (owned ids and adjacency) into new ids. Remote
/// neighbors are looked up at their owner rank (old id mod p) through one
/// query and one reply all-to-all exchange. Owned vertices and adjacency
/// lists come back sorted ascending.
inline LocalSlice resolve_neighbor_ids(Comm& h, const LocalSlice& slice, const RelabelMap& map,
                                       ResolveStats* stats = nullptr) {
  const int p = h.size();
  const int me = h.rank();
  std::vector<VertexId> translated(slice.nnz());
  std::vector<Bytes> queries(p);
  std::vector<std::vector<std::size_t>> slots(p);
  for (std::size_t e = 0; e < slice.adjacency.size(); ++e) {
    const VertexId u = slice.adjacency[e];
    if (u >= slice.n) fail(ErrorKind::protocol, "adjacency entry " + std::to_string(u) + " >= n");
    const int owner = static_cast<int>(u % static_cast<VertexId>(p));
    if (owner == me) {
      translated[e] = map.lookup(u);
    } else {
      put_u64(queries[owner], u);
      slots[owner].push_back(e);
    }
  }
  if (stats) {
    stats->remote_queries = 0;
    for (const auto& s : slots) stats->remote_queries += s.size();
  }

  const auto asked = h.alltoallv_bytes(std::move(queries));
  std::vector<Bytes> replies(p);
  for (int r = 0; r < p; ++r) {
    for (VertexId u : decode_u64s(asked[r])) put_u64(replies[r], map.lookup(u));
  }
  const auto answered = h.alltoallv_bytes(std::move(replies));
  for (int r = 0; r < p; ++r) {
    const auto ids = decode_u64s(answered[r]);
    if (ids.size() != slots[r].size()) fail(ErrorKind::protocol, "reply count mismatch from rank " + std::to_string(r));
    for (std::size_t i = 0; i < ids.size(); ++i) translated[slots[r][i]] = ids[i];
  }

  std::vector<std::size_t> order(slice.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return map.new_ids[a] < map.new_ids[b]; });
  LocalSlice out;
  out.owner = me;
  out.n = slice.n;
  for (std::size_t i : order) {
    const auto first = translated.begin() + static_cast<std::ptrdiff_t>(slice.offsets[i]);
    const auto last = translated.begin() + static_cast<std::ptrdiff_t>(slice.offsets[i + 1]);
    std::sort(first, last);
    out.append(map.new_ids[i], std::span<const VertexId>(translated.data() + slice.offsets[i],
                                                         static_cast<std::size_t>(last - first)));
  }
  return out;
}

/// Blocks held by one grid rank at its home coordinate (x, y).
struct RankBlocks {
  DcsrBlock upper;  // U_{x,y}, row-major
  DcsrBlock lower;  // L_{x,y}, column-major
  DcsrBlock tasks;  // C[L_{x,y}]: the same L entries, row-major
};

/// 2-D cyclic distribution: entry (r, c) of U or L goes to grid rank
/// (r mod s, c mod s). Each destination receives one buffer holding a U shard
/// blob followed by an L shard blob.
inline RankBlocks build_2d_blocks(Comm& h, const LocalSlice& slice, std::uint32_t grid_side) {
  const int p = h.size();
  if (static_cast<std::uint64_t>(grid_side) * grid_side != static_cast<std::uint64_t>(p)) {
    fail(ErrorKind::configuration, "grid side " + std::to_string(grid_side) + " does not match " +
                                       std::to_string(p) + " ranks");
  }
  const VertexId s = grid_side;
  std::vector<std::vector<std::pair<VertexId, VertexId>>> upper(p), lower(p);
  for (std::size_t i = 0; i < slice.size(); ++i) {
    const VertexId v = slice.vertices[i];
    for (VertexId u : slice.neighbors(i)) {
      const int dest = static_cast<int>((v % s) * s + u % s);
      if (u > v) {
        upper[dest].emplace_back(v, u);
      } else if (u < v) {
        lower[dest].emplace_back(u, v);  // column-major: (column, row)
      } else {
        fail(ErrorKind::invariant, "self-loop on vertex " + std::to_string(v));
      }
    }
  }
  std::vector<Bytes> outgoing(p);
  for (int d = 0; d < p; ++d) {
    const GridCoord c = coord_of_rank(d, grid_side);
    blob_append(outgoing[d], make_block(grid_side, c, Orientation::row_major, slice.n, std::move(upper[d])));
    blob_append(outgoing[d], make_block(grid_side, c, Orientation::column_major, slice.n, std::move(lower[d])));
  }
  const auto incoming = h.alltoallv_bytes(std::move(outgoing));

  std::vector<std::pair<VertexId, VertexId>> u_entries, l_entries, t_entries;
  for (const Bytes& buf : incoming) {
    std::span<const std::uint8_t> rest(buf);
    auto [ushard, used_u] = blob_decode_prefix(rest);
    rest = rest.subspan(used_u);
    auto [lshard, used_l] = blob_decode_prefix(rest);
    if (used_l != rest.size()) fail(ErrorKind::protocol, "trailing bytes in block shard");
    for (const auto& e : block_entries(ushard)) u_entries.push_back(e);
    for (const auto& [col, row] : block_entries(lshard)) {
      l_entries.emplace_back(col, row);
      t_entries.emplace_back(row, col);
    }
  }
  const GridCoord home = coord_of_rank(h.rank(), grid_side);
  RankBlocks out;
  out.upper = make_block(grid_side, home, Orientation::row_major, slice.n, std::move(u_entries));
  out.lower = make_block(grid_side, home, Orientation::column_major, slice.n, std::move(l_entries));
  out.tasks = make_block(grid_side, home, Orientation::row_major, slice.n, std::move(t_entries));
  check_block(out.upper, Triangle::minor_above_major);
  check_block(out.lower, Triangle::minor_above_major);
  check_block(out.tasks, Triangle::minor_below_major);
  return out;
}

struct PreprocessStats {
  EdgeCount d_max = 0;
  std::uint64_t remote_queries = 0;
};

/// Whole preprocessing phase for one rank, starting from its 1-D block.
inline RankBlocks preprocess(Comm& h, const LocalSlice& block_input, std::uint32_t grid_side,
                             PreprocessStats* stats = nullptr) {
  LocalSlice cyclic = cyclic_redistribute(h, block_input);
  RelabelMap map = degree_relabel(h, cyclic);
  ResolveStats rs;
  LocalSlice relabeled = resolve_neighbor_ids(h, cyclic, map, &rs);
  if (stats) {
    stats->d_max = map.d_max;
    stats->remote_queries = rs.remote_queries;
  }
  return build_2d_blocks(h, relabeled, grid_side);
}

}  // namespace trigrid
