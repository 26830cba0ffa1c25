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
#include <vector>

#include "trigrid/error.hpp"

namespace trigrid {

using VertexId = std::uint64_t;
using EdgeCount = std::uint64_t;

/// Vertex ids must stay below 2^48.
inline constexpr VertexId kVertexIdLimit = VertexId{1} << 48;

struct Edge {
  VertexId u = 0;
  VertexId v = 0;

  auto operator<=>(const Edge&) const = default;
};

/// A simple undirected graph as a list of vertex pairs over [0, n).
struct EdgeList {
  VertexId n = 0;
  std::vector<Edge> edges;

  bool operator==(const EdgeList&) const = default;
};

/// Compressed-row adjacency. Lists are sorted ascending.
struct CsrGraph {
  VertexId n = 0;
  std::vector<EdgeCount> offsets{0};
  std::vector<VertexId> neighbors;

  EdgeCount nnz() const { return offsets.back(); }
  EdgeCount degree(VertexId v) const { return offsets[v + 1] - offsets[v]; }

  std::span<const VertexId> adjacency(VertexId v) const {
    return {neighbors.data() + offsets[v], static_cast<std::size_t>(degree(v))};
  }

  bool operator==(const CsrGraph&) const = default;
};

struct GraphStats {
  VertexId n = 0;
  EdgeCount m = 0;
  double d_avg = 0.0;
  EdgeCount d_max = 0;
};

inline void check_vertex_count(VertexId n) {
  if (n > kVertexIdLimit) fail(ErrorKind::malformed_input, "vertex count exceeds 2^48");
}

/// Drops self-loops and duplicates; every edge becomes (min, max), sorted.
inline EdgeList canonicalize(EdgeList raw) {
  check_vertex_count(raw.n);
  std::vector<Edge>& edges = raw.edges;
  std::size_t kept = 0;
  for (const Edge& e : edges) {
    if (e.u >= raw.n || e.v >= raw.n) {
      fail(ErrorKind::malformed_input, "edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                                           ") references a vertex >= n = " + std::to_string(raw.n));
    }
    if (e.u == e.v) continue;
    edges[kept++] = Edge{std::min(e.u, e.v), std::max(e.u, e.v)};
  }
  edges.resize(kept);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return raw;
}

inline bool is_canonical(const EdgeList& g) {
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const Edge& e = g.edges[i];
    if (!(e.u < e.v) || e.v >= g.n) return false;
    if (i > 0 && !(g.edges[i - 1] < e)) return false;
  }
  return true;
}

/// Symmetric CSR: each undirected edge appears in both endpoint lists.
inline CsrGraph to_csr(const EdgeList& g) {
  check_vertex_count(g.n);
  CsrGraph csr;
  csr.n = g.n;
  csr.offsets.assign(g.n + 1, 0);
  for (const Edge& e : g.edges) {
    if (e.u >= g.n || e.v >= g.n) fail(ErrorKind::malformed_input, "edge endpoint >= n");
    ++csr.offsets[e.u + 1];
    ++csr.offsets[e.v + 1];
  }
  for (VertexId v = 0; v < g.n; ++v) csr.offsets[v + 1] += csr.offsets[v];
  csr.neighbors.resize(csr.offsets.back());
  std::vector<EdgeCount> cursor(csr.offsets.begin(), csr.offsets.end() - 1);
  for (const Edge& e : g.edges) {
    csr.neighbors[cursor[e.u]++] = e.v;
    csr.neighbors[cursor[e.v]++] = e.u;
  }
  for (VertexId v = 0; v < g.n; ++v) {
    std::sort(csr.neighbors.begin() + static_cast<std::ptrdiff_t>(csr.offsets[v]),
              csr.neighbors.begin() + static_cast<std::ptrdiff_t>(csr.offsets[v + 1]));
  }
  return csr;
}

/// Statistics of a symmetric CSR graph (m counts undirected edges).
inline GraphStats compute_stats(const CsrGraph& g) {
  GraphStats s;
  s.n = g.n;
  s.m = g.nnz() / 2;
  for (VertexId v = 0; v < g.n; ++v) s.d_max = std::max(s.d_max, g.degree(v));
  s.d_avg = g.n == 0 ? 0.0 : 2.0 * static_cast<double>(s.m) / static_cast<double>(g.n);
  return s;
}

inline void check_permutation(std::span<const VertexId> position, VertexId n) {
  if (position.size() != n) {
    fail(ErrorKind::invalid_permutation, "permutation has " + std::to_string(position.size()) +
                                             " entries, expected " + std::to_string(n));
  }
  std::vector<bool> seen(n, false);
  for (VertexId p : position) {
    if (p >= n || seen[p]) fail(ErrorKind::invalid_permutation, "not a bijection on [0, n)");
    seen[p] = true;
  }
}

struct TriangularSplit {
  CsrGraph upper;  // row i holds relabeled neighbors j > i
  CsrGraph lower;  // transpose of upper: row j holds i < j
};

/// Relabels g by `position` (old id -> new id) and splits the adjacency
/// matrix into its strictly upper and strictly lower triangles.
inline TriangularSplit split_upper_lower(const CsrGraph& g, std::span<const VertexId> position) {
  check_permutation(position, g.n);
  TriangularSplit out;
  for (CsrGraph* part : {&out.upper, &out.lower}) {
    part->n = g.n;
    part->offsets.assign(g.n + 1, 0);
  }
  for (VertexId v = 0; v < g.n; ++v) {
    const VertexId pv = position[v];
    for (VertexId w : g.adjacency(v)) {
      const VertexId pw = position[w];
      if (pv < pw) {
        ++out.upper.offsets[pv + 1];
      } else if (pw < pv) {
        ++out.lower.offsets[pv + 1];
      }
    }
  }
  for (CsrGraph* part : {&out.upper, &out.lower}) {
    for (VertexId v = 0; v < g.n; ++v) part->offsets[v + 1] += part->offsets[v];
    part->neighbors.resize(part->offsets.back());
  }
  std::vector<EdgeCount> up(out.upper.offsets.begin(), out.upper.offsets.end() - 1);
  std::vector<EdgeCount> lo(out.lower.offsets.begin(), out.lower.offsets.end() - 1);
  for (VertexId v = 0; v < g.n; ++v) {
    const VertexId pv = position[v];
    for (VertexId w : g.adjacency(v)) {
      const VertexId pw = position[w];
      if (pv < pw) {
        out.upper.neighbors[up[pv]++] = pw;
      } else if (pw < pv) {
        out.lower.neighbors[lo[pv]++] = pw;
      }
    }
  }
  for (CsrGraph* part : {&out.upper, &out.lower}) {
    for (VertexId v = 0; v < g.n; ++v) {
      std::sort(part->neighbors.begin() + static_cast<std::ptrdiff_t>(part->offsets[v]),
                part->neighbors.begin() + static_cast<std::ptrdiff_t>(part->offsets[v + 1]));
    }
  }
  return out;
}

/// Position of each vertex after a stable sort by non-decreasing degree.
inline std::vector<VertexId> degree_order(const CsrGraph& g) {
  std::vector<VertexId> order(g.n);
  for (VertexId v = 0; v < g.n; ++v) order[v] = v;
  std::stable_sort(order.begin(), order.end(),
                   [&](VertexId a, VertexId b) { return g.degree(a) < g.degree(b); });
  std::vector<VertexId> position(g.n);
  for (VertexId i = 0; i < g.n; ++i) position[order[i]] = i;
  return position;
}

}  // namespace trigrid
