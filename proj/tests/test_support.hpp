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

// Graph families and random generators shared by the test binaries.

#include <algorithm>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "trigrid/dcsr_block.hpp"
#include "trigrid/graph.hpp"

namespace trigrid::fixtures {

inline EdgeList complete(VertexId n) {
  EdgeList g{n, {}};
  for (VertexId i = 0; i < n; ++i) {
    for (VertexId j = i + 1; j < n; ++j) g.edges.push_back({i, j});
  }
  return g;
}

inline EdgeList cycle(VertexId n) {
  EdgeList g{n, {}};
  for (VertexId i = 0; i < n; ++i) g.edges.push_back({i, (i + 1) % n});
  return canonicalize(g);
}

inline EdgeList star(VertexId leaves) {
  EdgeList g{leaves + 1, {}};
  for (VertexId i = 1; i <= leaves; ++i) g.edges.push_back({0, i});
  return g;
}

inline EdgeList complete_bipartite(VertexId a, VertexId b) {
  EdgeList g{a + b, {}};
  for (VertexId i = 0; i < a; ++i) {
    for (VertexId j = 0; j < b; ++j) g.edges.push_back({i, a + j});
  }
  return g;
}

inline EdgeList disjoint_triangles(VertexId count) {
  EdgeList g{3 * count, {}};
  for (VertexId t = 0; t < count; ++t) {
    g.edges.push_back({3 * t, 3 * t + 1});
    g.edges.push_back({3 * t, 3 * t + 2});
    g.edges.push_back({3 * t + 1, 3 * t + 2});
  }
  return g;
}

/// Erdos-Renyi style graph with each edge present with probability q.
inline EdgeList random_graph(VertexId n, double q, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(q);
  EdgeList g{n, {}};
  for (VertexId i = 0; i < n; ++i) {
    for (VertexId j = i + 1; j < n; ++j) {
      if (coin(rng)) g.edges.push_back({i, j});
    }
  }
  return g;
}

/// Valid random block honoring the residue classes and the triangle side
/// implied by its orientation (U row-major / L column-major: minor > major).
inline DcsrBlock random_block(std::mt19937_64& rng) {
  const std::uint32_t side = 1 + static_cast<std::uint32_t>(rng() % 5);
  const GridCoord c{static_cast<std::uint32_t>(rng() % side), static_cast<std::uint32_t>(rng() % side)};
  const Orientation o = rng() % 2 ? Orientation::row_major : Orientation::column_major;
  const VertexId n = rng() % 4 == 0 ? rng() % 8 : 8 + rng() % 200;
  const std::uint32_t major_res = o == Orientation::row_major ? c.x : c.y;
  const std::uint32_t minor_res = o == Orientation::row_major ? c.y : c.x;
  std::set<std::pair<VertexId, VertexId>> entries;
  const std::size_t want = rng() % 40;
  for (std::size_t i = 0; i < want * 3 && entries.size() < want; ++i) {
    if (n == 0) break;
    const VertexId a = (rng() % n) / side * side + major_res;
    const VertexId b = (rng() % n) / side * side + minor_res;
    if (a < n && b < n && b > a) entries.emplace(a, b);
  }
  return make_block(side, c, o, n, {entries.begin(), entries.end()});
}

}  // namespace trigrid::fixtures
