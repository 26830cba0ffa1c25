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
#include <bitset>
#include <cstdint>
#include <vector>

#include "trigrid/graph.hpp"

// Sequential reference counts. Deliberately shares nothing with the engine's
// kernel: no hashing, no degree ordering, no blocks.

namespace trigrid::oracle {

/// Sum over edges (i, j), i < j, of |{k > j : (i,k) and (j,k) are edges}|,
/// by merging sorted forward lists.
inline std::uint64_t count_serial(const EdgeList& g) {
  std::vector<std::vector<VertexId>> forward(g.n);
  for (const Edge& e : g.edges) {
    if (e.u == e.v) continue;
    forward[std::min(e.u, e.v)].push_back(std::max(e.u, e.v));
  }
  for (auto& list : forward) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  std::uint64_t total = 0;
  for (VertexId i = 0; i < g.n; ++i) {
    const auto& ni = forward[i];
    for (VertexId j : ni) {
      const auto& nj = forward[j];
      // every element of nj is > j; skip the part of ni that is <= j
      auto a = std::upper_bound(ni.begin(), ni.end(), j);
      auto b = nj.begin();
      while (a != ni.end() && b != nj.end()) {
        if (*a < *b) {
          ++a;
        } else if (*b < *a) {
          ++b;
        } else {
          ++total;
          ++a;
          ++b;
        }
      }
    }
  }
  return total;
}

inline constexpr VertexId kMatrixOracleLimit = 64;

/// Dense boolean U and L (L = U transposed), C = U * L evaluated only where
/// U is non-zero, summed.
inline std::uint64_t count_matrix(const EdgeList& g) {
  if (g.n > kMatrixOracleLimit) fail(ErrorKind::malformed_input, "count_matrix supports at most 64 vertices");
  std::array<std::bitset<kMatrixOracleLimit>, kMatrixOracleLimit> upper{}, lower{};
  for (const Edge& e : g.edges) {
    if (e.u == e.v) continue;
    const VertexId i = std::min(e.u, e.v);
    const VertexId j = std::max(e.u, e.v);
    upper[i][j] = true;
    lower[j][i] = true;
  }
  std::uint64_t total = 0;
  for (VertexId i = 0; i < g.n; ++i) {
    for (VertexId j = 0; j < g.n; ++j) {
      if (!upper[i][j]) continue;
      std::uint64_t c = 0;
      for (VertexId k = 0; k < g.n; ++k) c += (upper[i][k] && lower[k][j]) ? 1 : 0;
      total += c;
    }
  }
  return total;
}

}  // namespace trigrid::oracle
