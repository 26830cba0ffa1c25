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

#include <array>
#include <cmath>
#include <cstdint>
#include <string>

#include "trigrid/graph.hpp"

namespace trigrid {

/// SplitMix64 (Steele, Lea, Flood). Each generated edge draws from its own
/// stream, seeded by mixing the run seed with the edge index, so output does
/// not depend on generation order.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix(state_);
  }

  /// Uniform in [0, 1) with 53 bits of precision.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  static SplitMix64 stream(std::uint64_t seed, std::uint64_t index) {
    return SplitMix64(mix(seed ^ mix(index + 0x632BE59BD9B4E019ull)));
  }

 private:
  std::uint64_t state_;
};

struct RmatParams {
  unsigned scale = 10;
  unsigned edge_factor = 16;
  std::array<double, 4> probs{0.57, 0.19, 0.19, 0.05};
  std::uint64_t seed = 1;
  unsigned max_scale = 32;

  VertexId vertex_count() const { return VertexId{1} << scale; }
  EdgeCount raw_edge_count() const { return static_cast<EdgeCount>(edge_factor) * vertex_count(); }
};

inline void validate(const RmatParams& p) {
  if (p.scale < 1) fail(ErrorKind::configuration, "RMAT scale must be >= 1");
  if (p.scale > p.max_scale || p.scale > 48) {
    fail(ErrorKind::configuration, "RMAT scale " + std::to_string(p.scale) + " exceeds the limit of " +
                                       std::to_string(p.max_scale));
  }
  if (p.edge_factor < 1) fail(ErrorKind::configuration, "RMAT edge factor must be >= 1");
  double sum = 0.0;
  for (double q : p.probs) {
    if (!(q >= 0.0)) fail(ErrorKind::configuration, "RMAT probabilities must be non-negative");
    sum += q;
  }
  if (std::abs(sum - 1.0) > 1e-9) fail(ErrorKind::configuration, "RMAT probabilities must sum to 1");
}

/// One raw RMAT edge: `scale` recursive quadrant choices, most significant
/// bit first.
inline Edge rmat_edge(const RmatParams& p, std::uint64_t index) {
  SplitMix64 rng = SplitMix64::stream(p.seed, index);
  const double ab = p.probs[0] + p.probs[1];
  const double abc = ab + p.probs[2];
  Edge e;
  for (unsigned level = 0; level < p.scale; ++level) {
    const double r = rng.uniform();
    unsigned row_bit = 0;
    unsigned col_bit = 0;
    if (r < p.probs[0]) {
    } else if (r < ab) {
      col_bit = 1;
    } else if (r < abc) {
      row_bit = 1;
    } else {
      row_bit = col_bit = 1;
    }
    e.u = (e.u << 1) | row_bit;
    e.v = (e.v << 1) | col_bit;
  }
  return e;
}

/// edge_factor * 2^scale raw edges, canonicalized.
inline EdgeList generate_rmat(const RmatParams& p) {
  validate(p);
  EdgeList raw;
  raw.n = p.vertex_count();
  raw.edges.resize(p.raw_edge_count());
  for (std::uint64_t i = 0; i < raw.edges.size(); ++i) raw.edges[i] = rmat_edge(p, i);
  return canonicalize(std::move(raw));
}

}  // namespace trigrid
