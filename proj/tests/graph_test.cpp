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

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <numeric>
#include <random>
#include <sstream>

#include "trigrid/graph.hpp"
#include "trigrid/graph_io.hpp"
#include "trigrid/rmat.hpp"

using namespace trigrid;

namespace {

EdgeList complete_graph(VertexId n, bool both_directions) {
  EdgeList g{n, {}};
  for (VertexId i = 0; i < n; ++i) {
    for (VertexId j = i + 1; j < n; ++j) {
      g.edges.push_back({i, j});
      if (both_directions) g.edges.push_back({j, i});
    }
  }
  return g;
}

std::vector<VertexId> upper_row(const CsrGraph& g, VertexId v) {
  auto s = g.adjacency(v);
  return {s.begin(), s.end()};
}

}  // namespace

TEST(Canonicalize, DropsSelfLoopsAndDuplicates) {
  EdgeList raw{3, {{1, 0}, {0, 1}, {2, 2}, {1, 2}}};
  EXPECT_EQ(canonicalize(raw).edges, (std::vector<Edge>{{0, 1}, {1, 2}}));
}

TEST(Canonicalize, EmptyStaysEmpty) {
  EXPECT_TRUE(canonicalize(EdgeList{5, {}}).edges.empty());
}

TEST(Canonicalize, CompleteGraphListedBothWays) {
  const EdgeList g = canonicalize(complete_graph(4, true));
  EXPECT_EQ(g.edges.size(), 6u);
  EXPECT_TRUE(is_canonical(g));
}

TEST(Canonicalize, RejectsOutOfRangeIds) {
  try {
    canonicalize(EdgeList{2, {{0, 2}}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::malformed_input);
  }
}

TEST(ToCsr, Triangle) {
  const CsrGraph g = to_csr(EdgeList{3, {{0, 1}, {0, 2}, {1, 2}}});
  EXPECT_EQ(g.offsets, (std::vector<EdgeCount>{0, 2, 4, 6}));
  EXPECT_EQ(g.neighbors, (std::vector<VertexId>{1, 2, 0, 2, 0, 1}));
}

TEST(ToCsr, IsolatedVertexHasEmptyList) {
  const CsrGraph g = to_csr(EdgeList{3, {{0, 1}}});
  EXPECT_EQ(g.offsets, (std::vector<EdgeCount>{0, 1, 2, 2}));
  EXPECT_EQ(g.degree(2), 0u);
}

TEST(ToCsr, PathDegrees) {
  const CsrGraph g = to_csr(EdgeList{3, {{0, 1}, {1, 2}}});
  EXPECT_EQ(g.degree(0), 1u);
  EXPECT_EQ(g.degree(1), 2u);
  EXPECT_EQ(g.degree(2), 1u);
}

TEST(SplitUpperLower, TriangleIdentity) {
  const CsrGraph g = to_csr(EdgeList{3, {{0, 1}, {0, 2}, {1, 2}}});
  const std::vector<VertexId> id{0, 1, 2};
  const auto split = split_upper_lower(g, id);
  EXPECT_EQ(upper_row(split.upper, 0), (std::vector<VertexId>{1, 2}));
  EXPECT_EQ(upper_row(split.upper, 1), (std::vector<VertexId>{2}));
  EXPECT_TRUE(upper_row(split.upper, 2).empty());
  EXPECT_EQ(upper_row(split.lower, 2), (std::vector<VertexId>{0, 1}));
}

TEST(SplitUpperLower, StarCenterOrderedLast) {
  // center 0 with leaves 1, 2, 3
  const CsrGraph g = to_csr(EdgeList{4, {{0, 1}, {0, 2}, {0, 3}}});
  const auto position = degree_order(g);
  EXPECT_EQ(position[0], 3u);
  const auto split = split_upper_lower(g, position);
  for (VertexId leaf = 1; leaf <= 3; ++leaf) {
    EXPECT_EQ(upper_row(split.upper, position[leaf]), (std::vector<VertexId>{3}));
  }
  EXPECT_TRUE(upper_row(split.upper, 3).empty());
}

TEST(SplitUpperLower, RmatEntryCountsMatchEdgeCount) {
  RmatParams p;
  p.scale = 8;
  p.seed = 7;
  const EdgeList g = generate_rmat(p);
  const CsrGraph csr = to_csr(g);
  const auto split = split_upper_lower(csr, degree_order(csr));
  EXPECT_EQ(split.upper.nnz(), g.edges.size());
  EXPECT_EQ(split.lower.nnz(), g.edges.size());
}

TEST(SplitUpperLower, RejectsNonBijection) {
  const CsrGraph g = to_csr(EdgeList{3, {{0, 1}}});
  const std::vector<VertexId> bad{0, 0, 2};
  try {
    split_upper_lower(g, bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_permutation);
  }
}

// For random graphs and random permutations: U is strictly upper, L is its
// transpose, both sorted, each holding every edge exactly once.
TEST(SplitUpperLower, PropertyRandomPermutations) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const VertexId n = 1 + rng() % 40;
    EdgeList raw{n, {}};
    const int m = static_cast<int>(rng() % 200);
    for (int e = 0; e < m; ++e) raw.edges.push_back({rng() % n, rng() % n});
    const EdgeList g = canonicalize(raw);
    const CsrGraph csr = to_csr(g);
    std::vector<VertexId> perm(n);
    std::iota(perm.begin(), perm.end(), VertexId{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto split = split_upper_lower(csr, perm);
    ASSERT_EQ(split.upper.nnz(), g.edges.size());
    ASSERT_EQ(split.lower.nnz(), g.edges.size());

    std::vector<Edge> from_upper, from_lower, expected;
    for (VertexId i = 0; i < n; ++i) {
      auto up = split.upper.adjacency(i);
      auto lo = split.lower.adjacency(i);
      ASSERT_TRUE(std::is_sorted(up.begin(), up.end()));
      ASSERT_TRUE(std::is_sorted(lo.begin(), lo.end()));
      for (VertexId j : up) {
        ASSERT_GT(j, i);
        from_upper.push_back({i, j});
      }
      for (VertexId j : lo) {
        ASSERT_LT(j, i);
        from_lower.push_back({j, i});
      }
    }
    for (const Edge& e : g.edges) {
      expected.push_back({std::min(perm[e.u], perm[e.v]), std::max(perm[e.u], perm[e.v])});
    }
    std::sort(from_upper.begin(), from_upper.end());
    std::sort(from_lower.begin(), from_lower.end());
    std::sort(expected.begin(), expected.end());
    EXPECT_EQ(from_upper, expected);
    EXPECT_EQ(from_lower, expected);
  }
}

TEST(GraphStats, DegreesOfStar) {
  const GraphStats s = compute_stats(to_csr(EdgeList{5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}}));
  EXPECT_EQ(s.m, 4u);
  EXPECT_EQ(s.d_max, 4u);
  EXPECT_DOUBLE_EQ(s.d_avg, 1.6);
}

TEST(GraphIo, TextFormatSkipsComments) {
  std::istringstream in("# header\n0 1\n\n  # indented comment\n2\t1\n");
  const EdgeList g = read_text_edges(in);
  EXPECT_EQ(g.n, 3u);
  EXPECT_EQ(g.edges, (std::vector<Edge>{{0, 1}, {2, 1}}));
}

TEST(GraphIo, TextFormatRejectsGarbage) {
  std::istringstream in("0 1\n0 x\n");
  EXPECT_THROW(read_text_edges(in), Error);
  std::istringstream extra("0 1 2\n");
  EXPECT_THROW(read_text_edges(extra), Error);
}

TEST(GraphIo, BinaryLayout) {
  const EdgeList g{3, {{0, 1}, {1, 2}}};
  const Bytes data = encode_binary_graph(g);
  ASSERT_EQ(data.size(), 4u + 16u + 2u * 16u);
  EXPECT_EQ(std::string(data.begin(), data.begin() + 4), "TGR1");
  EXPECT_EQ(data[4], 3);  // n, little-endian
  EXPECT_EQ(data[12], 2);  // m
  EXPECT_EQ(decode_binary_graph(data), g);
  Bytes truncated(data.begin(), data.end() - 1);
  EXPECT_THROW(decode_binary_graph(truncated), Error);
}

TEST(GraphIo, FilesRoundTrip) {
  RmatParams p;
  p.scale = 6;
  const EdgeList g = generate_rmat(p);
  const auto dir = std::filesystem::temp_directory_path() / "trigrid_graph_test";
  std::filesystem::create_directories(dir);
  for (const char* name : {"g.txt", "g.tgr"}) {
    save_graph(dir / name, g);
    EdgeList back = load_graph(dir / name);
    back.n = g.n;  // text files carry no vertex count
    EXPECT_EQ(back, g) << name;
  }
  EXPECT_THROW(load_graph(dir / "missing.txt"), Error);
}
