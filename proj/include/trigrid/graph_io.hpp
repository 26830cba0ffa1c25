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

#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "trigrid/bytes.hpp"
#include "trigrid/graph.hpp"

namespace trigrid {

// Text format: one "u v" pair per line, '#' lines are comments. The vertex
// count is one past the largest id seen.
//
// Binary format: "TGR1", n (u64), m (u64), then m (u, v) pairs of u64, all
// little-endian.

inline constexpr char kBinaryMagic[4] = {'T', 'G', 'R', '1'};

namespace detail {

inline bool parse_id(std::string_view& rest, VertexId& out) {
  std::size_t i = 0;
  while (i < rest.size() && (rest[i] == ' ' || rest[i] == '\t' || rest[i] == '\r')) ++i;
  rest.remove_prefix(i);
  if (rest.empty()) return false;
  auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), out);
  if (ec != std::errc{}) return false;
  rest.remove_prefix(static_cast<std::size_t>(ptr - rest.data()));
  return true;
}

inline bool blank(std::string_view s) {
  return s.find_first_not_of(" \t\r") == std::string_view::npos;
}

}  // namespace detail

inline EdgeList read_text_edges(std::istream& in) {
  EdgeList g;
  std::string line;
  std::size_t line_no = 0;
  VertexId max_id = 0;
  bool any = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view rest(line);
    const auto first = rest.find_first_not_of(" \t\r");
    if (first == std::string_view::npos || rest[first] == '#') continue;
    Edge e;
    if (!detail::parse_id(rest, e.u) || !detail::parse_id(rest, e.v) || !detail::blank(rest)) {
      fail(ErrorKind::malformed_input, "line " + std::to_string(line_no) + ": expected \"u v\"");
    }
    if (e.u >= kVertexIdLimit || e.v >= kVertexIdLimit) {
      fail(ErrorKind::malformed_input, "line " + std::to_string(line_no) + ": vertex id >= 2^48");
    }
    max_id = std::max({max_id, e.u, e.v});
    any = true;
    g.edges.push_back(e);
  }
  g.n = any ? max_id + 1 : 0;
  return g;
}

inline void write_text_edges(std::ostream& out, const EdgeList& g) {
  out << "# n=" << g.n << " m=" << g.edges.size() << '\n';
  for (const Edge& e : g.edges) out << e.u << ' ' << e.v << '\n';
}

inline Bytes encode_binary_graph(const EdgeList& g) {
  Bytes out(kBinaryMagic, kBinaryMagic + 4);
  out.reserve(4 + 16 + 16 * g.edges.size());
  put_u64(out, g.n);
  put_u64(out, g.edges.size());
  for (const Edge& e : g.edges) {
    put_u64(out, e.u);
    put_u64(out, e.v);
  }
  return out;
}

inline EdgeList decode_binary_graph(std::span<const std::uint8_t> data) {
  if (data.size() < 4 || !std::equal(kBinaryMagic, kBinaryMagic + 4, data.begin())) {
    fail(ErrorKind::malformed_input, "missing TGR1 magic");
  }
  try {
    ByteReader r(data.subspan(4));
    EdgeList g;
    g.n = r.u64();
    const std::uint64_t m = r.u64();
    if (m > r.remaining() / 16 || r.remaining() != m * 16) {
      fail(ErrorKind::malformed_input, "binary graph length does not match its edge count");
    }
    g.edges.resize(m);
    for (Edge& e : g.edges) {
      e.u = r.u64();
      e.v = r.u64();
    }
    check_vertex_count(g.n);
    return g;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::decode) fail(ErrorKind::malformed_input, "truncated binary graph");
    throw;
  }
}

inline bool is_binary_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  return ext == ".tgr" || ext == ".bin";
}

/// Reads a graph file; binary files are recognized by their magic.
inline EdgeList load_graph(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open " + path.string());
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorKind::io, "read failure on " + path.string());
  if (data.size() >= 4 && std::equal(kBinaryMagic, kBinaryMagic + 4, data.begin())) {
    return decode_binary_graph(data);
  }
  std::istringstream text(std::string(data.begin(), data.end()));
  return read_text_edges(text);
}

inline void save_graph(const std::filesystem::path& path, const EdgeList& g) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot create " + path.string());
  if (is_binary_path(path)) {
    const Bytes data = encode_binary_graph(g);
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  } else {
    write_text_edges(out, g);
  }
  if (!out) fail(ErrorKind::io, "write failure on " + path.string());
}

}  // namespace trigrid
