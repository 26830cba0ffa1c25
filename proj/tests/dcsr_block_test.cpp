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

#include <random>

#include "test_support.hpp"
#include "trigrid/dcsr_block.hpp"

using namespace trigrid;

TEST(DcsrBlock, MakeBlockListsOnlyNonEmptyMajors) {
  // U block (1, 0) on a 2x2 grid: rows odd, columns even.
  const DcsrBlock b = make_block(2, {1, 0}, Orientation::row_major, 10, {{5, 8}, {1, 4}, {5, 6}, {1, 2}});
  EXPECT_EQ(b.present_majors, (std::vector<VertexId>{0, 2}));
  EXPECT_EQ(b.offsets, (std::vector<EdgeCount>{0, 2, 4}));
  EXPECT_EQ(b.minors, (std::vector<VertexId>{2, 4, 6, 8}));
  EXPECT_EQ(b.global_major(2), 5u);
  EXPECT_NO_THROW(check_block(b, Triangle::minor_above_major));
  EXPECT_THROW(check_block(b, Triangle::minor_below_major), Error);
}

TEST(DcsrBlock, ResidueViolationDetected) {
  const DcsrBlock b = make_block(2, {1, 0}, Orientation::row_major, 10, {{1, 3}});
  EXPECT_THROW(check_block(b, Triangle::minor_above_major), Error);
}

TEST(DcsrBlock, DuplicateEntriesRejected) {
  EXPECT_THROW(make_block(1, {0, 0}, Orientation::row_major, 4, {{0, 1}, {0, 1}}), Error);
}

TEST(Blob, EmptyBlockIsHeaderOnly) {
  const DcsrBlock empty = make_block(3, {2, 1}, Orientation::column_major, 100, {});
  const Bytes blob = blob_encode(empty);
  EXPECT_EQ(blob.size(), kBlobHeaderBytes);
  EXPECT_EQ(blob_decode(blob), empty);
}

TEST(Blob, LengthFollowsHeaderPlusArrays) {
  // 3 present majors, 7 entries: header + (3 majors + 4 offsets + 7 minors) words.
  const DcsrBlock b = make_block(1, {0, 0}, Orientation::row_major, 10,
                                 {{0, 1}, {0, 2}, {0, 3}, {4, 5}, {4, 6}, {7, 8}, {7, 9}});
  ASSERT_EQ(b.present_majors.size(), 3u);
  ASSERT_EQ(b.nnz(), 7u);
  EXPECT_EQ(blob_encode(b).size(), 64u + (3u + 4u + 7u) * 8u);
  EXPECT_EQ(blob_size(b), 176u);
}

TEST(Blob, HeaderIsLittleEndian) {
  const DcsrBlock b = make_block(3, {1, 2}, Orientation::column_major, 300, {});
  const Bytes blob = blob_encode(b);
  EXPECT_EQ(std::string(blob.begin(), blob.begin() + 4), "TGBK");
  EXPECT_EQ(blob[4], kBlobVersion);
  EXPECT_EQ(blob[8], 3);    // grid side
  EXPECT_EQ(blob[16], 1);   // coord.x
  EXPECT_EQ(blob[24], 2);   // coord.y
  EXPECT_EQ(blob[32], 1);   // column-major
  EXPECT_EQ(blob[40], 300 & 0xFF);
  EXPECT_EQ(blob[41], 300 >> 8);
}

TEST(Blob, TruncatedBufferFails) {
  const DcsrBlock b = make_block(1, {0, 0}, Orientation::row_major, 4, {{0, 1}, {1, 3}});
  Bytes blob = blob_encode(b);
  for (std::size_t cut : {std::size_t{0}, std::size_t{7}, kBlobHeaderBytes, blob.size() - 1}) {
    Bytes shorter(blob.begin(), blob.begin() + static_cast<std::ptrdiff_t>(cut));
    try {
      blob_decode(shorter);
      FAIL() << "cut at " << cut;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::decode);
    }
  }
  blob.push_back(0);
  EXPECT_THROW(blob_decode(blob), Error);
}

TEST(Blob, VersionMismatchFails) {
  Bytes blob = blob_encode(make_block(1, {0, 0}, Orientation::row_major, 4, {{0, 1}}));
  blob[4] = 9;
  try {
    blob_decode(blob);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::decode);
  }
}

TEST(Blob, CorruptOffsetsFail) {
  Bytes blob = blob_encode(make_block(1, {0, 0}, Orientation::row_major, 4, {{0, 1}, {1, 3}}));
  // offsets start after the header and two present majors
  put_u64_at(blob.data() + kBlobHeaderBytes + 2 * 8 + 8, 5);
  EXPECT_THROW(blob_decode(blob), Error);
}

TEST(Blob, PropertyRandomRoundTrip) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 500; ++i) {
    const DcsrBlock b = fixtures::random_block(rng);
    const Bytes blob = blob_encode(b);
    ASSERT_EQ(blob.size(), blob_size(b));
    ASSERT_EQ(blob_decode(blob), b);
  }
}

TEST(Blob, PrefixDecodingOfConcatenatedBlobs) {
  std::mt19937_64 rng(5);
  const DcsrBlock a = fixtures::random_block(rng);
  const DcsrBlock b = fixtures::random_block(rng);
  Bytes buf;
  blob_append(buf, a);
  blob_append(buf, b);
  auto [first, used] = blob_decode_prefix(buf);
  EXPECT_EQ(first, a);
  EXPECT_EQ(blob_decode(std::span<const std::uint8_t>(buf).subspan(used)), b);
}
