/*
 * Copyright 2026 The hamsync Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <map>

#include "hamsync/error.hpp"
#include "hamsync/fks_digest.hpp"
#include "instances.hpp"

namespace hamsync {
namespace {

using testing_support::perturb;
using testing_support::random_string;

uint64_t differing(std::span<const uint64_t> a, std::span<const uint64_t> b) {
  uint64_t d = 0;
  for (size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

void check_structure(const SparseString& s, const FksDigest& dg, uint64_t alpha) {
  const TopHash& top = dg.top;
  const uint64_t n = s.n();
  ASSERT_EQ(dg.arrays.b.size(), n);
  uint64_t total = 0, cubes = 0, cells = 0;
  for (uint64_t i = 0; i < n; ++i) {
    const uint64_t b = dg.arrays.b[i];
    total += b;
    cubes += b * b * b;
    ASSERT_EQ(b == 0, dg.arrays.B[i].is_null());
    ASSERT_EQ(dg.table.offsets[i], cells);
    const uint64_t rounded = b == 0 ? 0 : std::bit_ceil(b);
    cells += 4 * rounded * rounded;
  }
  ASSERT_EQ(total, n);
  ASSERT_LE(cubes, alpha * n);
  ASSERT_EQ(dg.table.cells.size(), cells);
  ASSERT_LE(cells, 16 * alpha * std::max<uint64_t>(n, 1));

  std::map<uint64_t, uint64_t> value_of;
  for (const auto& kv : s.pairs) value_of[kv.pos] = kv.value;
  uint64_t present = 0;
  for (uint64_t i = 0; i < n; ++i) {
    for (uint64_t c = dg.table.offsets[i]; c < dg.table.offsets[i + 1]; ++c) {
      const Cell& cell = dg.table.cells[c];
      if (!cell.present) continue;
      ++present;
      const uint64_t x = top.variant == Variant::large_universe
                             ? cell.key
                             : *top.recover_position(i, cell.key);
      ASSERT_EQ(value_of.at(x), cell.value);
      const auto p = top.place(x);
      ASSERT_EQ(p.bucket, i);
      ASSERT_EQ(dg.table.offsets[i] + dg.arrays.B[i](p.image), c);
    }
  }
  ASSERT_EQ(present, n);
}

TEST(Variant, Threshold) {
  EXPECT_EQ(choose_variant(32, 1024), Variant::large_universe);
  EXPECT_EQ(choose_variant(20, 1 << 14), Variant::small_universe);
  EXPECT_EQ(choose_variant(16, 1 << 16), Variant::small_universe);
  EXPECT_EQ(choose_variant(30, 1 << 20), Variant::small_universe);
  EXPECT_EQ(choose_variant(31, 1 << 20), Variant::large_universe);
  EXPECT_EQ(choose_variant(0, 0), Variant::large_universe);
  EXPECT_EQ(universe_log(1), 0u);
  EXPECT_EQ(universe_log(1000), 10u);
  EXPECT_EQ(universe_log(1024), 10u);
  EXPECT_EQ(universe_log(~uint64_t{0}), 64u);
}

TEST(TopHash, SingleKey) {
  Rng rng(1);
  const std::vector<uint64_t> keys{12345};
  const TopHash top = build_top_hash(keys, 32, rng);
  EXPECT_EQ(top.n, 1u);
  EXPECT_EQ(top.place(12345).bucket, 0u);
}

TEST(AssignBuckets, PartitionAndDeterminism) {
  Rng rng(2);
  const SparseString s = random_string(rng, uint64_t{1} << 40, 16, 500);
  const auto keys = s.positions();
  const TopHash top = build_top_hash(keys, 40, rng);
  const Assignment a = assign_buckets(keys, top);
  uint64_t total = 0;
  for (uint64_t i = 0; i < top.n; ++i) {
    total += a.sizes[i];
    const auto images = a.bucket_images(i);
    EXPECT_TRUE(std::is_sorted(images.begin(), images.end()));
  }
  EXPECT_EQ(total, keys.size());
  const Assignment again = assign_buckets(keys, top);
  EXPECT_EQ(again.images, a.images);
  EXPECT_EQ(again.keys, a.keys);
  const Assignment empty = assign_buckets({}, top);
  EXPECT_EQ(empty.sizes, std::vector<uint64_t>(top.n, 0));
}

TEST(BuildFks, SingleKey) {
  Rng rng(3);
  SparseString s;
  s.u = 1 << 16;
  s.sigma = 256;
  s.pairs = {{4242, 7}};
  const FksDigest dg = build_fks(s, rng);
  EXPECT_EQ(dg.arrays.b, std::vector<uint64_t>{1});
  EXPECT_EQ(dg.table.cells.size(), 4u);
  check_structure(s, dg, 32);
}

struct Shape {
  uint64_t u, sigma, n;
};

class FksShapes : public ::testing::TestWithParam<Shape> {};

TEST_P(FksShapes, StructureAndRoundTrip) {
  const Shape shape = GetParam();
  Rng rng(shape.u ^ shape.n);
  for (int trial = 0; trial < 3; ++trial) {
    const SparseString s = random_string(rng, shape.u, shape.sigma, shape.n);
    const FksDigest dg = build_fks(s, rng);
    EXPECT_EQ(dg.top.variant, choose_variant(universe_log(shape.u), shape.n));
    check_structure(s, dg, 32);
    const SparseString back = extract_string(dg.table, dg.top, s.u, s.sigma);
    EXPECT_TRUE(back.same_as(s));
  }
}

INSTANTIATE_TEST_SUITE_P(
    Grid, FksShapes,
    ::testing::Values(Shape{1 << 16, 2, 4096}, Shape{uint64_t{1} << 48, 1 << 16, 4096},
                      Shape{1000, 3, 1000}, Shape{1 << 16, 256, 1 << 16},
                      Shape{1 << 20, 2, 1 << 14}, Shape{~uint64_t{0}, 2, 300},
                      Shape{1, 2, 1}, Shape{5, 2, 2}));

TEST(BuildFks, QuotientedKeysRecoverThroughTheSolver) {
  Rng rng(4);
  const SparseString s = random_string(rng, 1 << 12, 5, 1 << 10);
  const FksDigest dg = build_fks(s, rng);
  ASSERT_EQ(dg.top.variant, Variant::small_universe);
  for (const auto& kv : s.pairs) {
    const auto p = dg.top.place(kv.pos);
    EXPECT_EQ(dg.top.recover_position(p.bucket, p.image), kv.pos);
  }
}

TEST(Receiver, IdenticalStringRebuildsTheSenderArrays) {
  Rng rng(5);
  for (uint64_t u : {uint64_t{1} << 16, uint64_t{1} << 40}) {
    const SparseString s = random_string(rng, u, 100, 2000);
    const FksDigest dg = build_fks(s, rng);
    const auto b = receiver_rebuild_b(s, dg.top);
    EXPECT_EQ(b, dg.arrays.b);
    const auto B = receiver_rebuild_B(s, dg.top, b, b);
    EXPECT_EQ(B, dg.arrays.B);
    const CellTable beta = receiver_rebuild_beta(s, dg.top, b, B);
    EXPECT_EQ(beta.cells, dg.table.cells);
    EXPECT_EQ(beta.offsets, dg.table.offsets);

    SparseString empty = s;
    empty.pairs.clear();
    EXPECT_EQ(receiver_rebuild_b(empty, dg.top), std::vector<uint64_t>(s.n(), 0));
    const CellTable none = receiver_rebuild_beta(empty, dg.top, b, B);
    EXPECT_EQ(none.cells.size(), dg.table.cells.size());
    EXPECT_TRUE(std::none_of(none.cells.begin(), none.cells.end(),
                             [](const Cell& c) { return c.present; }));
  }
}

TEST(Receiver, StagedMismatchesStayWithinDistance) {
  Rng rng(6);
  for (int trial = 0; trial < 60; ++trial) {
    const uint64_t u = trial % 2 ? uint64_t{1} << 32 : uint64_t{1} << 12;
    const uint64_t n = trial % 2 ? 1000 : 3000;
    const SparseString s = random_string(rng, u, 7, n);
    const FksDigest dg = build_fks(s, rng);
    const uint64_t d = uniform_between(rng, 1, 40);
    const SparseString t = perturb(s, d, rng);
    ASSERT_EQ(hamming_distance(s, t), d);

    const auto b_own = receiver_rebuild_b(t, dg.top);
    EXPECT_LE(differing(b_own, dg.arrays.b), d);
    const auto B_own = receiver_rebuild_B(t, dg.top, dg.arrays.b, b_own);
    uint64_t B_diff = 0;
    for (size_t i = 0; i < B_own.size(); ++i) B_diff += !(B_own[i] == dg.arrays.B[i]);
    EXPECT_LE(B_diff, d);
    const CellTable beta = receiver_rebuild_beta(t, dg.top, dg.arrays.b, dg.arrays.B);
    uint64_t beta_diff = 0;
    for (size_t i = 0; i < beta.cells.size(); ++i) beta_diff += !(beta.cells[i] == dg.table.cells[i]);
    EXPECT_LE(beta_diff, d);
    // Receiver purity.
    EXPECT_EQ(receiver_rebuild_B(t, dg.top, dg.arrays.b, b_own), B_own);
  }
}

TEST(Extract, RejectsCellsNoSenderCouldWrite) {
  Rng rng(7);
  const SparseString s = random_string(rng, 1 << 20, 9, 50);
  FksDigest dg = build_fks(s, rng);
  auto it = std::find_if(dg.table.cells.begin(), dg.table.cells.end(),
                         [](const Cell& c) { return c.present; });
  it->key ^= 1;
  try {
    extract_string(dg.table, dg.top, s.u, s.sigma);
    ADD_FAILURE() << "accepted a forged cell";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::inconsistent_cell);
  }
  SparseString empty;
  empty.u = 10;
  Rng r2(1);
  const FksDigest none = build_fks(empty, r2);
  EXPECT_TRUE(extract_string(none.table, none.top, 10, 2).pairs.empty());
}

TEST(CellCodec, RoundTrip) {
  const CellCodec codec(20, 7);
  EXPECT_EQ(codec.width(), 28u);
  EXPECT_EQ(codec.encode(Cell{}), 0u);
  const Cell c{true, 0xabcde, 99};
  EXPECT_EQ(codec.decode(codec.encode(c)), c);
  EXPECT_FALSE(codec.decode(0).present);
}

}  // namespace
}  // namespace hamsync
