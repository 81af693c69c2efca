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
#include <set>

#include "hamsync/error.hpp"
#include "hamsync/hashing.hpp"
#include "oracles.hpp"

namespace hamsync {
namespace {

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::invalid_argument;
}

std::vector<uint64_t> random_set(Rng& rng, size_t n, unsigned bits) {
  std::set<uint64_t> keys;
  while (keys.size() < n) keys.insert(static_cast<uint64_t>(uniform_bits(rng, bits)));
  return {keys.begin(), keys.end()};
}

template <typename F>
bool injective_on(const std::vector<uint64_t>& keys, F&& f) {
  std::set<uint64_t> seen;
  for (uint64_t x : keys) seen.insert(f(x));
  return seen.size() == keys.size();
}

TEST(Msb, Examples) {
  EXPECT_EQ(msb(0b1010), 0b1000u);
  EXPECT_EQ(msb(0b0001), 0b0001u);
  EXPECT_EQ(msb(0b0110), 0b0100u);
  EXPECT_EQ(code_of([] { msb(0); }), ErrorCode::undefined_on_zero);
}

TEST(Pack, Examples) {
  EXPECT_EQ(pack(0b1011, 0b1111), 0b1011u);
  EXPECT_EQ(pack(0b1011, 0b0000), 0u);
  EXPECT_EQ(pack(0b1011, 0b1010), 0b11u);
}

TEST(PackTables, SmallChunkEntries) {
  const PackTables t(2);
  EXPECT_EQ(t.pack_entry(0b11, 0b01).bits, 0b1);
  EXPECT_EQ(t.pack_entry(0b11, 0b01).count, 1);
  EXPECT_EQ(t.msb_entry(0b10), 0b10u);
  EXPECT_EQ(code_of([] { PackTables(PackTables::kMaxChunkBits + 1); }),
            ErrorCode::chunk_too_wide);
}

TEST(PackTables, MatchBitLoopOracle) {
  for (unsigned c = 1; c <= 6; ++c) {
    const PackTables t(c);
    for (uint64_t x = 0; x < 256; ++x) {
      for (uint64_t m = 0; m < 256; ++m) ASSERT_EQ(t.pack(x, m), oracle::pack(x, m));
      if (x) {
        ASSERT_EQ(t.msb(x), oracle::msb(x));
      }
    }
  }
  Rng rng(11);
  for (unsigned c = 1; c <= PackTables::kMaxChunkBits; ++c) {
    const PackTables t(c);
    for (int i = 0; i < 2000; ++i) {
      const uint64_t x = rng(), m = rng() & rng();
      ASSERT_EQ(t.pack(x, m), oracle::pack(x, m));
      ASSERT_EQ(t.msb(x | 1), oracle::msb(x | 1));
      ASSERT_EQ(t.msb(x >> (i % 64) | 1), oracle::msb(x >> (i % 64) | 1));
    }
  }
}

TEST(BuildG1, Examples) {
  Rng rng(1);
  const std::vector<uint64_t> single{5};
  unsigned rounds = 0;
  build_g1(single, 32, 4, rng, &rounds);
  EXPECT_EQ(rounds, 1u);

  std::vector<uint64_t> keys(16);
  for (uint64_t i = 0; i < 16; ++i) keys[i] = i;
  const TwoWiseParams g = build_g1(keys, 32, 10, rng);
  EXPECT_TRUE(injective_on(keys, g));
  for (uint64_t x : keys) EXPECT_LT(g(x), 1024u);
  EXPECT_EQ(g.a & 1, 1u);

  const std::vector<uint64_t> dup{3, 9, 3};
  EXPECT_EQ(code_of([&] { build_g1(dup, 32, 10, rng); }), ErrorCode::invalid_argument);
}

TEST(BuildG1, InjectiveOnRandomSets) {
  Rng rng(2);
  for (size_t n : {1, 2, 17, 256, 4096}) {
    const unsigned s = 2 + 2 * static_cast<unsigned>(std::bit_width(std::bit_ceil(n)) - 1);
    for (unsigned r : {16u, 48u, 64u}) {
      const auto keys = random_set(rng, std::min<size_t>(n, size_t{1} << (r - 2)), r);
      const TwoWiseParams g = build_g1(keys, r, s, rng);
      EXPECT_TRUE(injective_on(keys, g));
    }
  }
}

TEST(BuildG2, ConditionExample) {
  const std::vector<uint64_t> keys{1, 2};
  EXPECT_TRUE(satisfies_three_wise_conditions({5, 1, 0, 0}, keys, 2, 32));
  const std::vector<uint64_t> buckets{1, 0};
  EXPECT_EQ(cube_sum(buckets, 2, 64), 2u);
}

TEST(BuildG2, DegenerateInputs) {
  Rng rng(3);
  const std::vector<uint64_t> one{4};
  unsigned rounds = 0;
  build_g2(one, 5, 1, 32, rng, &rounds);
  EXPECT_EQ(rounds, 1u);
  const ThreeWiseParams empty = build_g2({}, 5, 0, 32, rng);
  EXPECT_EQ(empty.p, 5u);
}

TEST(BuildG2, AcceptedBuildsSatisfyBothConditions) {
  Rng rng(4);
  for (uint64_t n : {2, 17, 256, 1024}) {
    const unsigned s = 2 + 2 * static_cast<unsigned>(std::countr_zero(std::bit_ceil(n)));
    const uint64_t p = find_prime_in(uint64_t{1} << s, (uint64_t{2} << s) - 1, rng);
    const auto keys = random_set(rng, n, s - 1);
    const ThreeWiseParams f = build_g2(keys, p, n, 32, rng);
    std::set<uint64_t> low;
    std::vector<uint64_t> sizes(n, 0);
    for (uint64_t x : keys) {
      low.insert(f(x) % (n * n));
      ++sizes[f(x) % n];
    }
    EXPECT_EQ(low.size(), keys.size());
    uint64_t cubes = 0;
    for (uint64_t b : sizes) cubes += b * b * b;
    EXPECT_LE(cubes, 32 * n);
  }
}

TEST(DetMultShift, Examples) {
  const std::vector<uint64_t> two{0, 1};
  const DetMultShiftParams f = build_det_multshift(two, 4, 2);
  EXPECT_NE(f(0), f(1));
  const std::vector<uint64_t> single{9};
  const DetMultShiftParams g = build_det_multshift(single, 4, 2);
  EXPECT_EQ(g.a, 1u);
  EXPECT_EQ(g.b, 0u);
  EXPECT_EQ(build_det_multshift(two, 4, 2), f);
  const std::vector<uint64_t> three{1, 2, 3};
  EXPECT_EQ(code_of([&] { build_det_multshift(three, 8, 2); }), ErrorCode::invalid_argument);
}

TEST(DetMultShift, InjectiveAndDeterministicOnFuzzedSets) {
  Rng rng(5);
  for (int trial = 0; trial < 2000; ++trial) {
    const unsigned s = 2 + 2 * static_cast<unsigned>(uniform_below(rng, 6));
    const unsigned r = s + static_cast<unsigned>(uniform_below(rng, 64 - s + 1));
    const size_t n = 1 + uniform_below(rng, uint64_t{1} << (s / 2 - 1));
    auto keys = random_set(rng, std::min<size_t>(n, size_t{1} << std::min(r, 20u)), r);
    const DetMultShiftParams f = build_det_multshift(keys, r, s);
    ASSERT_TRUE(injective_on(keys, f)) << "r=" << r << " s=" << s;
    for (uint64_t x : keys) ASSERT_LT(f(x), uint64_t{1} << s);
    std::shuffle(keys.begin(), keys.end(), rng);
    ASSERT_EQ(build_det_multshift(keys, r, s), f);
  }
}

TEST(BitSelect, Examples) {
  const std::vector<uint64_t> keys{0b000, 0b011, 0b101};
  const BitSelectParams sel = build_bitselect(keys);
  EXPECT_EQ(sel.mask, 0b110u);
  EXPECT_EQ(sel(0b000), 0b00u);
  EXPECT_EQ(sel(0b011), 0b01u);
  EXPECT_EQ(sel(0b101), 0b10u);
  const std::vector<uint64_t> single{42};
  EXPECT_EQ(build_bitselect(single).mask, 0u);
  const std::vector<uint64_t> pair{0, 1};
  EXPECT_EQ(build_bitselect(pair).mask, 1u);
}

TEST(BitSelect, InjectiveWithAtMostNMinusOneBits) {
  Rng rng(6);
  for (int trial = 0; trial < 2000; ++trial) {
    const size_t n = 1 + uniform_below(rng, 40);
    const auto keys = random_set(rng, n, static_cast<unsigned>(uniform_between(rng, 8, 64)));
    const BitSelectParams sel = build_bitselect(keys);
    ASSERT_TRUE(injective_on(keys, sel));
    ASSERT_LE(sel.selected(), keys.size() - 1);
  }
}

TEST(BucketHash, Examples) {
  EXPECT_TRUE(build_bucket_hash({}, 20, 16).is_null());
  const std::vector<uint64_t> one{77};
  const BucketHash h1 = build_bucket_hash(one, 20, 16);
  EXPECT_EQ(h1.cell_count(), 4u);
  EXPECT_LT(h1(77), 4u);
  EXPECT_EQ(h1(77), h1(77));

  const std::vector<uint64_t> five{3, 100, 7000, 65000, 123456};
  const BucketHash h5 = build_bucket_hash(five, 20, 16);
  EXPECT_EQ(h5.kind, BucketHash::Kind::large);
  EXPECT_EQ(h5.cell_count(), 256u);
  EXPECT_TRUE(injective_on(five, h5));
  for (uint64_t x : five) EXPECT_LT(h5(x), 256u);

  const std::vector<uint64_t> four{3, 100, 7000, 65000};
  EXPECT_EQ(build_bucket_hash(four, 20, 16).kind, BucketHash::Kind::small);

  const BucketHash null;
  EXPECT_EQ(code_of([&] { null(1); }), ErrorCode::null_bucket);
  EXPECT_EQ(code_of([&] { BucketHash::filler()(1); }), ErrorCode::null_bucket);
}

TEST(BucketHash, InjectiveOrderFreeAndCodecRoundTrip) {
  Rng rng(7);
  for (int trial = 0; trial < 3000; ++trial) {
    const uint64_t n = uint64_t{1} << uniform_between(rng, 1, 16);
    const unsigned image_bits = 2 * static_cast<unsigned>(std::countr_zero(n));
    const size_t b = 1 + uniform_below(rng, std::min<uint64_t>(n, 24));
    auto images = random_set(rng, std::min<size_t>(b, size_t{1} << image_bits), image_bits);
    const BucketHash h = build_bucket_hash(images, image_bits, n);
    ASSERT_TRUE(injective_on(images, h));
    for (uint64_t x : images) ASSERT_LT(h(x), h.cell_count());
    std::shuffle(images.begin(), images.end(), rng);
    ASSERT_EQ(build_bucket_hash(images, image_bits, n), h);

    const std::vector<uint64_t> sizes{0, images.size()};
    const BucketHashCodec codec = BucketHashCodec::for_sizes(sizes, image_bits, n);
    const u128 rec = codec.encode(h);
    ASSERT_EQ(codec.decode(rec, images.size()), h);
    ASSERT_EQ(codec.encode(BucketHash{}), mask128(codec.width()));
    ASSERT_TRUE(codec.decode(mask128(codec.width()), 0).is_null());
    ASSERT_EQ(codec.encode(BucketHash::filler()), 0u);
  }
}

}  // namespace
}  // namespace hamsync
