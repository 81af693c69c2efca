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

#include "hamsync/error.hpp"
#include "hamsync/protocol.hpp"
#include "instances.hpp"

namespace hamsync {
namespace {

using testing_support::random_string;

ErrorCode code_of(std::span<const uint8_t> bytes) {
  try {
    deserialize(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "frame accepted";
  return ErrorCode::invalid_argument;
}

Message sample(uint64_t u, uint64_t k, uint64_t seed) {
  Rng rng(seed);
  return sender_encode(random_string(rng, u, 17, 400), k, seed);
}

TEST(Wire, RoundTrip) {
  Rng rng(1);
  for (int trial = 0; trial < 40; ++trial) {
    const uint64_t u = trial % 2 ? uint64_t{1} << 11 : uint64_t{1} << 50;
    const uint64_t n = uniform_below(rng, 300);
    const SparseString s = random_string(rng, u, uniform_between(rng, 2, 1000), n);
    const Message msg = sender_encode(s, uniform_below(rng, 20), rng());
    const auto bytes = serialize(msg);
    const Message back = deserialize(bytes);
    EXPECT_EQ(back, msg);
    EXPECT_EQ(serialize(back), bytes);
  }
}

TEST(Wire, ZeroBudgetFrame) {
  const Message msg = sample(1 << 20, 0, 2);
  const auto bytes = serialize(msg);
  EXPECT_EQ(bytes.size(), 8 + 33 + 65 + 3 * 9 + 4u);
  EXPECT_EQ(bytes[6] & 2, 2);
  EXPECT_EQ(deserialize(bytes), msg);
}

TEST(Wire, Magic) {
  auto bytes = serialize(sample(1 << 20, 3, 3));
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "HSYN");
  bytes[0] = 'X';
  EXPECT_EQ(code_of(bytes), ErrorCode::bad_magic);
}

TEST(Wire, Version) {
  auto bytes = serialize(sample(1 << 20, 3, 4));
  bytes[4] = 2;
  EXPECT_EQ(code_of(bytes), ErrorCode::unsupported_version);
}

TEST(Wire, EveryTruncationIsRejected) {
  const auto bytes = serialize(sample(1 << 12, 2, 5));
  for (size_t len = 0; len < bytes.size(); ++len) {
    const ErrorCode c = code_of(std::span(bytes).first(len));
    if (len >= 4) {
      EXPECT_EQ(c, ErrorCode::truncated) << len;
    }
  }
}

TEST(Wire, TrailingBytes) {
  auto bytes = serialize(sample(1 << 20, 3, 6));
  bytes.push_back(0);
  EXPECT_EQ(code_of(bytes), ErrorCode::malformed);
}

TEST(Wire, ChecksumCoversThePayload) {
  const auto bytes = serialize(sample(uint64_t{1} << 40, 5, 7));
  auto last = bytes;
  last[last.size() - 10] ^= 0x10;
  EXPECT_EQ(code_of(last), ErrorCode::checksum_mismatch);
  auto crc = bytes;
  crc.back() ^= 1;
  EXPECT_EQ(code_of(crc), ErrorCode::checksum_mismatch);
}

TEST(Wire, AnySingleByteCorruptionIsDetected) {
  for (uint64_t u : {uint64_t{1} << 10, uint64_t{1} << 40}) {
    const auto bytes = serialize(sample(u, 3, 8));
    for (size_t i = 0; i < bytes.size(); ++i) {
      auto bad = bytes;
      bad[i] ^= 0xa5;
      EXPECT_THROW(deserialize(bad), Error) << i;
    }
  }
}

}  // namespace
}  // namespace hamsync
