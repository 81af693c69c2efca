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
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hamsync/fks_digest.hpp"
#include "hamsync/rs_codec.hpp"

namespace hamsync {

struct ProblemParams {
  uint64_t u = 1;
  unsigned u_log = 0;  // u_round = 2^u_log
  uint64_t sigma = 2;
  uint64_t n = 0;
  uint64_t k = 0;
  Variant variant = Variant::large_universe;

  friend bool operator==(const ProblemParams&, const ProblemParams&) = default;
};

/// What the sender transmits: parameters, the top-level hash verbatim, and
/// check symbols over the bucket sizes (b), bucket descriptors (B) and cell
/// records (beta).
struct Message {
  ProblemParams params;
  TopHash top;
  ChunkedRedundancy red_b;
  ChunkedRedundancy red_B;
  ChunkedRedundancy red_beta;

  friend bool operator==(const Message&, const Message&) = default;
};

/// Sender-side ground truth, for instrumentation.
struct SenderTrace {
  BuildStats stats;
  std::vector<u128> b;
  std::vector<u128> B;
  std::vector<u128> beta;
};

/// Receiver arrays before (own) and after correction, per stage.
struct ReceiverTrace {
  std::vector<u128> b_own, b;
  std::vector<u128> B_own, B;
  std::vector<u128> beta_own, beta;
};

Message sender_encode(const SparseString& s, uint64_t k, Rng& rng,
                      uint64_t alpha = default_alpha(), SenderTrace* trace = nullptr);

/// Seeded convenience form; the same (s, k, seed) always yields the same
/// message.
Message sender_encode(const SparseString& s, uint64_t k, uint64_t seed);

/// Recovers the sender's string when t is within k of it. Throws
/// ErrorCode::uncorrectable (or inconsistent_cell) when the promise is
/// broken badly enough to be noticed.
SparseString receiver_reconcile(const SparseString& t, const Message& msg,
                                ReceiverTrace* trace = nullptr);

/// Bits of the serialized frame minus framing (magic, version, block
/// headers, stream padding, checksum).
uint64_t message_bit_size(const Message& msg);

/// Bits spent on parameters and the top-level hash.
uint64_t header_bit_size(const Message& msg);

std::vector<uint8_t> serialize(const Message& msg);
Message deserialize(std::span<const uint8_t> bytes);

}  // namespace hamsync
