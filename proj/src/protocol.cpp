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
#include "hamsync/protocol.hpp"

#include <algorithm>

#include "hamsync/error.hpp"

namespace hamsync {

namespace {

unsigned width_of_sizes(std::span<const uint64_t> b) {
  const uint64_t most = b.empty() ? 0 : *std::max_element(b.begin(), b.end());
  return std::max(1u, static_cast<unsigned>(std::bit_width(most)));
}

std::vector<u128> widen(std::span<const uint64_t> values) {
  return std::vector<u128>(values.begin(), values.end());
}

std::vector<u128> encode_descriptors(std::span<const BucketHash> B, const BucketHashCodec& codec) {
  std::vector<u128> out(B.size());
  for (size_t i = 0; i < B.size(); ++i) out[i] = codec.encode(B[i]);
  return out;
}

std::vector<u128> encode_cells(const CellTable& table, const CellCodec& codec) {
  std::vector<u128> out(table.cells.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = codec.encode(table.cells[i]);
  return out;
}

// Codec failures past the first stage mean the received check symbols do
// not belong to any string within the promised distance.
template <typename F>
auto as_uncorrectable(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::uncorrectable) throw;
    fail(ErrorCode::uncorrectable, std::string("uncorrectable: ") + e.what());
  }
}

}  // namespace

Message sender_encode(const SparseString& s, uint64_t k, Rng& rng, uint64_t alpha,
                      SenderTrace* trace) {
  s.validate();
  Message msg;
  msg.params.u = s.u;
  msg.params.u_log = universe_log(s.u);
  msg.params.sigma = s.sigma;
  msg.params.n = s.n();
  msg.params.k = k;

  BuildStats stats;
  const FksDigest digest = build_fks(s, rng, alpha, &stats);
  msg.top = digest.top;
  msg.params.variant = digest.top.variant;

  const std::vector<uint64_t>& b = digest.arrays.b;
  const std::vector<u128> b_sym = widen(b);
  const BucketHashCodec bcodec = BucketHashCodec::for_sizes(b, digest.top.image_bits(), s.n());
  const std::vector<u128> B_sym = encode_descriptors(digest.arrays.B, bcodec);
  const CellCodec ccodec = CellCodec::for_digest(digest.top, s.sigma);
  const std::vector<u128> beta_sym = encode_cells(digest.table, ccodec);

  msg.red_b = chunked_encode(b_sym, width_of_sizes(b), k);
  msg.red_B = chunked_encode(B_sym, bcodec.width(), k);
  msg.red_beta = chunked_encode(beta_sym, ccodec.width(), k);

  if (trace) {
    trace->stats = stats;
    trace->b = b_sym;
    trace->B = B_sym;
    trace->beta = beta_sym;
  }
  return msg;
}

Message sender_encode(const SparseString& s, uint64_t k, uint64_t seed) {
  Rng rng(seed);
  return sender_encode(s, k, rng);
}

SparseString receiver_reconcile(const SparseString& t, const Message& msg, ReceiverTrace* trace) {
  t.validate();
  require(t.u == msg.params.u && t.sigma == msg.params.sigma, ErrorCode::invalid_argument,
          "receiver string over a different universe or alphabet");
  const TopHash& top = msg.top;
  const uint64_t n = msg.params.n;
  SparseString out;
  out.u = t.u;
  out.sigma = t.sigma;
  if (n == 0) return out;

  // Stage 1: bucket sizes.
  const std::vector<uint64_t> b_own = receiver_rebuild_b(t, top);
  std::vector<u128> b_sym = widen(b_own);
  const u128 b_mask = mask128(msg.red_b.symbol_bits);
  for (u128& v : b_sym) v &= b_mask;
  const std::vector<u128> b_fixed = chunked_correct(b_sym, msg.red_b);
  std::vector<uint64_t> b(b_fixed.begin(), b_fixed.end());
  uint64_t total = 0;
  for (uint64_t v : b) total += v;
  require(total == n, ErrorCode::uncorrectable, "uncorrectable: bucket sizes do not sum to n");

  // Stage 2: bucket descriptors, rebuilt only where the sizes agree.
  const std::vector<BucketHash> B_own = receiver_rebuild_B(t, top, b, b_own);
  const std::vector<BucketHash> B = as_uncorrectable([&] {
    require(msg.red_B.symbol_bits >= 3, ErrorCode::malformed, "descriptor width too small");
    const BucketHashCodec codec(top.image_bits(), msg.red_B.symbol_bits - 2);
    std::vector<u128> own(B_own.size());
    for (size_t i = 0; i < own.size(); ++i) {
      try {
        own[i] = codec.encode(B_own[i]);
      } catch (const Error&) {
        own[i] = codec.encode(BucketHash::filler());
      }
    }
    const std::vector<u128> fixed = chunked_correct(own, msg.red_B);
    std::vector<BucketHash> decoded(fixed.size());
    for (size_t i = 0; i < fixed.size(); ++i) decoded[i] = codec.decode(fixed[i], b[i]);
    if (trace) {
      trace->B_own = own;
      trace->B = fixed;
    }
    return decoded;
  });

  // Stage 3: cells, placed with the corrected geometry.
  const CellTable own_table = receiver_rebuild_beta(t, top, b, B);
  const CellCodec ccodec = CellCodec::for_digest(top, msg.params.sigma);
  const CellTable table = as_uncorrectable([&] {
    require(msg.red_beta.symbol_bits == ccodec.width(), ErrorCode::malformed,
            "cell width mismatch");
    const std::vector<u128> own = encode_cells(own_table, ccodec);
    const std::vector<u128> fixed = chunked_correct(own, msg.red_beta);
    CellTable corrected;
    corrected.offsets = own_table.offsets;
    corrected.cells.resize(fixed.size());
    for (size_t i = 0; i < fixed.size(); ++i) corrected.cells[i] = ccodec.decode(fixed[i]);
    if (trace) {
      trace->beta_own = own;
      trace->beta = fixed;
    }
    return corrected;
  });

  if (trace) {
    trace->b_own = widen(b_own);
    trace->b = b_fixed;
  }
  out = extract_string(table, top, t.u, t.sigma);
  return out;
}

}  // namespace hamsync
