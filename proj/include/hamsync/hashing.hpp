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

#include "hamsync/field_arith.hpp"
#include "hamsync/word.hpp"

namespace hamsync {

// ---------------------------------------------------------------------------
// Word primitives

/// Isolates the most significant set bit. Throws on zero.
uint64_t msb(uint64_t x);

/// Bits of x at the set positions of mask, highest position first, packed
/// into the low popcount(mask) bits of the result.
uint64_t pack(uint64_t x, uint64_t mask);

/// Four-russians tables simulating msb and pack chunk by chunk.
class PackTables {
 public:
  static constexpr unsigned kMaxChunkBits = 12;

  struct Entry {
    uint16_t bits = 0;
    uint8_t count = 0;
  };

  explicit PackTables(unsigned chunk_bits);

  /// Shared instance with 8-bit chunks (eight chunk pairs per word).
  static const PackTables& standard();

  unsigned chunk_bits() const { return chunk_bits_; }
  Entry pack_entry(uint64_t x_chunk, uint64_t mask_chunk) const {
    return pack_[(mask_chunk << chunk_bits_) | x_chunk];
  }
  uint64_t msb_entry(uint64_t chunk) const { return msb_[chunk]; }

  uint64_t pack(uint64_t x, uint64_t mask) const;
  uint64_t msb(uint64_t x) const;

 private:
  unsigned chunk_bits_;
  std::vector<Entry> pack_;
  std::vector<uint16_t> msb_;
};

// ---------------------------------------------------------------------------
// Randomized families

/// Multiply-add-shift from [2^r] into [2^s]:
///   x -> ((a x + b) mod 2^w) div 2^(w - s),  w = max(2r, r + s), a odd.
struct TwoWiseParams {
  unsigned r = 0;
  unsigned s = 0;
  u128 a = 1;
  u128 b = 0;

  unsigned width() const { return r + s > 2 * r ? r + s : 2 * r; }
  uint64_t operator()(uint64_t x) const;

  friend bool operator==(const TwoWiseParams&, const TwoWiseParams&) = default;
};

/// Builds a multiply-add-shift injective on `keys` into [2^out_bits].
/// Resamples until injective; `rounds` receives the number of draws.
TwoWiseParams build_g1(std::span<const uint64_t> keys, unsigned universe_bits,
                       unsigned out_bits, Rng& rng, unsigned* rounds = nullptr);

/// f(y) = (a y^2 + b y + c) mod P.
struct ThreeWiseParams {
  uint64_t p = 2;
  uint64_t a = 0;
  uint64_t b = 0;
  uint64_t c = 0;

  uint64_t operator()(uint64_t y) const;

  friend bool operator==(const ThreeWiseParams&, const ThreeWiseParams&) = default;
};

/// sum of |S_i|^3 over the buckets S_i = {x : value(x) mod n = i}, computed
/// from bucket values directly. Saturates at `cap + 1`.
uint64_t cube_sum(std::span<const uint64_t> bucket_of_key, uint64_t n, uint64_t cap);

/// Both conditions on a quadratic hash over F_P: values mod n^2 distinct and
/// the cube sum of the mod-n buckets at most alpha * n.
bool satisfies_three_wise_conditions(const ThreeWiseParams& f, std::span<const uint64_t> keys,
                                     uint64_t n, uint64_t alpha);

ThreeWiseParams build_g2(std::span<const uint64_t> keys, uint64_t p, uint64_t n,
                         uint64_t alpha, Rng& rng, unsigned* rounds = nullptr);

/// f(X) = a X^2 + b X + c over F_{q^2}, reported through the integer encoding.
struct QuadThreeWiseParams {
  Fq2 a{0, 1};
  Fq2 b;
  Fq2 c;

  uint64_t operator()(const QuadExtField& field, uint64_t x) const {
    const Fq2 e = field.from_int(x);
    return field.to_int(field.add(field.mul(field.add(field.mul(a, e), b), e), c));
  }

  friend bool operator==(const QuadThreeWiseParams&, const QuadThreeWiseParams&) = default;
};

/// Draws a != 0, b, c over F_{q^2} until the mod-n cube sum is at most
/// alpha * n. Injectivity is not required of this family: a key is pinned
/// down by its value together with the root index of the quadratic.
QuadThreeWiseParams build_g2_quad(std::span<const uint64_t> keys, const QuadExtField& field,
                                  uint64_t n, uint64_t alpha, Rng& rng,
                                  unsigned* rounds = nullptr);

// ---------------------------------------------------------------------------
// Deterministic families

/// f(x) = ((x a + b) mod 2^r) div 2^(r - s).
struct DetMultShiftParams {
  uint64_t a = 1;
  uint64_t b = 0;
  unsigned r = 0;
  unsigned s = 0;

  uint64_t operator()(uint64_t x) const {
    const uint64_t v = (x * a + b) & mask64(r);
    return r - s >= 64 ? 0 : v >> (r - s);
  }

  friend bool operator==(const DetMultShiftParams&, const DetMultShiftParams&) = default;
};

/// Deterministic search (b = 0, odd a chosen bit by bit from the low end by
/// conditional expectation of the colliding-pair count). Requires
/// |keys| (|keys| - 1) < 2^s, which |keys| <= 2^(s/2) implies.
DetMultShiftParams build_det_multshift(std::span<const uint64_t> keys, unsigned r, unsigned s);

struct BitSelectParams {
  uint64_t mask = 0;

  unsigned selected() const { return static_cast<unsigned>(std::popcount(mask)); }
  uint64_t operator()(uint64_t x) const { return pack(x, mask); }

  friend bool operator==(const BitSelectParams&, const BitSelectParams&) = default;
};

/// Mask of the highest differing bit of each adjacent pair of sorted keys.
BitSelectParams build_bitselect(std::span<const uint64_t> keys);

// ---------------------------------------------------------------------------
// Second-level bucket hash

struct BucketHash {
  enum class Kind : uint8_t { null, large, small, filler };

  Kind kind = Kind::null;
  uint64_t size = 0;
  BitSelectParams select;
  DetMultShiftParams mult;

  static BucketHash filler() {
    BucketHash h;
    h.kind = Kind::filler;
    return h;
  }

  bool is_null() const { return kind == Kind::null; }

  /// Cells owned by a bucket of `size` keys: 4 * bit_ceil(size)^2.
  static uint64_t cells_for(uint64_t size);
  static unsigned cell_bits_for(uint64_t size);

  uint64_t cell_count() const { return cells_for(size); }

  /// Cell index in [cell_count()). Throws on null and filler descriptors.
  uint64_t operator()(uint64_t image) const;

  friend bool operator==(const BucketHash&, const BucketHash&) = default;
};

/// Buckets above this many keys take the direct multiply-shift path.
inline uint64_t large_bucket_threshold(uint64_t n) { return ceil_log2(n); }

/// Deterministic in the set of images (order does not matter). `image_bits`
/// bounds the images; `n` is the bucket count.
BucketHash build_bucket_hash(std::span<const uint64_t> images, unsigned image_bits, uint64_t n);

/// Fixed-width record layout for bucket descriptors:
///   bits [0, 2)  tag (0 large, 1 small)
///   large: multiplier in the payload bits
///   small: select mask (image_bits) followed by the multiplier
/// Null is the all-ones record; the receiver's filler is all zeros.
class BucketHashCodec {
 public:
  BucketHashCodec(unsigned image_bits, unsigned payload_bits);

  /// Narrowest codec holding every descriptor of these sizes.
  static BucketHashCodec for_sizes(std::span<const uint64_t> sizes, unsigned image_bits,
                                   uint64_t n);

  unsigned width() const { return 2 + payload_bits_; }
  unsigned image_bits() const { return image_bits_; }

  /// Throws ErrorCode::parameter_overflow when a descriptor does not fit.
  u128 encode(const BucketHash& h) const;

  /// `size` is the bucket size, needed to recover the output width.
  BucketHash decode(u128 record, uint64_t size) const;

 private:
  unsigned image_bits_;
  unsigned payload_bits_;
};

}  // namespace hamsync
