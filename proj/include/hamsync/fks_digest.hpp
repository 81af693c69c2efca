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
#include <optional>
#include <span>
#include <vector>

#include "hamsync/field_arith.hpp"
#include "hamsync/hashing.hpp"
#include "hamsync/word.hpp"

namespace hamsync {

struct KeyValue {
  uint64_t pos = 0;
  uint64_t value = 0;

  friend bool operator==(const KeyValue&, const KeyValue&) = default;
  friend auto operator<=>(const KeyValue&, const KeyValue&) = default;
};

/// A string over [sigma] of length u, kept as its non-zero entries.
struct SparseString {
  uint64_t u = 1;
  uint64_t sigma = 2;
  std::vector<KeyValue> pairs;

  uint64_t n() const { return pairs.size(); }

  /// Throws ErrorCode::invalid_argument unless positions are distinct and
  /// below u and values lie in [1, sigma).
  void validate() const;

  std::vector<uint64_t> positions() const;

  /// Pairs sorted by position.
  SparseString canonical() const;

  /// Equal as sets of pairs over the same (u, sigma).
  bool same_as(const SparseString& other) const;
};

/// Number of positions where the dense views differ.
uint64_t hamming_distance(const SparseString& a, const SparseString& b);

enum class Variant : uint8_t { large_universe = 0, small_universe = 1 };

const char* to_string(Variant v);

/// ceil(log2 u): u is rounded up to 2^universe_log(u) before hashing.
unsigned universe_log(uint64_t u);

/// Quotiented path iff u_round^2 <= n^3.
Variant choose_variant(unsigned u_log, uint64_t n);

/// alpha for the cube-sum condition: HAMSYNC_ALPHA if set, else 32.
uint64_t default_alpha();

uint64_t isqrt_ceil(uint64_t x);

/// Interval the small-universe prime is drawn from, [lo, 2 lo].
uint64_t small_universe_prime_floor(unsigned u_log);

/// Width of g1's output: 4 bit_ceil(n)^2 values.
unsigned g1_out_bits(uint64_t n);

/// First-level hash. f1(x) = f(x) mod n picks the bucket; the image is what
/// the bucket hash sees: f(x) mod n^2 for the large universe, and
/// 2 (f(x) div n) + I for the small one, where I tells which root of
/// a X^2 + b X + c = f(x) the key is (0 for the smaller encoding).
struct TopHash {
  Variant variant = Variant::large_universe;
  uint64_t n = 0;
  unsigned u_log = 0;

  TwoWiseParams g1;
  ThreeWiseParams g2;

  std::optional<QuadExtField> field;
  QuadThreeWiseParams quad;

  struct Placement {
    uint64_t bucket;
    uint64_t image;
  };

  Placement place(uint64_t x) const;
  unsigned image_bits() const;

  /// Inverse of place() for the small universe; nothing when no key of the
  /// universe maps there.
  std::optional<uint64_t> recover_position(uint64_t bucket, uint64_t image) const;

  friend bool operator==(const TopHash& x, const TopHash& y);
};

struct BuildStats {
  unsigned g1_rounds = 0;
  unsigned g2_rounds = 0;
};

TopHash build_top_hash(std::span<const uint64_t> keys, unsigned u_log, Rng& rng,
                       uint64_t alpha = default_alpha(), BuildStats* stats = nullptr);

/// Keys grouped by bucket, ascending by image inside each bucket.
struct Assignment {
  std::vector<uint64_t> sizes;
  std::vector<uint64_t> start;  // n + 1 entries
  std::vector<uint64_t> images;
  std::vector<uint64_t> keys;

  std::span<const uint64_t> bucket_images(uint64_t i) const {
    return std::span<const uint64_t>(images).subspan(start[i], sizes[i]);
  }
};

Assignment assign_buckets(std::span<const uint64_t> keys, const TopHash& top);

struct BucketArrays {
  std::vector<uint64_t> b;
  std::vector<BucketHash> B;
};

/// Prefix sums of 4 bit_ceil(b_i)^2; n + 1 entries.
std::vector<uint64_t> cell_offsets(std::span<const uint64_t> b);

struct Cell {
  bool present = false;
  uint64_t key = 0;  // position (large universe) or image (small universe)
  uint64_t value = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
};

struct CellTable {
  std::vector<uint64_t> offsets;
  std::vector<Cell> cells;
};

/// Fixed-width cell record: presence bit, key field, value field.
class CellCodec {
 public:
  CellCodec(unsigned key_bits, unsigned value_bits);
  static CellCodec for_digest(const TopHash& top, uint64_t sigma);

  unsigned width() const { return 1 + key_bits_ + value_bits_; }
  u128 encode(const Cell& c) const;
  Cell decode(u128 record) const;

 private:
  unsigned key_bits_;
  unsigned value_bits_;
};

struct FksDigest {
  TopHash top;
  BucketArrays arrays;
  CellTable table;
};

FksDigest build_fks(const SparseString& s, Rng& rng, uint64_t alpha = default_alpha(),
                    BuildStats* stats = nullptr);

std::vector<uint64_t> receiver_rebuild_b(const SparseString& t, const TopHash& top);

std::vector<BucketHash> receiver_rebuild_B(const SparseString& t, const TopHash& top,
                                           std::span<const uint64_t> b_corrected,
                                           std::span<const uint64_t> b_own);

CellTable receiver_rebuild_beta(const SparseString& t, const TopHash& top,
                                std::span<const uint64_t> b, std::span<const BucketHash> B);

/// Throws ErrorCode::inconsistent_cell on cells no sender could produce.
SparseString extract_string(const CellTable& table, const TopHash& top, uint64_t u,
                            uint64_t sigma);

}  // namespace hamsync
