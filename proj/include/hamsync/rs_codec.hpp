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

#include "hamsync/word.hpp"

namespace hamsync {

/// GF(2^m) for 2 <= m <= 24 with exp/log tables over a fixed primitive
/// polynomial. Instances are shared and immutable.
class Gf2m {
 public:
  static constexpr unsigned kMinBits = 2;
  static constexpr unsigned kMaxBits = 24;

  static const Gf2m& get(unsigned m);
  static uint32_t primitive_polynomial(unsigned m);

  unsigned m() const { return m_; }
  uint32_t size() const { return uint32_t{1} << m_; }
  uint32_t order() const { return size() - 1; }

  uint32_t exp(uint64_t i) const { return exp_[i % order()]; }
  uint32_t log(uint32_t x) const { return log_[x]; }  // x != 0
  uint32_t mul(uint32_t a, uint32_t b) const {
    return (a == 0 || b == 0) ? 0 : exp_[log_[a] + log_[b]];
  }
  uint32_t div(uint32_t a, uint32_t b) const;
  uint32_t inv(uint32_t a) const;
  uint32_t pow(uint32_t a, uint64_t e) const;

  explicit Gf2m(unsigned m);

 private:
  unsigned m_;
  std::vector<uint32_t> exp_;  // doubled so sums of two logs index directly
  std::vector<uint32_t> log_;
};

/// Smallest usable field for a code: max(4, bit_width(length + 2k)), so that
/// length + 2k <= 2^m - 1.
unsigned rs_field_bits(uint64_t length, uint64_t k);

/// Field width for slicing w-bit symbols: among the widths that fit the code
/// (up to kMaxSliceBits unless the code needs more), the one wasting the
/// fewest padding bits, preferring fewer slices on ties.
unsigned choose_chunk_bits(uint64_t length, uint64_t k, unsigned symbol_bits);

inline constexpr unsigned kMaxSliceBits = 20;

/// Systematic Reed-Solomon code over GF(2^m) with 2k check symbols and
/// generator prod_{i=1..2k} (x - alpha^i). data[0] is the highest-degree
/// coefficient; the check symbols are the remainder of D(x) x^(2k) mod g,
/// stored highest degree first.
class RsCode {
 public:
  RsCode(uint64_t length, uint64_t k, unsigned m);
  RsCode(uint64_t length, uint64_t k) : RsCode(length, k, rs_field_bits(length, k)) {}

  unsigned m() const { return field_->m(); }
  uint64_t length() const { return length_; }
  uint64_t k() const { return k_; }
  uint64_t check_count() const { return 2 * k_; }
  const Gf2m& field() const { return *field_; }

  /// Monic generator, highest degree first (generator()[0] == 1).
  const std::vector<uint32_t>& generator() const { return gen_; }

  std::vector<uint32_t> encode_redundancy(std::span<const uint32_t> data) const;

  /// Returns the data corrected against intact check symbols. Throws
  /// ErrorCode::uncorrectable when no word within k substitutions of the
  /// data matches them. `corrections` receives the number of repaired
  /// positions.
  std::vector<uint32_t> correct(std::span<const uint32_t> data,
                                std::span<const uint32_t> redundancy,
                                uint64_t* corrections = nullptr) const;

 private:
  void check_symbols(std::span<const uint32_t> symbols) const;

  uint64_t length_;
  uint64_t k_;
  const Gf2m* field_;
  std::vector<uint32_t> gen_;
  // Products gen[t + 1] * (v << 4g), laid out [(g * 16 + v) * 2k + t].
  std::vector<uint32_t> nibble_rows_;
};

/// Check symbols of an array of wide values split into m-bit slices, one
/// independent code per slice position (stream 0 holds the low slices).
struct ChunkedRedundancy {
  unsigned symbol_bits = 1;
  unsigned chunk_bits = 4;
  uint64_t k = 0;
  std::vector<std::vector<uint32_t>> streams;

  unsigned chunk_count() const { return (symbol_bits + chunk_bits - 1) / chunk_bits; }
  uint64_t bit_size() const { return uint64_t{chunk_count()} * 2 * k * chunk_bits; }

  friend bool operator==(const ChunkedRedundancy&, const ChunkedRedundancy&) = default;
};

ChunkedRedundancy chunked_encode(std::span<const u128> symbols, unsigned symbol_bits,
                                 uint64_t k);

/// Same, with an explicit slice width (must fit the code length).
ChunkedRedundancy chunked_encode(std::span<const u128> symbols, unsigned symbol_bits,
                                 uint64_t k, unsigned chunk_bits);

std::vector<u128> chunked_correct(std::span<const u128> symbols, const ChunkedRedundancy& red,
                                  uint64_t* corrections = nullptr);

}  // namespace hamsync
