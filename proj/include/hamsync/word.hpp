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

#include <bit>
#include <cstdint>
#include <random>

namespace hamsync {

__extension__ typedef unsigned __int128 u128;
__extension__ typedef __int128 i128;

/// Random source used by every randomized builder. Seeded explicitly by the
/// caller; nothing in the library draws from a global generator.
using Rng = std::mt19937_64;

/// ceil(log2(max(x, 2))), the "log n" used for thresholds and widths.
inline unsigned ceil_log2(uint64_t x) {
  return x <= 2 ? 1u : static_cast<unsigned>(std::bit_width(x - 1));
}

inline unsigned bit_width128(u128 x) {
  const auto hi = static_cast<uint64_t>(x >> 64);
  if (hi != 0) return 64 + static_cast<unsigned>(std::bit_width(hi));
  return static_cast<unsigned>(std::bit_width(static_cast<uint64_t>(x)));
}

inline u128 mask128(unsigned bits) {
  return bits >= 128 ? ~u128{0} : (u128{1} << bits) - 1;
}

inline uint64_t mask64(unsigned bits) {
  return bits >= 64 ? ~uint64_t{0} : (uint64_t{1} << bits) - 1;
}

// Uniform integer in [0, bound). bound must be non-zero.
uint64_t uniform_below(Rng& rng, uint64_t bound);

// Uniform integer in [lo, hi], full 64-bit range allowed.
uint64_t uniform_between(Rng& rng, uint64_t lo, uint64_t hi);

// Uniform integer with the given number of low bits (bits <= 128).
u128 uniform_bits(Rng& rng, unsigned bits);

/// Division and remainder by a fixed divisor through a precomputed
/// reciprocal, with at most two correction steps.
class Divider {
 public:
  Divider() = default;
  explicit Divider(uint64_t divisor);

  uint64_t divisor() const { return d_; }

  uint64_t quotient(uint64_t x) const {
    uint64_t quo = 0, rem = 0;
    divide(x, quo, rem);
    return quo;
  }

  uint64_t remainder(uint64_t x) const {
    uint64_t quo = 0, rem = 0;
    divide(x, quo, rem);
    return rem;
  }

  void divide(uint64_t x, uint64_t& quo, uint64_t& rem) const {
    quo = static_cast<uint64_t>((static_cast<u128>(x) * recip_) >> 64);
    rem = x - quo * d_;
    while (rem >= d_) {
      rem -= d_;
      ++quo;
    }
  }

 private:
  uint64_t d_ = 1;
  uint64_t recip_ = 0;  // floor((2^64 - 1) / d)
};

}  // namespace hamsync
