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
#include "hamsync/error.hpp"
#include "hamsync/word.hpp"

namespace hamsync {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::no_prime_found: return "no prime found";
    case ErrorCode::zero_inverse: return "zero has no inverse";
    case ErrorCode::not_odd_prime: return "modulus must be odd prime";
    case ErrorCode::leading_coefficient_zero: return "leading coefficient zero";
    case ErrorCode::out_of_range: return "out of range";
    case ErrorCode::undefined_on_zero: return "undefined on zero";
    case ErrorCode::chunk_too_wide: return "chunk too wide";
    case ErrorCode::null_bucket: return "null bucket";
    case ErrorCode::symbol_out_of_field: return "symbol out of field";
    case ErrorCode::uncorrectable: return "uncorrectable";
    case ErrorCode::parameter_overflow: return "parameter overflow";
    case ErrorCode::bad_magic: return "bad magic";
    case ErrorCode::unsupported_version: return "unsupported version";
    case ErrorCode::truncated: return "truncated";
    case ErrorCode::checksum_mismatch: return "checksum mismatch";
    case ErrorCode::malformed: return "malformed";
    case ErrorCode::inconsistent_cell: return "inconsistent cell";
  }
  return "unknown";
}

uint64_t uniform_below(Rng& rng, uint64_t bound) {
  // Lemire's nearly-divisionless rejection method.
  uint64_t x = rng();
  u128 m = static_cast<u128>(x) * bound;
  auto low = static_cast<uint64_t>(m);
  if (low < bound) {
    const uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = rng();
      m = static_cast<u128>(x) * bound;
      low = static_cast<uint64_t>(m);
    }
  }
  return static_cast<uint64_t>(m >> 64);
}

uint64_t uniform_between(Rng& rng, uint64_t lo, uint64_t hi) {
  if (lo == 0 && hi == ~uint64_t{0}) return rng();
  return lo + uniform_below(rng, hi - lo + 1);
}

u128 uniform_bits(Rng& rng, unsigned bits) {
  const u128 hi = rng();
  const u128 lo = rng();
  return ((hi << 64) | lo) & mask128(bits);
}

Divider::Divider(uint64_t divisor) : d_(divisor) {
  require(divisor != 0, ErrorCode::invalid_argument, "division by zero");
  recip_ = ~uint64_t{0} / divisor;
}

}  // namespace hamsync
