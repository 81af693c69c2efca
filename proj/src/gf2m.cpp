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
#include <array>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "hamsync/error.hpp"
#include "hamsync/rs_codec.hpp"

namespace hamsync {

namespace {

constexpr std::array<uint32_t, 25> kPrimitive = {
    0,       0,       0x7,      0xb,      0x13,     0x25,     0x43,     0x89,     0x11d,
    0x211,   0x409,   0x805,    0x1053,   0x201b,   0x4443,   0x8003,   0x1100b,  0x20009,
    0x40081, 0x80027, 0x100009, 0x200005, 0x400003, 0x800021, 0x1000087,
};

}  // namespace

uint32_t Gf2m::primitive_polynomial(unsigned m) {
  require(m >= kMinBits && m <= kMaxBits, ErrorCode::parameter_overflow,
          "field width out of range");
  return kPrimitive[m];
}

Gf2m::Gf2m(unsigned m) : m_(m) {
  const uint32_t poly = primitive_polynomial(m);
  const uint32_t n = order();
  exp_.resize(2 * static_cast<size_t>(n));
  log_.assign(size(), 0);
  uint32_t x = 1;
  for (uint32_t i = 0; i < n; ++i) {
    if (i > 0 && x == 1) throw std::logic_error("polynomial is not primitive");
    exp_[i] = x;
    log_[x] = i;
    x <<= 1;
    if (x & size()) x ^= poly;
  }
  if (x != 1) throw std::logic_error("polynomial is not primitive");
  for (uint32_t i = n; i < 2 * n; ++i) exp_[i] = exp_[i - n];
}

const Gf2m& Gf2m::get(unsigned m) {
  static std::array<std::unique_ptr<Gf2m>, kMaxBits + 1> cache;
  static std::mutex lock;
  require(m >= kMinBits && m <= kMaxBits, ErrorCode::parameter_overflow,
          "field width out of range");
  std::lock_guard guard(lock);
  if (!cache[m]) cache[m] = std::make_unique<Gf2m>(m);
  return *cache[m];
}

uint32_t Gf2m::div(uint32_t a, uint32_t b) const {
  require(b != 0, ErrorCode::zero_inverse, "division by zero");
  if (a == 0) return 0;
  return exp_[log_[a] + order() - log_[b]];
}

uint32_t Gf2m::inv(uint32_t a) const { return div(1, a); }

uint32_t Gf2m::pow(uint32_t a, uint64_t e) const {
  if (e == 0) return 1;
  if (a == 0) return 0;
  return exp_[static_cast<uint64_t>(log_[a]) * (e % order()) % order()];
}

}  // namespace hamsync
