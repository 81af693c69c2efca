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
#include "hamsync/hashing.hpp"

#include <algorithm>

#include "hamsync/error.hpp"

namespace hamsync {

namespace {

void require_distinct(std::span<const uint64_t> keys) {
  std::vector<uint64_t> sorted(keys.begin(), keys.end());
  std::sort(sorted.begin(), sorted.end());
  require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
          ErrorCode::invalid_argument, "keys must be distinct");
}

bool all_distinct(std::vector<uint64_t>& values) {
  std::sort(values.begin(), values.end());
  return std::adjacent_find(values.begin(), values.end()) == values.end();
}

}  // namespace

uint64_t msb(uint64_t x) {
  require(x != 0, ErrorCode::undefined_on_zero, "msb is undefined on zero");
  return std::bit_floor(x);
}

uint64_t pack(uint64_t x, uint64_t mask) { return PackTables::standard().pack(x, mask); }

PackTables::PackTables(unsigned chunk_bits) : chunk_bits_(chunk_bits) {
  require(chunk_bits >= 1 && chunk_bits <= kMaxChunkBits, ErrorCode::chunk_too_wide,
          "chunk too wide");
  const uint64_t span = uint64_t{1} << chunk_bits;
  pack_.resize(span * span);
  for (uint64_t m = 0; m < span; ++m) {
    for (uint64_t x = 0; x < span; ++x) {
      Entry e;
      for (int bit = static_cast<int>(chunk_bits) - 1; bit >= 0; --bit) {
        if ((m >> bit) & 1) {
          e.bits = static_cast<uint16_t>((e.bits << 1) | ((x >> bit) & 1));
          ++e.count;
        }
      }
      pack_[(m << chunk_bits) | x] = e;
    }
  }
  msb_.resize(span);
  for (uint64_t v = 1; v < span; ++v) msb_[v] = static_cast<uint16_t>(std::bit_floor(v));
}

const PackTables& PackTables::standard() {
  static const PackTables tables(8);
  return tables;
}

uint64_t PackTables::pack(uint64_t x, uint64_t mask) const {
  const uint64_t chunk_mask = mask64(chunk_bits_);
  uint64_t result = 0;
  const int chunks = static_cast<int>((64 + chunk_bits_ - 1) / chunk_bits_);
  for (int i = chunks - 1; i >= 0; --i) {
    const unsigned shift = static_cast<unsigned>(i) * chunk_bits_;
    const uint64_t m = (mask >> shift) & chunk_mask;
    if (m == 0) continue;
    const Entry e = pack_entry((x >> shift) & chunk_mask, m);
    result = (result << e.count) | e.bits;
  }
  return result;
}

uint64_t PackTables::msb(uint64_t x) const {
  require(x != 0, ErrorCode::undefined_on_zero, "msb is undefined on zero");
  const uint64_t chunk_mask = mask64(chunk_bits_);
  const int chunks = static_cast<int>((64 + chunk_bits_ - 1) / chunk_bits_);
  for (int i = chunks - 1; i >= 0; --i) {
    const unsigned shift = static_cast<unsigned>(i) * chunk_bits_;
    const uint64_t c = (x >> shift) & chunk_mask;
    if (c != 0) return msb_entry(c) << shift;
  }
  return 0;  // unreachable
}

// ---------------------------------------------------------------------------

uint64_t TwoWiseParams::operator()(uint64_t x) const {
  const unsigned w = width();
  const u128 v = (a * x + b) & mask128(w);
  return static_cast<uint64_t>(v >> (w - s));
}

TwoWiseParams build_g1(std::span<const uint64_t> keys, unsigned universe_bits,
                       unsigned out_bits, Rng& rng, unsigned* rounds) {
  require(universe_bits >= 1 && universe_bits <= 64, ErrorCode::invalid_argument,
          "universe bits out of range");
  require(out_bits >= 1 && out_bits <= 64, ErrorCode::invalid_argument,
          "output bits out of range");
  TwoWiseParams g;
  g.r = universe_bits;
  g.s = out_bits;
  require(g.width() <= 128, ErrorCode::parameter_overflow, "multiply-shift exceeds 128 bits");
  for (uint64_t key : keys) {
    require(universe_bits == 64 || key >> universe_bits == 0, ErrorCode::out_of_range,
            "key outside universe");
  }
  require_distinct(keys);

  std::vector<uint64_t> values(keys.size());
  for (unsigned round = 1;; ++round) {
    g.a = uniform_bits(rng, g.width()) | 1;
    g.b = uniform_bits(rng, g.width());
    for (size_t i = 0; i < keys.size(); ++i) values[i] = g(keys[i]);
    if (all_distinct(values)) {
      if (rounds) *rounds = round;
      return g;
    }
  }
}

uint64_t ThreeWiseParams::operator()(uint64_t y) const {
  const uint64_t yy = mul_mod(y, y, p);
  const u128 v = static_cast<u128>(a) * yy % p + static_cast<u128>(b) * y % p + c;
  return static_cast<uint64_t>(v % p);
}

uint64_t cube_sum(std::span<const uint64_t> bucket_of_key, uint64_t n, uint64_t cap) {
  std::vector<uint32_t> counts(n, 0);
  for (uint64_t i : bucket_of_key) ++counts[i];
  uint64_t total = 0;
  for (uint64_t c : counts) {
    if (c > (uint64_t{1} << 20)) return cap + 1;
    total += c * c * c;
    if (total > cap) return cap + 1;
  }
  return total;
}

bool satisfies_three_wise_conditions(const ThreeWiseParams& f, std::span<const uint64_t> keys,
                                     uint64_t n, uint64_t alpha) {
  if (keys.empty()) return true;
  const Divider by_n(n);
  const Divider by_n2(n * n);
  std::vector<uint64_t> low(keys.size());
  std::vector<uint64_t> bucket(keys.size());
  for (size_t i = 0; i < keys.size(); ++i) {
    const uint64_t v = f(keys[i]);
    low[i] = by_n2.remainder(v);
    bucket[i] = by_n.remainder(v);
  }
  const uint64_t cap = alpha * n;
  return cube_sum(bucket, n, cap) <= cap && all_distinct(low);
}

ThreeWiseParams build_g2(std::span<const uint64_t> keys, uint64_t p, uint64_t n,
                         uint64_t alpha, Rng& rng, unsigned* rounds) {
  require(is_prime(p), ErrorCode::invalid_argument, "modulus must be prime");
  ThreeWiseParams f{p, 0, 0, 0};
  if (n == 0 || keys.empty()) {
    if (rounds) *rounds = 1;
    return f;
  }
  require(static_cast<u128>(n) * n < p, ErrorCode::invalid_argument, "requires n^2 < P");
  require(n <= (uint64_t{1} << 31), ErrorCode::parameter_overflow, "bucket count too large");
  for (uint64_t key : keys) require(key < p, ErrorCode::out_of_range, "key outside [P]");
  require_distinct(keys);

  for (unsigned round = 1;; ++round) {
    f.a = uniform_below(rng, p);
    f.b = uniform_below(rng, p);
    f.c = uniform_below(rng, p);
    if (satisfies_three_wise_conditions(f, keys, n, alpha)) {
      if (rounds) *rounds = round;
      return f;
    }
  }
}

QuadThreeWiseParams build_g2_quad(std::span<const uint64_t> keys, const QuadExtField& field,
                                  uint64_t n, uint64_t alpha, Rng& rng, unsigned* rounds) {
  QuadThreeWiseParams f;
  if (n == 0 || keys.empty()) {
    if (rounds) *rounds = 1;
    return f;
  }
  for (uint64_t key : keys) require(key < field.order(), ErrorCode::out_of_range, "key outside [q^2]");
  require_distinct(keys);

  const uint64_t q = field.q();
  const Divider by_n(n);
  std::vector<uint64_t> bucket(keys.size());
  for (unsigned round = 1;; ++round) {
    do {
      f.a = {uniform_below(rng, q), uniform_below(rng, q)};
    } while (f.a == Fq2{});
    f.b = {uniform_below(rng, q), uniform_below(rng, q)};
    f.c = {uniform_below(rng, q), uniform_below(rng, q)};
    for (size_t i = 0; i < keys.size(); ++i) bucket[i] = by_n.remainder(f(field, keys[i]));
    if (cube_sum(bucket, n, alpha * n) <= alpha * n) {
      if (rounds) *rounds = round;
      return f;
    }
  }
}

// ---------------------------------------------------------------------------

namespace {

// Pair difference x - y = 2^t * odd (mod 2^r).
struct KeyPair {
  unsigned t;
  uint64_t odd;
};

// Expected number of "near" pairs (|a x - a y| mod 2^r below 2^(r-s), which
// every collision implies) over a uniformly random completion of the low
// `fixed` bits of a, scaled by 2^(r - fixed) to stay integral.
u128 near_pair_weight(std::span<const KeyPair> pairs, uint64_t a, unsigned fixed, unsigned r,
                      unsigned s) {
  u128 total = 0;
  for (const KeyPair& pair : pairs) {
    const unsigned m = r - pair.t;
    const u128 span = u128{1} << m;
    const u128 k = u128{1} << (m - s);
    const uint64_t z_low = a * pair.odd;
    if (fixed >= m) {
      const u128 z = static_cast<u128>(z_low) & (span - 1);
      if (z < k || z > span - k) total += u128{1} << (r - fixed);
      continue;
    }
    const u128 c = static_cast<u128>(z_low) & ((u128{1} << fixed) - 1);
    const u128 step_mask = (u128{1} << fixed) - 1;
    auto below = [&](u128 bound) -> u128 {
      return bound > c ? (bound - c + step_mask) >> fixed : 0;
    };
    const u128 completions = u128{1} << (m - fixed);
    const u128 bad = below(k) + completions - below(span - k + 1);
    total += bad << pair.t;
  }
  return total;
}

}  // namespace

DetMultShiftParams build_det_multshift(std::span<const uint64_t> keys, unsigned r, unsigned s) {
  require(r >= 1 && r <= 64 && s <= r, ErrorCode::invalid_argument, "requires s <= r <= 64");
  for (uint64_t key : keys) {
    require(r == 64 || key >> r == 0, ErrorCode::out_of_range, "key outside [2^r]");
  }
  const u128 n = keys.size();
  require(n * (n == 0 ? 0 : n - 1) < (u128{1} << s), ErrorCode::invalid_argument,
          "too many keys for the output range");
  require_distinct(keys);

  DetMultShiftParams f{1, 0, r, s};
  std::vector<KeyPair> pairs;
  for (size_t i = 0; i < keys.size(); ++i) {
    for (size_t j = i + 1; j < keys.size(); ++j) {
      const uint64_t d = (keys[i] - keys[j]) & mask64(r);
      const auto t = static_cast<unsigned>(std::countr_zero(d));
      if (r - t <= s) continue;  // never near for any odd multiplier
      pairs.push_back({t, d >> t});
    }
  }

  u128 weight = near_pair_weight(pairs, f.a, 1, r, s);
  for (unsigned bit = 1; bit < r && weight != 0; ++bit) {
    const uint64_t with_one = f.a | (uint64_t{1} << bit);
    const u128 w0 = near_pair_weight(pairs, f.a, bit + 1, r, s);
    const u128 w1 = near_pair_weight(pairs, with_one, bit + 1, r, s);
    if (w1 < w0) {
      f.a = with_one;
      weight = w1;
    } else {
      weight = w0;
    }
  }

  std::vector<uint64_t> values(keys.size());
  for (size_t i = 0; i < keys.size(); ++i) values[i] = f(keys[i]);
  if (!all_distinct(values)) throw std::logic_error("multiplier search failed to separate keys");
  return f;
}

BitSelectParams build_bitselect(std::span<const uint64_t> keys) {
  std::vector<uint64_t> sorted(keys.begin(), keys.end());
  std::sort(sorted.begin(), sorted.end());
  require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
          ErrorCode::invalid_argument, "keys must be distinct");
  BitSelectParams select;
  for (size_t i = 0; i + 1 < sorted.size(); ++i) select.mask |= msb(sorted[i] ^ sorted[i + 1]);
  return select;
}

// ---------------------------------------------------------------------------

uint64_t BucketHash::cells_for(uint64_t size) {
  if (size == 0) return 0;
  const uint64_t rounded = std::bit_ceil(size);
  return 4 * rounded * rounded;
}

unsigned BucketHash::cell_bits_for(uint64_t size) {
  if (size == 0) return 0;
  return 2 + 2 * static_cast<unsigned>(std::countr_zero(std::bit_ceil(size)));
}

uint64_t BucketHash::operator()(uint64_t image) const {
  switch (kind) {
    case Kind::large: return mult(image);
    case Kind::small: return mult(select(image));
    case Kind::null:
    case Kind::filler: break;
  }
  fail(ErrorCode::null_bucket, "null bucket");
}

BucketHash build_bucket_hash(std::span<const uint64_t> images, unsigned image_bits, uint64_t n) {
  BucketHash h;
  if (images.empty()) return h;
  h.size = images.size();
  const unsigned s = BucketHash::cell_bits_for(h.size);
  if (h.size > large_bucket_threshold(n)) {
    h.kind = BucketHash::Kind::large;
    h.mult = build_det_multshift(images, std::max(image_bits, s), s);
    return h;
  }
  h.kind = BucketHash::Kind::small;
  h.select = build_bitselect(images);
  std::vector<uint64_t> packed(images.size());
  for (size_t i = 0; i < images.size(); ++i) packed[i] = h.select(images[i]);
  h.mult = build_det_multshift(packed, std::max(h.select.selected(), s), s);
  return h;
}

// ---------------------------------------------------------------------------

BucketHashCodec::BucketHashCodec(unsigned image_bits, unsigned payload_bits)
    : image_bits_(image_bits), payload_bits_(payload_bits) {
  require(image_bits >= 1 && image_bits <= 64, ErrorCode::parameter_overflow,
          "image width out of range");
  require(payload_bits >= 1 && payload_bits <= 126, ErrorCode::parameter_overflow,
          "descriptor exceeds 128 bits");
}

BucketHashCodec BucketHashCodec::for_sizes(std::span<const uint64_t> sizes, unsigned image_bits,
                                           uint64_t n) {
  unsigned payload = 1;
  for (uint64_t size : sizes) {
    if (size == 0) continue;
    const unsigned s = BucketHash::cell_bits_for(size);
    if (size > large_bucket_threshold(n)) {
      payload = std::max(payload, std::max(image_bits, s));
    } else {
      const auto most_selected = static_cast<unsigned>(std::min<uint64_t>(size - 1, 64));
      payload = std::max(payload, image_bits + std::max(most_selected, s));
    }
  }
  return BucketHashCodec(image_bits, payload);
}

u128 BucketHashCodec::encode(const BucketHash& h) const {
  switch (h.kind) {
    case BucketHash::Kind::null: return mask128(width());
    case BucketHash::Kind::filler: return 0;
    case BucketHash::Kind::large:
      require(bit_width128(h.mult.a) <= payload_bits_, ErrorCode::parameter_overflow,
              "descriptor does not fit its record");
      return static_cast<u128>(h.mult.a) << 2;
    case BucketHash::Kind::small:
      require(std::bit_width(h.select.mask) <= image_bits_ &&
                  std::bit_width(h.mult.a) + image_bits_ <= payload_bits_,
              ErrorCode::parameter_overflow, "descriptor does not fit its record");
      return 1 | (static_cast<u128>(h.select.mask) << 2) |
             (static_cast<u128>(h.mult.a) << (2 + image_bits_));
  }
  return 0;
}

BucketHash BucketHashCodec::decode(u128 record, uint64_t size) const {
  BucketHash h;
  if (record == mask128(width())) {
    require(size == 0, ErrorCode::malformed, "null descriptor for a non-empty bucket");
    return h;
  }
  require(size != 0, ErrorCode::malformed, "descriptor for an empty bucket");
  require(record >> width() == 0, ErrorCode::malformed, "descriptor wider than its record");
  h.size = size;
  const unsigned s = BucketHash::cell_bits_for(size);
  const auto tag = static_cast<unsigned>(record & 3);
  if (tag == 0) {
    h.kind = BucketHash::Kind::large;
    const unsigned r = std::max(image_bits_, s);
    const u128 a = record >> 2;
    require(bit_width128(a) <= r, ErrorCode::malformed, "multiplier wider than its input");
    h.mult = {static_cast<uint64_t>(a), 0, r, s};
    return h;
  }
  require(tag == 1, ErrorCode::malformed, "unknown descriptor tag");
  h.kind = BucketHash::Kind::small;
  h.select.mask = static_cast<uint64_t>((record >> 2) & mask128(image_bits_));
  const unsigned r = std::max(h.select.selected(), s);
  const u128 a = record >> (2 + image_bits_);
  require(bit_width128(a) <= r && r <= 64, ErrorCode::malformed,
          "multiplier wider than its input");
  h.mult = {static_cast<uint64_t>(a), 0, r, s};
  return h;
}

}  // namespace hamsync
