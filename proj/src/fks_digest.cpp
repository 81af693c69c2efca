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
#include "hamsync/fks_digest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <tuple>

#include "hamsync/error.hpp"

namespace hamsync {

void SparseString::validate() const {
  require(u >= 1, ErrorCode::invalid_argument, "u must be positive");
  require(sigma >= 2, ErrorCode::invalid_argument, "sigma must be at least 2");
  std::vector<uint64_t> pos;
  pos.reserve(pairs.size());
  for (const KeyValue& kv : pairs) {
    require(kv.pos < u, ErrorCode::invalid_argument, "position outside [u]");
    require(kv.value >= 1 && kv.value < sigma, ErrorCode::invalid_argument,
            "value outside [1, sigma)");
    pos.push_back(kv.pos);
  }
  std::sort(pos.begin(), pos.end());
  require(std::adjacent_find(pos.begin(), pos.end()) == pos.end(), ErrorCode::invalid_argument,
          "duplicate position");
}

std::vector<uint64_t> SparseString::positions() const {
  std::vector<uint64_t> out;
  out.reserve(pairs.size());
  for (const KeyValue& kv : pairs) out.push_back(kv.pos);
  return out;
}

SparseString SparseString::canonical() const {
  SparseString out = *this;
  std::sort(out.pairs.begin(), out.pairs.end());
  return out;
}

bool SparseString::same_as(const SparseString& other) const {
  return u == other.u && sigma == other.sigma && canonical().pairs == other.canonical().pairs;
}

uint64_t hamming_distance(const SparseString& a, const SparseString& b) {
  const SparseString x = a.canonical();
  const SparseString y = b.canonical();
  uint64_t d = 0;
  size_t i = 0, j = 0;
  while (i < x.pairs.size() || j < y.pairs.size()) {
    if (j == y.pairs.size() || (i < x.pairs.size() && x.pairs[i].pos < y.pairs[j].pos)) {
      ++d;
      ++i;
    } else if (i == x.pairs.size() || y.pairs[j].pos < x.pairs[i].pos) {
      ++d;
      ++j;
    } else {
      d += x.pairs[i].value != y.pairs[j].value;
      ++i;
      ++j;
    }
  }
  return d;
}

const char* to_string(Variant v) {
  return v == Variant::small_universe ? "small-universe" : "large-universe";
}

unsigned universe_log(uint64_t u) {
  return u <= 1 ? 0u : static_cast<unsigned>(std::bit_width(u - 1));
}

Variant choose_variant(unsigned u_log, uint64_t n) {
  if (n == 0) return Variant::large_universe;
  bool small;
  if (n < (uint64_t{1} << 42)) {
    const u128 cube = static_cast<u128>(n) * n * n;
    small = 2 * u_log < 128 && (u128{1} << (2 * u_log)) <= cube;
  } else {
    const long double cube = static_cast<long double>(n) * n * n;
    small = std::ldexp(1.0L, static_cast<int>(2 * u_log)) <= cube;
  }
  return small ? Variant::small_universe : Variant::large_universe;
}

uint64_t default_alpha() {
  const char* env = std::getenv("HAMSYNC_ALPHA");
  if (env == nullptr || *env == '\0') return 32;
  uint64_t alpha = 0;
  const char* end = env + std::strlen(env);
  const auto [ptr, ec] = std::from_chars(env, end, alpha);
  require(ec == std::errc() && ptr == end && alpha >= 1, ErrorCode::invalid_argument,
          "HAMSYNC_ALPHA must be a positive integer");
  return alpha;
}

uint64_t isqrt_ceil(uint64_t x) {
  uint64_t r = static_cast<uint64_t>(std::sqrt(static_cast<long double>(x)));
  while (static_cast<u128>(r) * r > x) --r;
  while (static_cast<u128>(r) * r < x) ++r;
  return r;
}

uint64_t small_universe_prime_floor(unsigned u_log) {
  require(u_log <= 62, ErrorCode::parameter_overflow, "universe too large");
  return std::max<uint64_t>(3, isqrt_ceil(uint64_t{1} << u_log));
}

unsigned g1_out_bits(uint64_t n) {
  return 2 + 2 * static_cast<unsigned>(std::countr_zero(std::bit_ceil(std::max<uint64_t>(n, 1))));
}

// ---------------------------------------------------------------------------

TopHash::Placement TopHash::place(uint64_t x) const {
  if (variant == Variant::large_universe) {
    const uint64_t v = g2(g1(x));
    return {v % n, v % (n * n)};
  }
  const uint64_t v = quad(*field, x);
  const auto roots = field->solve_quadratic(quad.a, quad.b, quad.c, field->from_int(v));
  if (!roots) throw std::logic_error("key is not a root of its own value");
  const uint64_t index = field->to_int(roots->first) == x ? 0 : 1;
  return {v % n, 2 * (v / n) + index};
}

unsigned TopHash::image_bits() const {
  if (variant == Variant::large_universe) {
    return n <= 1 ? 1u : static_cast<unsigned>(std::bit_width(n * n - 1));
  }
  const uint64_t quotients = (field->order() + n - 1) / n;
  return static_cast<unsigned>(std::bit_width(2 * quotients - 1));
}

std::optional<uint64_t> TopHash::recover_position(uint64_t bucket, uint64_t image) const {
  require(variant == Variant::small_universe, ErrorCode::invalid_argument,
          "positions are stored verbatim in the large-universe variant");
  if (bucket >= n) return std::nullopt;
  const u128 v = static_cast<u128>(image >> 1) * n + bucket;
  if (v >= field->order()) return std::nullopt;
  const auto roots =
      field->solve_quadratic(quad.a, quad.b, quad.c, field->from_int(static_cast<uint64_t>(v)));
  if (!roots) return std::nullopt;
  return field->to_int((image & 1) == 0 ? roots->first : roots->second);
}

bool operator==(const TopHash& x, const TopHash& y) {
  return x.variant == y.variant && x.n == y.n && x.u_log == y.u_log && x.g1 == y.g1 &&
         x.g2 == y.g2 && x.field == y.field && x.quad == y.quad;
}

TopHash build_top_hash(std::span<const uint64_t> keys, unsigned u_log, Rng& rng, uint64_t alpha,
                       BuildStats* stats) {
  TopHash top;
  top.n = keys.size();
  top.u_log = u_log;
  top.variant = choose_variant(u_log, top.n);
  BuildStats local;
  if (top.variant == Variant::large_universe) {
    const unsigned s = g1_out_bits(top.n);
    require(s <= 62, ErrorCode::parameter_overflow, "too many keys");
    top.g1 = build_g1(keys, std::max(1u, u_log), s, rng, &local.g1_rounds);
    const uint64_t p = find_prime_in(uint64_t{1} << s, (uint64_t{2} << s) - 1, rng);
    std::vector<uint64_t> images(keys.size());
    for (size_t i = 0; i < keys.size(); ++i) images[i] = top.g1(keys[i]);
    top.g2 = build_g2(images, p, top.n, alpha, rng, &local.g2_rounds);
  } else {
    const uint64_t lo = small_universe_prime_floor(u_log);
    const uint64_t q = find_prime_in(lo, 2 * lo, rng);
    require(q < (uint64_t{1} << 32), ErrorCode::parameter_overflow, "universe too large");
    top.field = QuadExtField::for_prime(q);
    top.quad = build_g2_quad(keys, *top.field, top.n, alpha, rng, &local.g2_rounds);
  }
  if (stats) *stats = local;
  return top;
}

Assignment assign_buckets(std::span<const uint64_t> keys, const TopHash& top) {
  Assignment out;
  out.sizes.assign(top.n, 0);
  out.start.assign(top.n + 1, 0);
  std::vector<std::tuple<uint64_t, uint64_t, uint64_t>> placed;
  placed.reserve(keys.size());
  for (uint64_t x : keys) {
    const auto p = top.place(x);
    placed.emplace_back(p.bucket, p.image, x);
    ++out.sizes[p.bucket];
  }
  std::sort(placed.begin(), placed.end());
  for (uint64_t i = 0; i < top.n; ++i) out.start[i + 1] = out.start[i] + out.sizes[i];
  out.images.reserve(placed.size());
  out.keys.reserve(placed.size());
  for (const auto& [bucket, image, key] : placed) {
    out.images.push_back(image);
    out.keys.push_back(key);
  }
  return out;
}

std::vector<uint64_t> cell_offsets(std::span<const uint64_t> b) {
  std::vector<uint64_t> offsets(b.size() + 1, 0);
  for (size_t i = 0; i < b.size(); ++i) offsets[i + 1] = offsets[i] + BucketHash::cells_for(b[i]);
  return offsets;
}

// ---------------------------------------------------------------------------

CellCodec::CellCodec(unsigned key_bits, unsigned value_bits)
    : key_bits_(key_bits), value_bits_(value_bits) {
  require(key_bits >= 1 && value_bits >= 1 && 1 + key_bits + value_bits <= 128,
          ErrorCode::parameter_overflow, "cell record exceeds 128 bits");
}

CellCodec CellCodec::for_digest(const TopHash& top, uint64_t sigma) {
  const unsigned key_bits =
      top.variant == Variant::large_universe ? std::max(1u, top.u_log) : top.image_bits();
  return CellCodec(key_bits, static_cast<unsigned>(std::bit_width(sigma - 1)));
}

u128 CellCodec::encode(const Cell& c) const {
  if (!c.present) return 0;
  require(static_cast<u128>(c.key) >> key_bits_ == 0 && static_cast<u128>(c.value) >> value_bits_ == 0,
          ErrorCode::parameter_overflow, "cell field too wide");
  return 1 | (static_cast<u128>(c.key) << 1) | (static_cast<u128>(c.value) << (1 + key_bits_));
}

Cell CellCodec::decode(u128 record) const {
  Cell c;
  require(record >> width() == 0, ErrorCode::inconsistent_cell, "cell record too wide");
  if ((record & 1) == 0) {
    require(record == 0, ErrorCode::inconsistent_cell, "empty cell with payload");
    return c;
  }
  c.present = true;
  c.key = static_cast<uint64_t>((record >> 1) & mask128(key_bits_));
  c.value = static_cast<uint64_t>(record >> (1 + key_bits_));
  return c;
}

// ---------------------------------------------------------------------------

FksDigest build_fks(const SparseString& s, Rng& rng, uint64_t alpha, BuildStats* stats) {
  s.validate();
  const SparseString sorted = s.canonical();
  const std::vector<uint64_t> keys = sorted.positions();

  FksDigest digest;
  digest.top = build_top_hash(keys, universe_log(s.u), rng, alpha, stats);
  const TopHash& top = digest.top;
  const Assignment asg = assign_buckets(keys, top);
  const unsigned image_bits = top.image_bits();

  digest.arrays.b = asg.sizes;
  digest.arrays.B.resize(top.n);
  for (uint64_t i = 0; i < top.n; ++i) {
    digest.arrays.B[i] = build_bucket_hash(asg.bucket_images(i), image_bits, top.n);
  }

  CellTable& table = digest.table;
  table.offsets = cell_offsets(asg.sizes);
  table.cells.assign(table.offsets.back(), Cell{});
  for (uint64_t i = 0; i < top.n; ++i) {
    for (uint64_t j = asg.start[i]; j < asg.start[i + 1]; ++j) {
      const uint64_t x = asg.keys[j];
      const auto it = std::lower_bound(sorted.pairs.begin(), sorted.pairs.end(), KeyValue{x, 0});
      Cell& cell = table.cells[table.offsets[i] + digest.arrays.B[i](asg.images[j])];
      if (cell.present) throw std::logic_error("bucket hash is not injective");
      cell.present = true;
      cell.key = top.variant == Variant::large_universe ? x : asg.images[j];
      cell.value = it->value;
    }
  }
  return digest;
}

std::vector<uint64_t> receiver_rebuild_b(const SparseString& t, const TopHash& top) {
  std::vector<uint64_t> b(top.n, 0);
  if (top.n == 0) return b;
  for (const KeyValue& kv : t.pairs) ++b[top.place(kv.pos).bucket];
  return b;
}

std::vector<BucketHash> receiver_rebuild_B(const SparseString& t, const TopHash& top,
                                           std::span<const uint64_t> b_corrected,
                                           std::span<const uint64_t> b_own) {
  require(b_corrected.size() == top.n && b_own.size() == top.n, ErrorCode::invalid_argument,
          "bucket array length mismatch");
  std::vector<BucketHash> B(top.n);
  if (top.n == 0) return B;
  const Assignment asg = assign_buckets(t.positions(), top);
  const unsigned image_bits = top.image_bits();
  for (uint64_t i = 0; i < top.n; ++i) {
    if (b_corrected[i] == 0) continue;
    if (b_own[i] != b_corrected[i]) {
      B[i] = BucketHash::filler();
      continue;
    }
    const auto images = asg.bucket_images(i);
    if (std::adjacent_find(images.begin(), images.end()) != images.end()) {
      B[i] = BucketHash::filler();  // cannot be the sender's bucket
      continue;
    }
    B[i] = build_bucket_hash(images, image_bits, top.n);
  }
  return B;
}

CellTable receiver_rebuild_beta(const SparseString& t, const TopHash& top,
                                std::span<const uint64_t> b, std::span<const BucketHash> B) {
  require(b.size() == top.n && B.size() == top.n, ErrorCode::invalid_argument,
          "bucket array length mismatch");
  CellTable table;
  table.offsets = cell_offsets(b);
  table.cells.assign(table.offsets.back(), Cell{});
  if (top.n == 0) return table;
  // Ascending positions: the first key to reach a cell keeps it.
  const SparseString sorted = t.canonical();
  for (const KeyValue& kv : sorted.pairs) {
    const auto p = top.place(kv.pos);
    const BucketHash& h = B[p.bucket];
    if (b[p.bucket] == 0) continue;
    if (h.kind != BucketHash::Kind::large && h.kind != BucketHash::Kind::small) continue;
    const uint64_t slot = h(p.image);
    if (slot >= BucketHash::cells_for(b[p.bucket])) continue;
    Cell& cell = table.cells[table.offsets[p.bucket] + slot];
    if (cell.present) continue;
    cell.present = true;
    cell.key = top.variant == Variant::large_universe ? kv.pos : p.image;
    cell.value = kv.value;
  }
  return table;
}

SparseString extract_string(const CellTable& table, const TopHash& top, uint64_t u,
                            uint64_t sigma) {
  SparseString s;
  s.u = u;
  s.sigma = sigma;
  require(table.offsets.size() == top.n + 1 && table.offsets.back() == table.cells.size(),
          ErrorCode::inconsistent_cell, "cell table geometry mismatch");
  for (uint64_t i = 0; i < top.n; ++i) {
    for (uint64_t c = table.offsets[i]; c < table.offsets[i + 1]; ++c) {
      const Cell& cell = table.cells[c];
      if (!cell.present) continue;
      uint64_t x = cell.key;
      if (top.variant == Variant::small_universe) {
        const auto found = top.recover_position(i, cell.key);
        require(found.has_value(), ErrorCode::inconsistent_cell, "cell has no preimage");
        x = *found;
      }
      require(x < u && cell.value >= 1 && cell.value < sigma, ErrorCode::inconsistent_cell,
              "cell outside the universe or alphabet");
      const auto p = top.place(x);
      require(p.bucket == i && (top.variant == Variant::large_universe || p.image == cell.key),
              ErrorCode::inconsistent_cell, "cell in the wrong bucket");
      s.pairs.push_back({x, cell.value});
    }
  }
  require(s.pairs.size() == top.n, ErrorCode::inconsistent_cell, "cell count differs from n");
  std::vector<uint64_t> pos = s.positions();
  std::sort(pos.begin(), pos.end());
  require(std::adjacent_find(pos.begin(), pos.end()) == pos.end(), ErrorCode::inconsistent_cell,
          "duplicate position");
  return s;
}

}  // namespace hamsync
