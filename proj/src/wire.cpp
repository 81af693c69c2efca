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
#include <zlib.h>

#include <algorithm>
#include <cstring>

#include "hamsync/error.hpp"
#include "hamsync/protocol.hpp"

namespace hamsync {

namespace {

constexpr uint8_t kMagic[4] = {'H', 'S', 'Y', 'N'};
constexpr uint16_t kVersion = 1;
constexpr uint16_t kFlagSmallUniverse = 1;
constexpr uint16_t kFlagNoBudget = 2;

constexpr size_t kParamBytes = 8 + 1 + 8 + 8 + 8;
constexpr size_t kLargeTopBytes = 1 + 16 + 16 + 4 * 8;
constexpr size_t kSmallTopBytes = 8 + 8 + 6 * 8;
constexpr size_t kBlockHeaderBytes = 2 + 1 + 2 + 4;

class Writer {
 public:
  void bytes(const uint8_t* p, size_t len) { out_.insert(out_.end(), p, p + len); }
  void u8(uint8_t v) { out_.push_back(v); }
  void u16(uint16_t v) { le(v, 2); }
  void u32(uint32_t v) { le(v, 4); }
  void u64(uint64_t v) { le(v, 8); }
  void u128v(u128 v) {
    le(static_cast<uint64_t>(v), 8);
    le(static_cast<uint64_t>(v >> 64), 8);
  }
  std::vector<uint8_t>& data() { return out_; }

 private:
  void le(uint64_t v, int len) {
    for (int i = 0; i < len; ++i) out_.push_back(static_cast<uint8_t>(v >> (8 * i)));
  }
  std::vector<uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const uint8_t> in) : in_(in) {}

  size_t remaining() const { return in_.size() - pos_; }
  std::span<const uint8_t> take(size_t len) {
    require(len <= remaining(), ErrorCode::truncated, "truncated");
    auto s = in_.subspan(pos_, len);
    pos_ += len;
    return s;
  }
  uint8_t u8() { return static_cast<uint8_t>(le(1)); }
  uint16_t u16() { return static_cast<uint16_t>(le(2)); }
  uint32_t u32() { return static_cast<uint32_t>(le(4)); }
  uint64_t u64() { return le(8); }
  u128 u128v() {
    const uint64_t lo = le(8);
    return (static_cast<u128>(le(8)) << 64) | lo;
  }

 private:
  uint64_t le(int len) {
    const auto s = take(len);
    uint64_t v = 0;
    for (int i = len - 1; i >= 0; --i) v = (v << 8) | s[i];
    return v;
  }
  std::span<const uint8_t> in_;
  size_t pos_ = 0;
};

size_t stream_bytes(uint64_t k, unsigned chunk_bits) { return (2 * k * chunk_bits + 7) / 8; }

void write_block(Writer& w, const ChunkedRedundancy& red) {
  const size_t per_stream = stream_bytes(red.k, red.chunk_bits);
  w.u16(static_cast<uint16_t>(red.symbol_bits));
  w.u8(static_cast<uint8_t>(red.chunk_bits));
  w.u16(static_cast<uint16_t>(red.chunk_count()));
  w.u32(static_cast<uint32_t>(per_stream * red.chunk_count()));
  for (const auto& stream : red.streams) {
    std::vector<uint8_t> packed(per_stream, 0);
    uint64_t bit = 0;
    for (uint32_t sym : stream) {
      for (unsigned j = 0; j < red.chunk_bits; ++j, ++bit) {
        if ((sym >> j) & 1) packed[bit / 8] |= static_cast<uint8_t>(1u << (bit % 8));
      }
    }
    w.bytes(packed.data(), packed.size());
  }
}

ChunkedRedundancy read_block(Reader& r, uint64_t k) {
  ChunkedRedundancy red;
  red.k = k;
  red.symbol_bits = r.u16();
  red.chunk_bits = r.u8();
  const unsigned chunk_count = r.u16();
  const uint32_t byte_length = r.u32();
  require(red.symbol_bits >= 1 && red.symbol_bits <= 128, ErrorCode::malformed,
          "symbol width out of range");
  require(red.chunk_bits >= 4 && red.chunk_bits <= Gf2m::kMaxBits, ErrorCode::malformed,
          "chunk width out of range");
  require(chunk_count == red.chunk_count(), ErrorCode::malformed, "chunk count inconsistent");
  const size_t per_stream = stream_bytes(k, red.chunk_bits);
  require(byte_length == per_stream * chunk_count, ErrorCode::malformed,
          "block length inconsistent");
  const auto payload = r.take(byte_length);
  red.streams.resize(chunk_count);
  for (unsigned c = 0; c < chunk_count; ++c) {
    const auto bytes = payload.subspan(c * per_stream, per_stream);
    std::vector<uint32_t>& stream = red.streams[c];
    stream.assign(2 * k, 0);
    uint64_t bit = 0;
    for (uint32_t& sym : stream) {
      for (unsigned j = 0; j < red.chunk_bits; ++j, ++bit) {
        sym |= static_cast<uint32_t>((bytes[bit / 8] >> (bit % 8)) & 1) << j;
      }
    }
    for (; bit < 8 * per_stream; ++bit) {
      require(((bytes[bit / 8] >> (bit % 8)) & 1) == 0, ErrorCode::malformed,
              "non-zero stream padding");
    }
  }
  return red;
}

uint32_t crc_of(std::span<const uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  size_t done = 0;
  while (done < bytes.size()) {
    const auto len = static_cast<uInt>(std::min<size_t>(bytes.size() - done, 1u << 30));
    crc = crc32(crc, bytes.data() + done, len);
    done += len;
  }
  return static_cast<uint32_t>(crc);
}

void check_large_top(const TopHash& top, unsigned u_log) {
  require(top.g1.r == std::max(1u, u_log), ErrorCode::malformed, "g1 input width mismatch");
  require(top.g1.s == g1_out_bits(top.n), ErrorCode::malformed, "g1 output width mismatch");
  require(top.g1.width() <= 128, ErrorCode::malformed, "g1 too wide");
  require((top.g1.a & 1) == 1 && bit_width128(top.g1.a) <= top.g1.width() &&
              bit_width128(top.g1.b) <= top.g1.width(),
          ErrorCode::malformed, "g1 coefficients out of range");
  const unsigned s = top.g1.s;
  require(s <= 62 && top.g2.p >= (uint64_t{1} << s) && top.g2.p < (uint64_t{2} << s) &&
              is_prime(top.g2.p),
          ErrorCode::malformed, "modulus is not a prime of the expected size");
  require(top.g2.a < top.g2.p && top.g2.b < top.g2.p && top.g2.c < top.g2.p,
          ErrorCode::malformed, "g2 coefficients out of range");
}

void check_small_top(const TopHash& top, unsigned u_log, uint64_t q, uint64_t a) {
  require(u_log <= 62, ErrorCode::malformed, "universe too large");
  const uint64_t lo = small_universe_prime_floor(u_log);
  require(q >= lo && q <= 2 * lo && q < (uint64_t{1} << 32) && is_prime(q),
          ErrorCode::malformed, "field prime out of range");
  require(a >= 2 && a < q, ErrorCode::malformed, "non-residue out of range");
  for (const Fq2& e : {top.quad.a, top.quad.b, top.quad.c}) {
    require(e.hi < q && e.lo < q, ErrorCode::malformed, "coefficient out of range");
  }
  require(top.quad.a != Fq2{}, ErrorCode::malformed, "leading coefficient zero");
}

}  // namespace

uint64_t header_bit_size(const Message& msg) {
  const size_t top = msg.params.variant == Variant::small_universe ? kSmallTopBytes
                                                                   : kLargeTopBytes;
  return 8 * (kParamBytes + top);
}

uint64_t message_bit_size(const Message& msg) {
  return header_bit_size(msg) + msg.red_b.bit_size() + msg.red_B.bit_size() +
         msg.red_beta.bit_size();
}

std::vector<uint8_t> serialize(const Message& msg) {
  const ProblemParams& p = msg.params;
  Writer w;
  w.bytes(kMagic, 4);
  w.u16(kVersion);
  uint16_t flags = 0;
  if (p.variant == Variant::small_universe) flags |= kFlagSmallUniverse;
  if (p.k == 0) flags |= kFlagNoBudget;
  w.u16(flags);
  w.u64(p.u);
  w.u8(static_cast<uint8_t>(p.u_log));
  w.u64(p.sigma);
  w.u64(p.n);
  w.u64(p.k);
  const TopHash& top = msg.top;
  if (p.variant == Variant::large_universe) {
    w.u8(static_cast<uint8_t>(top.g1.r));
    w.u128v(top.g1.a);
    w.u128v(top.g1.b);
    w.u64(top.g2.p);
    w.u64(top.g2.a);
    w.u64(top.g2.b);
    w.u64(top.g2.c);
  } else {
    w.u64(top.field->q());
    w.u64(top.field->nonresidue());
    for (const Fq2& e : {top.quad.a, top.quad.b, top.quad.c}) {
      w.u64(e.hi);
      w.u64(e.lo);
    }
  }
  write_block(w, msg.red_b);
  write_block(w, msg.red_B);
  write_block(w, msg.red_beta);
  w.u32(crc_of(w.data()));
  return std::move(w.data());
}

Message deserialize(std::span<const uint8_t> bytes) {
  Reader r(bytes);
  const auto magic = r.take(4);
  require(std::memcmp(magic.data(), kMagic, 4) == 0, ErrorCode::bad_magic, "bad magic");
  require(r.u16() == kVersion, ErrorCode::unsupported_version, "unsupported version");
  const uint16_t flags = r.u16();
  require((flags & ~(kFlagSmallUniverse | kFlagNoBudget)) == 0, ErrorCode::malformed,
          "unknown flags");

  Message msg;
  ProblemParams& p = msg.params;
  p.u = r.u64();
  p.u_log = r.u8();
  p.sigma = r.u64();
  p.n = r.u64();
  p.k = r.u64();
  require(p.u >= 1 && p.u_log == universe_log(p.u), ErrorCode::malformed,
          "universe parameters inconsistent");
  require(p.sigma >= 2 && p.n <= p.u, ErrorCode::malformed, "sigma or n out of range");
  require(((flags & kFlagNoBudget) != 0) == (p.k == 0), ErrorCode::malformed,
          "budget flag inconsistent");
  require(p.k < (uint64_t{1} << Gf2m::kMaxBits), ErrorCode::malformed, "budget too large");
  p.variant = (flags & kFlagSmallUniverse) ? Variant::small_universe : Variant::large_universe;
  require(p.variant == choose_variant(p.u_log, p.n), ErrorCode::malformed,
          "variant flag inconsistent");

  TopHash& top = msg.top;
  top.variant = p.variant;
  top.n = p.n;
  top.u_log = p.u_log;
  if (p.variant == Variant::large_universe) {
    top.g1.r = r.u8();
    top.g1.s = g1_out_bits(p.n);
    top.g1.a = r.u128v();
    top.g1.b = r.u128v();
    top.g2.p = r.u64();
    top.g2.a = r.u64();
    top.g2.b = r.u64();
    top.g2.c = r.u64();
    check_large_top(top, p.u_log);
  } else {
    const uint64_t q = r.u64();
    const uint64_t a = r.u64();
    for (Fq2* e : {&top.quad.a, &top.quad.b, &top.quad.c}) {
      e->hi = r.u64();
      e->lo = r.u64();
    }
    check_small_top(top, p.u_log, q, a);
    try {
      top.field.emplace(PrimeField(q), a);
    } catch (const Error&) {
      fail(ErrorCode::malformed, "non-residue is a square");
    }
  }

  msg.red_b = read_block(r, p.k);
  msg.red_B = read_block(r, p.k);
  msg.red_beta = read_block(r, p.k);
  require(msg.red_b.chunk_bits == choose_chunk_bits(p.n, p.k, msg.red_b.symbol_bits) &&
              msg.red_B.chunk_bits == choose_chunk_bits(p.n, p.k, msg.red_B.symbol_bits),
          ErrorCode::malformed, "chunk width inconsistent with n and k");
  require(msg.red_b.symbol_bits <= 64 && msg.red_B.symbol_bits >= 3, ErrorCode::malformed,
          "array width out of range");
  require(msg.red_beta.symbol_bits == CellCodec::for_digest(top, p.sigma).width(),
          ErrorCode::malformed, "cell width inconsistent");

  const size_t body = bytes.size() - r.remaining();
  const uint32_t crc = r.u32();
  require(r.remaining() == 0, ErrorCode::malformed, "trailing bytes");
  require(crc == crc_of(bytes.first(body)), ErrorCode::checksum_mismatch, "checksum mismatch");
  return msg;
}

}  // namespace hamsync
