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
#include "hamsync/rs_codec.hpp"

#include <algorithm>

#include "hamsync/error.hpp"

namespace hamsync {

namespace {

// Polynomials below are stored lowest degree first.
using Poly = std::vector<uint32_t>;

void trim(Poly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

int degree(const Poly& p) { return static_cast<int>(p.size()) - 1; }

uint32_t eval(const Gf2m& f, const Poly& p, uint32_t x) {
  uint32_t acc = 0;
  for (size_t i = p.size(); i-- > 0;) acc = f.mul(acc, x) ^ p[i];
  return acc;
}

// Remainder of p modulo a non-zero m.
Poly poly_mod(const Gf2m& f, Poly p, const Poly& m) {
  const int dm = degree(m);
  const uint32_t lead_inv = f.inv(m.back());
  for (int i = degree(p); i >= dm; --i) {
    const uint32_t c = p[i];
    if (c == 0) continue;
    const uint32_t q = f.mul(c, lead_inv);
    for (int j = 0; j <= dm; ++j) p[i - dm + j] ^= f.mul(q, m[j]);
  }
  p.resize(std::min(p.size(), static_cast<size_t>(dm)));
  trim(p);
  return p;
}

Poly poly_div(const Gf2m& f, Poly p, const Poly& m) {
  const int dm = degree(m);
  const int dp = degree(p);
  if (dp < dm) return {};
  Poly quo(dp - dm + 1, 0);
  const uint32_t lead_inv = f.inv(m.back());
  for (int i = dp; i >= dm; --i) {
    const uint32_t c = p[i];
    if (c == 0) continue;
    const uint32_t q = f.mul(c, lead_inv);
    quo[i - dm] = q;
    for (int j = 0; j <= dm; ++j) p[i - dm + j] ^= f.mul(q, m[j]);
  }
  trim(quo);
  return quo;
}

Poly poly_gcd(const Gf2m& f, Poly a, Poly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Poly r = poly_mod(f, a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

// Tr(beta x) = sum_{j < m} (beta x)^(2^j), reduced modulo p.
Poly trace_mod(const Gf2m& f, uint32_t beta, const Poly& p) {
  Poly y = poly_mod(f, Poly{0, beta}, p);
  Poly acc = y;
  for (unsigned j = 1; j < f.m(); ++j) {
    Poly sq(y.empty() ? 0 : 2 * y.size() - 1, 0);
    for (size_t i = 0; i < y.size(); ++i) sq[2 * i] = f.mul(y[i], y[i]);
    y = poly_mod(f, std::move(sq), p);
    if (acc.size() < y.size()) acc.resize(y.size(), 0);
    for (size_t i = 0; i < y.size(); ++i) acc[i] ^= y[i];
  }
  trim(acc);
  return acc;
}

// Roots of a polynomial expected to split into distinct linear factors,
// found by splitting on the trace of alpha^i x for successive i. Any piece
// that cannot be split means the polynomial does not split that way.
bool split_roots(const Gf2m& f, const Poly& p, unsigned first, std::vector<uint32_t>& roots) {
  const int d = degree(p);
  if (d <= 0) return d == 0;
  if (d == 1) {
    roots.push_back(f.div(p[0], p[1]));
    return true;
  }
  for (unsigned i = first; i < f.m(); ++i) {
    const Poly g = poly_gcd(f, p, trace_mod(f, f.exp(i), p));
    const int dg = degree(g);
    if (dg <= 0 || dg >= d) continue;
    return split_roots(f, g, i + 1, roots) && split_roots(f, poly_div(f, p, g), i + 1, roots);
  }
  return false;
}

[[noreturn]] void uncorrectable() { fail(ErrorCode::uncorrectable, "uncorrectable"); }

}  // namespace

unsigned rs_field_bits(uint64_t length, uint64_t k) {
  return std::max(4u, static_cast<unsigned>(std::bit_width(length + 2 * k)));
}

unsigned choose_chunk_bits(uint64_t length, uint64_t k, unsigned symbol_bits) {
  const unsigned lowest = rs_field_bits(length, k);
  unsigned best = lowest;
  uint64_t best_cost = ~uint64_t{0};
  for (unsigned m = lowest; m <= std::max(lowest, kMaxSliceBits); ++m) {
    const uint64_t cost = uint64_t{(symbol_bits + m - 1) / m} * m;
    if (cost <= best_cost) {
      best = m;
      best_cost = cost;
    }
  }
  return best;
}

RsCode::RsCode(uint64_t length, uint64_t k, unsigned m)
    : length_(length), k_(k), field_(&Gf2m::get(m)) {
  require(length + 2 * k <= field_->order() && k <= field_->order(),
          ErrorCode::parameter_overflow, "code length exceeds the field");
  gen_ = {1};
  for (uint64_t i = 1; i <= 2 * k; ++i) {
    const uint32_t root = field_->exp(i);
    gen_.push_back(0);
    for (size_t j = gen_.size() - 1; j > 0; --j) gen_[j] ^= field_->mul(gen_[j - 1], root);
  }
  const size_t checks = 2 * k;
  const unsigned groups = (m + 3) / 4;
  nibble_rows_.assign(groups * 16 * checks, 0);
  for (unsigned g = 0; g < groups; ++g) {
    for (uint32_t v = 1; v < 16; ++v) {
      const uint32_t value = v << (4 * g);
      if (value >= field_->size()) break;
      uint32_t* row = &nibble_rows_[(g * 16 + v) * checks];
      for (size_t t = 0; t < checks; ++t) row[t] = field_->mul(gen_[t + 1], value);
    }
  }
}

void RsCode::check_symbols(std::span<const uint32_t> symbols) const {
  for (uint32_t s : symbols) {
    require(s < field_->size(), ErrorCode::symbol_out_of_field, "symbol out of field");
  }
}

namespace {

// reg[head..] ^= sum of the selected rows, with the register stored as a
// ring starting at `head`.
template <unsigned Groups>
void lfsr_run(std::span<const uint32_t> data, const uint32_t* rows, size_t checks,
              uint32_t* reg) {
  const uint32_t* zero = rows;  // row for nibble 0 is all zeros
  size_t head = 0;
  for (uint32_t d : data) {
    const uint32_t fb = d ^ reg[head];
    reg[head] = 0;
    head = head + 1 == checks ? 0 : head + 1;
    if (fb == 0) continue;
    const uint32_t* p[Groups];
    for (unsigned g = 0; g < Groups; ++g) {
      const uint32_t v = (fb >> (4 * g)) & 15;
      p[g] = v == 0 ? zero : rows + (g * 16 + v) * checks;
    }
    const size_t first = checks - head;
    uint32_t* __restrict r = reg + head;
    for (size_t t = 0; t < first; ++t) {
      uint32_t x = 0;
      for (unsigned g = 0; g < Groups; ++g) x ^= p[g][t];
      r[t] ^= x;
    }
    r = reg;
    for (size_t t = first; t < checks; ++t) {
      uint32_t x = 0;
      for (unsigned g = 0; g < Groups; ++g) x ^= p[g][t];
      r[t - first] ^= x;
    }
  }
  std::rotate(reg, reg + head, reg + checks);
}

}  // namespace

std::vector<uint32_t> RsCode::encode_redundancy(std::span<const uint32_t> data) const {
  require(data.size() == length_, ErrorCode::invalid_argument, "data length mismatch");
  check_symbols(data);
  const size_t checks = 2 * k_;
  std::vector<uint32_t> reg(checks, 0);
  if (checks == 0) return reg;
  const uint32_t* rows = nibble_rows_.data();
  switch ((m() + 3) / 4) {
    case 1: lfsr_run<1>(data, rows, checks, reg.data()); break;
    case 2: lfsr_run<2>(data, rows, checks, reg.data()); break;
    case 3: lfsr_run<3>(data, rows, checks, reg.data()); break;
    case 4: lfsr_run<4>(data, rows, checks, reg.data()); break;
    case 5: lfsr_run<5>(data, rows, checks, reg.data()); break;
    default: lfsr_run<6>(data, rows, checks, reg.data()); break;
  }
  return reg;
}

std::vector<uint32_t> RsCode::correct(std::span<const uint32_t> data,
                                      std::span<const uint32_t> redundancy,
                                      uint64_t* corrections) const {
  require(redundancy.size() == 2 * k_, ErrorCode::invalid_argument, "redundancy length mismatch");
  check_symbols(redundancy);
  std::vector<uint32_t> out(data.begin(), data.end());
  if (corrections) *corrections = 0;
  if (k_ == 0) {
    require(data.size() == length_, ErrorCode::invalid_argument, "data length mismatch");
    check_symbols(data);
    return out;
  }

  const Gf2m& f = *field_;
  const size_t checks = 2 * k_;
  std::vector<uint32_t> diff = encode_redundancy(data);
  bool clean = true;
  for (size_t t = 0; t < checks; ++t) {
    diff[t] ^= redundancy[t];
    clean = clean && diff[t] == 0;
  }
  if (clean) return out;

  // The codeword's syndromes equal the difference remainder evaluated at
  // the generator roots.
  Poly syn(checks, 0);
  for (size_t j = 0; j < checks; ++j) {
    const uint32_t x = f.exp(j + 1);
    uint32_t acc = 0;
    for (size_t t = 0; t < checks; ++t) acc = f.mul(acc, x) ^ diff[t];
    syn[j] = acc;
  }

  // Berlekamp-Massey.
  Poly lambda{1};
  Poly prev{1};
  size_t len = 0;
  size_t shift = 1;
  uint32_t prev_d = 1;
  for (size_t i = 0; i < checks; ++i) {
    uint32_t d = syn[i];
    for (size_t j = 1; j <= len && j < lambda.size(); ++j) d ^= f.mul(lambda[j], syn[i - j]);
    if (d == 0) {
      ++shift;
      continue;
    }
    const uint32_t coef = f.div(d, prev_d);
    Poly next = lambda;
    if (next.size() < prev.size() + shift) next.resize(prev.size() + shift, 0);
    for (size_t j = 0; j < prev.size(); ++j) next[j + shift] ^= f.mul(coef, prev[j]);
    if (2 * len <= i) {
      prev = std::move(lambda);
      len = i + 1 - len;
      prev_d = d;
      shift = 1;
    } else {
      ++shift;
    }
    lambda = std::move(next);
  }
  trim(lambda);
  if (len > k_ || degree(lambda) != static_cast<int>(len)) uncorrectable();

  std::vector<uint32_t> roots;
  if (!split_roots(f, lambda, 0, roots) || roots.size() != len) uncorrectable();

  // Omega = S * Lambda mod x^(2k); Y = Omega(X^-1) / Lambda'(X^-1).
  Poly omega(checks, 0);
  for (size_t i = 0; i < lambda.size(); ++i) {
    if (lambda[i] == 0) continue;
    for (size_t j = 0; i + j < checks; ++j) omega[i + j] ^= f.mul(lambda[i], syn[j]);
  }
  Poly deriv(lambda.size() > 1 ? lambda.size() - 1 : 0, 0);
  for (size_t i = 1; i < lambda.size(); i += 2) deriv[i - 1] = lambda[i];

  std::vector<uint32_t> locators;
  std::vector<uint32_t> magnitudes;
  for (uint32_t root : roots) {
    const uint32_t x = f.inv(root);
    const uint64_t e = f.log(x);
    if (e < checks || e >= checks + length_) uncorrectable();
    const uint32_t denom = eval(f, deriv, root);
    if (denom == 0) uncorrectable();
    const uint32_t y = f.div(eval(f, omega, root), denom);
    if (y == 0) uncorrectable();
    locators.push_back(x);
    magnitudes.push_back(y);
    out[length_ - 1 - (e - checks)] ^= y;
  }

  std::vector<uint32_t> power = locators;
  for (size_t j = 0; j < checks; ++j) {
    uint32_t acc = 0;
    for (size_t l = 0; l < locators.size(); ++l) {
      acc ^= f.mul(magnitudes[l], power[l]);
      power[l] = f.mul(power[l], locators[l]);
    }
    if (acc != syn[j]) uncorrectable();
  }
  if (corrections) *corrections = len;
  return out;
}

// ---------------------------------------------------------------------------

ChunkedRedundancy chunked_encode(std::span<const u128> symbols, unsigned symbol_bits,
                                 uint64_t k) {
  return chunked_encode(symbols, symbol_bits, k,
                        choose_chunk_bits(symbols.size(), k, symbol_bits));
}

ChunkedRedundancy chunked_encode(std::span<const u128> symbols, unsigned symbol_bits,
                                 uint64_t k, unsigned chunk_bits) {
  require(symbol_bits >= 1 && symbol_bits <= 128, ErrorCode::parameter_overflow,
          "symbol width out of range");
  for (u128 v : symbols) {
    require(v >> 1 >> (symbol_bits - 1) == 0, ErrorCode::out_of_range, "value out of range");
  }
  const RsCode code(symbols.size(), k, chunk_bits);
  ChunkedRedundancy red;
  red.symbol_bits = symbol_bits;
  red.chunk_bits = chunk_bits;
  red.k = k;
  red.streams.resize(red.chunk_count());
  std::vector<uint32_t> slice(symbols.size());
  for (unsigned c = 0; c < red.chunk_count(); ++c) {
    if (k == 0) continue;
    for (size_t i = 0; i < symbols.size(); ++i) {
      slice[i] = static_cast<uint32_t>((symbols[i] >> (c * chunk_bits)) & mask128(chunk_bits));
    }
    red.streams[c] = code.encode_redundancy(slice);
  }
  return red;
}

std::vector<u128> chunked_correct(std::span<const u128> symbols, const ChunkedRedundancy& red,
                                  uint64_t* corrections) {
  require(red.symbol_bits >= 1 && red.symbol_bits <= 128, ErrorCode::parameter_overflow,
          "symbol width out of range");
  require(red.streams.size() == red.chunk_count(), ErrorCode::invalid_argument,
          "stream count mismatch");
  for (u128 v : symbols) {
    require(v >> 1 >> (red.symbol_bits - 1) == 0, ErrorCode::out_of_range,
            "value out of range");
  }
  std::vector<u128> out(symbols.begin(), symbols.end());
  if (corrections) *corrections = 0;
  if (red.k == 0) return out;

  const RsCode code(symbols.size(), red.k, red.chunk_bits);
  std::vector<uint32_t> slice(symbols.size());
  for (unsigned c = 0; c < red.chunk_count(); ++c) {
    const unsigned shift = c * red.chunk_bits;
    const u128 field_mask = mask128(red.chunk_bits);
    for (size_t i = 0; i < symbols.size(); ++i) {
      slice[i] = static_cast<uint32_t>((symbols[i] >> shift) & field_mask);
    }
    uint64_t fixed = 0;
    const std::vector<uint32_t> repaired = code.correct(slice, red.streams[c], &fixed);
    if (fixed == 0) continue;
    for (size_t i = 0; i < symbols.size(); ++i) {
      if (repaired[i] == slice[i]) continue;
      out[i] = (out[i] & ~(field_mask << shift)) | (static_cast<u128>(repaired[i]) << shift);
    }
  }
  for (u128 v : out) {
    require(v >> 1 >> (red.symbol_bits - 1) == 0, ErrorCode::uncorrectable, "uncorrectable");
  }
  if (corrections) {
    for (size_t i = 0; i < out.size(); ++i) *corrections += out[i] != symbols[i];
  }
  return out;
}

}  // namespace hamsync
