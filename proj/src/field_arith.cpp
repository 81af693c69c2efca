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
#include "hamsync/field_arith.hpp"

#include <algorithm>
#include <array>
#include <vector>

#include "hamsync/error.hpp"

namespace hamsync {

uint64_t mul_mod(uint64_t a, uint64_t b, uint64_t m) {
  return static_cast<uint64_t>(static_cast<u128>(a) * b % m);
}

uint64_t pow_mod(uint64_t base, uint64_t exp, uint64_t m) {
  uint64_t result = 1 % m;
  base %= m;
  while (exp != 0) {
    if (exp & 1) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1;
  }
  return result;
}

bool is_prime(uint64_t x) {
  if (x < 2) return false;
  static constexpr std::array<uint64_t, 12> kWitnesses = {2, 3, 5, 7, 11, 13,
                                                          17, 19, 23, 29, 31, 37};
  for (uint64_t p : kWitnesses) {
    if (x % p == 0) return x == p;
  }
  uint64_t d = x - 1;
  unsigned s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (uint64_t a : kWitnesses) {
    uint64_t y = pow_mod(a, d, x);
    if (y == 1 || y == x - 1) continue;
    bool composite = true;
    for (unsigned r = 1; r < s; ++r) {
      y = mul_mod(y, y, x);
      if (y == x - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

uint64_t find_prime_in(uint64_t lo, uint64_t hi, Rng& rng) {
  require(lo <= hi, ErrorCode::invalid_argument, "empty prime search interval");
  const unsigned budget = 32 * (static_cast<unsigned>(std::bit_width(hi)) + 1);
  for (unsigned trial = 0; trial < budget; ++trial) {
    const uint64_t candidate = uniform_between(rng, lo, hi);
    if (is_prime(candidate)) return candidate;
  }
  for (uint64_t x = lo;; ++x) {
    if (is_prime(x)) return x;
    if (x == hi) break;
  }
  fail(ErrorCode::no_prime_found, "no prime found");
}

struct PrimeField::Tables {
  static constexpr uint32_t kNone = ~uint32_t{0};
  std::vector<uint32_t> inverse;
  std::vector<uint32_t> root;  // smaller square root, or kNone
};

PrimeField::PrimeField(uint64_t q, uint64_t table_limit) : q_(q), div_(q) {
  require(is_prime(q), ErrorCode::invalid_argument, "field modulus is not prime");
  if (q >= table_limit || q >= Tables::kNone) return;

  auto tables = std::make_shared<Tables>();
  tables->inverse.assign(q, 0);
  if (q > 1) tables->inverse[1] = 1;
  for (uint64_t i = 2; i < q; ++i) {
    const uint64_t t = (q / i) * tables->inverse[q % i] % q;
    tables->inverse[i] = static_cast<uint32_t>(t == 0 ? 0 : q - t);
  }
  tables->root.assign(q, Tables::kNone);
  for (uint64_t y = 0; y <= q / 2; ++y) {
    auto& slot = tables->root[y * y % q];
    if (slot == Tables::kNone) slot = static_cast<uint32_t>(y);
  }
  tables_ = std::move(tables);
}

uint64_t PrimeField::inv(uint64_t x) const {
  require(x != 0, ErrorCode::zero_inverse, "zero has no inverse");
  if (tables_) return tables_->inverse[x];
  return inv_slow(x);
}

uint64_t PrimeField::inv_slow(uint64_t x) const {
  // Extended Euclid on signed 128-bit to stay clear of overflow.
  i128 r0 = q_, r1 = x, t0 = 0, t1 = 1;
  while (r1 != 0) {
    const i128 quo = r0 / r1;
    const i128 r2 = r0 - quo * r1;
    r0 = r1;
    r1 = r2;
    const i128 t2 = t0 - quo * t1;
    t0 = t1;
    t1 = t2;
  }
  if (t0 < 0) t0 += q_;
  return static_cast<uint64_t>(t0);
}

bool PrimeField::is_square(uint64_t x) const {
  if (x == 0 || q_ == 2) return true;
  if (tables_) return tables_->root[x] != Tables::kNone;
  return pow_mod(x, (q_ - 1) / 2, q_) == 1;
}

std::optional<RootPair> PrimeField::sqrt(uint64_t x) const {
  if (x == 0) return RootPair{0, 0};
  std::optional<uint64_t> root;
  if (tables_) {
    if (tables_->root[x] != Tables::kNone) root = tables_->root[x];
  } else {
    root = sqrt_slow(x);
  }
  if (!root) return std::nullopt;
  const uint64_t other = neg(*root);
  return RootPair{std::min(*root, other), std::max(*root, other)};
}

std::optional<uint64_t> PrimeField::sqrt_slow(uint64_t x) const {
  if (q_ == 2) return x;
  if (!is_square(x)) return std::nullopt;
  // Tonelli-Shanks.
  uint64_t s = 0, d = q_ - 1;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  uint64_t z = 2;
  while (pow_mod(z, (q_ - 1) / 2, q_) != q_ - 1) ++z;
  uint64_t m = s;
  uint64_t c = pow_mod(z, d, q_);
  uint64_t t = pow_mod(x, d, q_);
  uint64_t r = pow_mod(x, (d + 1) / 2, q_);
  while (t != 1) {
    uint64_t i = 0, t2 = t;
    while (t2 != 1) {
      t2 = mul(t2, t2);
      ++i;
    }
    uint64_t b = c;
    for (uint64_t j = 0; j + 1 < m - i; ++j) b = mul(b, b);
    m = i;
    c = mul(b, b);
    t = mul(t, c);
    r = mul(r, b);
  }
  return r;
}

uint64_t find_qnr(const PrimeField& field) {
  const uint64_t q = field.modulus();
  require(q != 2, ErrorCode::not_odd_prime, "modulus must be odd prime");
  for (uint64_t a = 2; a < q; ++a) {
    if (pow_mod(a, (q - 1) / 2, q) == q - 1) return a;
  }
  fail(ErrorCode::not_odd_prime, "modulus must be odd prime");
}

Fq2 int_to_fq2(uint64_t q, uint64_t x) {
  require(static_cast<u128>(x) < static_cast<u128>(q) * q, ErrorCode::out_of_range,
          "out of range");
  return {x / q, x % q};
}

uint64_t fq2_to_int(uint64_t q, Fq2 e) {
  require(e.hi < q && e.lo < q, ErrorCode::out_of_range, "out of range");
  return e.hi * q + e.lo;
}

QuadExtField::QuadExtField(PrimeField base, uint64_t nonresidue)
    : base_(std::move(base)), a_(nonresidue), q_div_(base_.modulus()) {
  require(base_.modulus() != 2, ErrorCode::not_odd_prime, "modulus must be odd prime");
  require(static_cast<u128>(base_.modulus()) * base_.modulus() <= ~uint64_t{0},
          ErrorCode::parameter_overflow, "q^2 exceeds 64 bits");
  require(nonresidue < base_.modulus() && !base_.is_square(nonresidue),
          ErrorCode::invalid_argument, "extension constant must be a non-residue");
}

QuadExtField QuadExtField::for_prime(uint64_t q) {
  PrimeField base(q);
  const uint64_t a = find_qnr(base);
  return QuadExtField(std::move(base), a);
}

Fq2 QuadExtField::from_int(uint64_t x) const {
  require(x < order(), ErrorCode::out_of_range, "out of range");
  Fq2 e;
  q_div_.divide(x, e.hi, e.lo);
  return e;
}

Fq2 QuadExtField::mul(Fq2 x, Fq2 y) const {
  const uint64_t hh = base_.mul(x.hi, y.hi);
  const uint64_t ll = base_.mul(x.lo, y.lo);
  const uint64_t hl = base_.add(base_.mul(x.hi, y.lo), base_.mul(x.lo, y.hi));
  return {hl, base_.add(ll, base_.mul(hh, a_))};
}

uint64_t QuadExtField::norm(Fq2 x) const {
  return base_.sub(base_.mul(x.lo, x.lo), base_.mul(a_, base_.mul(x.hi, x.hi)));
}

Fq2 QuadExtField::inv(Fq2 x) const {
  require(x != Fq2{}, ErrorCode::zero_inverse, "zero has no inverse");
  const uint64_t n_inv = base_.inv(norm(x));
  return {base_.mul(base_.neg(x.hi), n_inv), base_.mul(x.lo, n_inv)};
}

std::optional<Fq2Pair> QuadExtField::sqrt(Fq2 x) const {
  auto ordered = [this](Fq2 w) {
    const Fq2 other = neg(w);
    return to_int(w) <= to_int(other) ? Fq2Pair{w, other} : Fq2Pair{other, w};
  };
  if (x == Fq2{}) return Fq2Pair{};

  if (x.hi == 0) {
    if (auto r = base_.sqrt(x.lo)) return ordered({0, r->first});
    // x.lo / A is a residue because both are non-residues.
    const auto r = base_.sqrt(base_.mul(x.lo, base_.inv(a_)));
    return ordered({r->first, 0});
  }

  const auto root_norm = base_.sqrt(norm(x));
  if (!root_norm) return std::nullopt;
  const uint64_t half = base_.inv(2);
  for (uint64_t nn : {root_norm->first, root_norm->second}) {
    const auto w0 = base_.sqrt(base_.mul(base_.add(x.lo, nn), half));
    if (!w0 || w0->first == 0) continue;
    const uint64_t w1 = base_.mul(x.hi, base_.inv(base_.add(w0->first, w0->first)));
    const Fq2 w{w1, w0->first};
    if (mul(w, w) == x) return ordered(w);
  }
  return std::nullopt;
}

std::optional<Fq2Pair> QuadExtField::solve_quadratic(Fq2 a, Fq2 b, Fq2 c, Fq2 v) const {
  require(a != Fq2{}, ErrorCode::leading_coefficient_zero, "leading coefficient zero");
  const Fq2 four_a = scale(a, 4 % q());
  const Fq2 disc = sub(mul(b, b), mul(four_a, sub(c, v)));
  const auto root = sqrt(disc);
  if (!root) return std::nullopt;
  const Fq2 inv_2a = inv(add(a, a));
  const Fq2 neg_b = neg(b);
  const Fq2 x0 = mul(add(neg_b, root->first), inv_2a);
  const Fq2 x1 = mul(sub(neg_b, root->first), inv_2a);
  if (to_int(x0) <= to_int(x1)) return Fq2Pair{x0, x1};
  return Fq2Pair{x1, x0};
}

}  // namespace hamsync
