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
#include <memory>
#include <optional>
#include <utility>

#include "hamsync/word.hpp"

namespace hamsync {

// Deterministic Miller-Rabin; exact for every 64-bit input.
bool is_prime(uint64_t x);

/// Las Vegas prime search in [lo, hi]: random probes first, then an
/// exhaustive ascending scan. Throws ErrorCode::no_prime_found only when the
/// interval holds no prime at all.
uint64_t find_prime_in(uint64_t lo, uint64_t hi, Rng& rng);

uint64_t mul_mod(uint64_t a, uint64_t b, uint64_t m);
uint64_t pow_mod(uint64_t base, uint64_t exp, uint64_t m);

using RootPair = std::pair<uint64_t, uint64_t>;

/// Arithmetic in F_q. Small moduli (q below the table limit) answer
/// inversion and square roots from lookup tables; larger ones fall back to
/// extended Euclid and Tonelli-Shanks. Immutable and cheap to copy.
class PrimeField {
 public:
  static constexpr uint64_t kDefaultTableLimit = uint64_t{1} << 20;

  explicit PrimeField(uint64_t q, uint64_t table_limit = kDefaultTableLimit);

  uint64_t modulus() const { return q_; }
  bool has_tables() const { return tables_ != nullptr; }

  uint64_t reduce(uint64_t x) const { return div_.remainder(x); }
  uint64_t add(uint64_t a, uint64_t b) const {
    const uint64_t s = a + b;
    return (s >= q_ || s < a) ? s - q_ : s;
  }
  uint64_t sub(uint64_t a, uint64_t b) const { return a >= b ? a - b : a + (q_ - b); }
  uint64_t neg(uint64_t a) const { return a == 0 ? 0 : q_ - a; }
  uint64_t mul(uint64_t a, uint64_t b) const { return mul_mod(a, b, q_); }

  uint64_t inv(uint64_t x) const;
  bool is_square(uint64_t x) const;

  /// Both square roots (r, q - r) with r <= q - r, (0, 0) for zero, or
  /// nothing for a non-residue.
  std::optional<RootPair> sqrt(uint64_t x) const;

 private:
  struct Tables;

  uint64_t inv_slow(uint64_t x) const;
  std::optional<uint64_t> sqrt_slow(uint64_t x) const;

  uint64_t q_;
  Divider div_;
  std::shared_ptr<const Tables> tables_;
};

/// Smallest A >= 2 with A^((q-1)/2) = -1 mod q.
uint64_t find_qnr(const PrimeField& field);

/// Element x1*g + x0 of F_{q^2} = F_q[g]/(g^2 - A).
struct Fq2 {
  uint64_t hi = 0;
  uint64_t lo = 0;

  friend bool operator==(const Fq2&, const Fq2&) = default;
};

using Fq2Pair = std::pair<Fq2, Fq2>;

Fq2 int_to_fq2(uint64_t q, uint64_t x);
uint64_t fq2_to_int(uint64_t q, Fq2 e);

class QuadExtField {
 public:
  /// Verifies that `nonresidue` has no square root in the base field.
  QuadExtField(PrimeField base, uint64_t nonresidue);

  /// Base field over q with the canonical (smallest) non-residue.
  static QuadExtField for_prime(uint64_t q);

  const PrimeField& base() const { return base_; }
  uint64_t q() const { return base_.modulus(); }
  uint64_t nonresidue() const { return a_; }
  uint64_t order() const { return q() * q(); }

  Fq2 from_int(uint64_t x) const;
  uint64_t to_int(Fq2 e) const { return e.hi * q() + e.lo; }
  bool valid(Fq2 e) const { return e.hi < q() && e.lo < q(); }

  Fq2 add(Fq2 x, Fq2 y) const { return {base_.add(x.hi, y.hi), base_.add(x.lo, y.lo)}; }
  Fq2 sub(Fq2 x, Fq2 y) const { return {base_.sub(x.hi, y.hi), base_.sub(x.lo, y.lo)}; }
  Fq2 neg(Fq2 x) const { return {base_.neg(x.hi), base_.neg(x.lo)}; }
  Fq2 mul(Fq2 x, Fq2 y) const;
  Fq2 scale(Fq2 x, uint64_t c) const { return {base_.mul(x.hi, c), base_.mul(x.lo, c)}; }
  Fq2 inv(Fq2 x) const;

  /// Norm x * x^q = x0^2 - A x1^2, an element of the base field.
  uint64_t norm(Fq2 x) const;

  /// Both roots ordered by integer encoding, or nothing for a non-residue.
  std::optional<Fq2Pair> sqrt(Fq2 x) const;

  /// Solutions of a X^2 + b X + c = v ordered by integer encoding (equal for
  /// a double root), or nothing when the discriminant is a non-residue.
  std::optional<Fq2Pair> solve_quadratic(Fq2 a, Fq2 b, Fq2 c, Fq2 v) const;

  friend bool operator==(const QuadExtField& x, const QuadExtField& y) {
    return x.q() == y.q() && x.a_ == y.a_;
  }

 private:
  PrimeField base_;
  uint64_t a_;
  Divider q_div_;
};

}  // namespace hamsync
