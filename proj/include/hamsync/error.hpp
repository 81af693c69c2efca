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

#include <stdexcept>
#include <string>

namespace hamsync {

enum class ErrorCode {
  invalid_argument,
  no_prime_found,
  zero_inverse,
  not_odd_prime,
  leading_coefficient_zero,
  out_of_range,
  undefined_on_zero,
  chunk_too_wide,
  null_bucket,
  symbol_out_of_field,
  uncorrectable,
  parameter_overflow,
  bad_magic,
  unsupported_version,
  truncated,
  checksum_mismatch,
  malformed,
  inconsistent_cell,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool condition, ErrorCode code, const char* what) {
  if (!condition) fail(code, what);
}

}  // namespace hamsync
