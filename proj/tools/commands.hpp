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
#include <iosfwd>
#include <string>
#include <utility>

#include "hamsync/error.hpp"
#include "hamsync/fks_digest.hpp"

namespace hamsync::cli {

enum Exit : int {
  kOk = 0,
  kDiffer = 1,
  kUsage = 2,
  kOverflow = 3,
  kUncorrectable = 4,
};

int exit_code_for(ErrorCode code);

struct GenParams {
  uint64_t u = 0;
  uint64_t sigma = 2;
  uint64_t n = 0;
  uint64_t k = 0;
  uint64_t d = 0;
  uint64_t seed = 1;
};

/// s with exactly n non-zeros and t at distance exactly d from it, split
/// among value changes, removals and additions.
std::pair<SparseString, SparseString> generate_instance(const GenParams& p);

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hamsync::cli
