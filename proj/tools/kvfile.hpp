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

#include <iosfwd>
#include <string>

#include "hamsync/fks_digest.hpp"

namespace hamsync::cli {

// Text form of a sparse string:
//   u=<u> sigma=<sigma>
//   <position> <value>
//   ...
SparseString parse_kv(std::istream& in);
void write_kv(std::ostream& out, const SparseString& s);

SparseString read_kv_file(const std::string& path);
void write_kv_file(const std::string& path, const SparseString& s);

/// Decimal or 2^e.
uint64_t parse_number(const std::string& text);

}  // namespace hamsync::cli
