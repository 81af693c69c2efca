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
#include "kvfile.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "hamsync/error.hpp"

namespace hamsync::cli {

namespace {

uint64_t parse_decimal(std::string_view text, const char* what) {
  uint64_t v = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end) {
    fail(ErrorCode::malformed, std::string("bad ") + what + ": '" + std::string(text) + "'");
  }
  return v;
}

uint64_t parse_field(std::string_view token, std::string_view key) {
  if (token.size() <= key.size() + 1 || token.substr(0, key.size()) != key ||
      token[key.size()] != '=') {
    fail(ErrorCode::malformed, "bad header field, expected " + std::string(key) + "=");
  }
  return parse_number(std::string(token.substr(key.size() + 1)));
}

}  // namespace

uint64_t parse_number(const std::string& text) {
  const auto caret = text.find('^');
  if (caret == std::string::npos) return parse_decimal(text, "number");
  const uint64_t base = parse_decimal(std::string_view(text).substr(0, caret), "number");
  const uint64_t exp = parse_decimal(std::string_view(text).substr(caret + 1), "exponent");
  require(base == 2 && exp <= 63, ErrorCode::malformed, "only 2^e with e <= 63 is supported");
  return uint64_t{1} << exp;
}

SparseString parse_kv(std::istream& in) {
  SparseString s;
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::malformed, "missing header");
  {
    std::istringstream header(line);
    std::string u_tok, sigma_tok, extra;
    header >> u_tok >> sigma_tok;
    require(!(header >> extra), ErrorCode::malformed, "trailing header fields");
    s.u = parse_field(u_tok, "u");
    s.sigma = parse_field(sigma_tok, "sigma");
  }
  uint64_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream body(line);
    std::string pos_tok, value_tok, extra;
    body >> pos_tok >> value_tok;
    if (value_tok.empty() || (body >> extra)) {
      fail(ErrorCode::malformed, "line " + std::to_string(line_no) + ": expected '<pos> <value>'");
    }
    s.pairs.push_back({parse_decimal(pos_tok, "position"), parse_decimal(value_tok, "value")});
  }
  try {
    s.validate();
  } catch (const Error& e) {
    fail(ErrorCode::malformed, e.what());
  }
  return s;
}

void write_kv(std::ostream& out, const SparseString& s) {
  out << "u=" << s.u << " sigma=" << s.sigma << '\n';
  for (const KeyValue& kv : s.canonical().pairs) out << kv.pos << ' ' << kv.value << '\n';
}

SparseString read_kv_file(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::malformed, ("cannot open " + path).c_str());
  return parse_kv(in);
}

void write_kv_file(const std::string& path, const SparseString& s) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::invalid_argument, ("cannot write " + path).c_str());
  write_kv(out, s);
}

}  // namespace hamsync::cli
