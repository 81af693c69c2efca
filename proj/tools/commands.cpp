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
#include "commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "hamsync/protocol.hpp"
#include "kvfile.hpp"

namespace hamsync::cli {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::parameter_overflow: return kOverflow;
    case ErrorCode::uncorrectable:
    case ErrorCode::inconsistent_cell: return kUncorrectable;
    default: return kUsage;
  }
}

namespace {

uint64_t splitmix(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<uint64_t> sample_distinct(uint64_t u, uint64_t count, Rng& rng) {
  // Floyd's algorithm.
  std::unordered_set<uint64_t> chosen;
  chosen.reserve(count * 2);
  std::vector<uint64_t> out;
  out.reserve(count);
  for (uint64_t j = u - count; j < u; ++j) {
    const uint64_t t = uniform_between(rng, 0, j);
    const uint64_t pick = chosen.count(t) ? j : t;
    chosen.insert(pick);
    out.push_back(pick);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<uint64_t> sample_free(uint64_t u, const std::vector<uint64_t>& taken, uint64_t count,
                                  Rng& rng) {
  std::vector<uint64_t> out;
  if (count == 0) return out;
  if (u <= (uint64_t{1} << 26)) {
    std::vector<uint64_t> free;
    free.reserve(u - taken.size());
    size_t j = 0;
    for (uint64_t x = 0; x < u; ++x) {
      if (j < taken.size() && taken[j] == x) {
        ++j;
      } else {
        free.push_back(x);
      }
    }
    for (uint64_t i = 0; i < count; ++i) {
      std::swap(free[i], free[i + uniform_below(rng, free.size() - i)]);
      out.push_back(free[i]);
    }
    return out;
  }
  std::unordered_set<uint64_t> seen(taken.begin(), taken.end());
  while (out.size() < count) {
    const uint64_t x = uniform_below(rng, u);
    if (seen.insert(x).second) out.push_back(x);
  }
  return out;
}

uint64_t other_value(uint64_t v, uint64_t sigma, Rng& rng) {
  const uint64_t w = uniform_between(rng, 1, sigma - 2);
  return w >= v ? w + 1 : w;
}

}  // namespace

std::pair<SparseString, SparseString> generate_instance(const GenParams& p) {
  require(p.u >= 1 && p.sigma >= 2 && p.n <= p.u && p.d <= p.k && p.k <= p.u,
          ErrorCode::invalid_argument, "need sigma >= 2, n <= u and d <= k <= u");
  Rng rng(p.seed);
  SparseString s;
  s.u = p.u;
  s.sigma = p.sigma;
  for (uint64_t x : sample_distinct(p.u, p.n, rng)) {
    s.pairs.push_back({x, uniform_between(rng, 1, p.sigma - 1)});
  }

  uint64_t changes = 0, removals = 0, additions = 0;
  for (uint64_t e = 0; e < p.d; ++e) {
    std::vector<int> options;
    const bool key_left = changes + removals < p.n;
    if (key_left && p.sigma >= 3) options.push_back(0);
    if (key_left) options.push_back(1);
    if (additions < p.u - p.n) options.push_back(2);
    require(!options.empty(), ErrorCode::invalid_argument, "d exceeds the universe");
    switch (options[uniform_below(rng, options.size())]) {
      case 0: ++changes; break;
      case 1: ++removals; break;
      default: ++additions; break;
    }
  }

  SparseString t = s;
  std::vector<uint64_t> order(p.n);
  std::iota(order.begin(), order.end(), 0);
  for (uint64_t i = 0; i < changes + removals; ++i) {
    std::swap(order[i], order[i + uniform_below(rng, p.n - i)]);
  }
  std::vector<bool> removed(p.n, false);
  for (uint64_t i = 0; i < changes; ++i) {
    KeyValue& kv = t.pairs[order[i]];
    kv.value = other_value(kv.value, p.sigma, rng);
  }
  for (uint64_t i = changes; i < changes + removals; ++i) removed[order[i]] = true;
  SparseString kept;
  kept.u = t.u;
  kept.sigma = t.sigma;
  for (uint64_t i = 0; i < p.n; ++i) {
    if (!removed[i]) kept.pairs.push_back(t.pairs[i]);
  }
  for (uint64_t x : sample_free(p.u, s.positions(), additions, rng)) {
    kept.pairs.push_back({x, uniform_between(rng, 1, p.sigma - 1)});
  }
  return {s, kept.canonical()};
}

namespace {

std::vector<uint8_t> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::malformed, ("cannot open " + path).c_str());
  return std::vector<uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void write_bytes(const std::string& path, const std::vector<uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::invalid_argument, ("cannot write " + path).c_str());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::vector<uint64_t> parse_list(const std::string& text) {
  std::vector<uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item));
  require(!out.empty(), ErrorCode::invalid_argument, "empty list");
  return out;
}

struct Grid {
  std::vector<uint64_t> u, sigma, n, k;
};

// "u=2^16,2^32;sigma=2,256;n=16;k=1,16"
void parse_grid(const std::string& text, Grid& grid) {
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ';')) {
    if (part.empty()) continue;
    const auto eq = part.find('=');
    require(eq != std::string::npos, ErrorCode::invalid_argument, "grid entries are key=list");
    const std::string key = part.substr(0, eq);
    const std::vector<uint64_t> values = parse_list(part.substr(eq + 1));
    if (key == "u") {
      grid.u = values;
    } else if (key == "sigma") {
      grid.sigma = values;
    } else if (key == "n") {
      grid.n = values;
    } else if (key == "k") {
      grid.k = values;
    } else {
      fail(ErrorCode::invalid_argument, "unknown grid key '" + key + "'");
    }
  }
}

double ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

int bench(const Grid& grid, uint64_t trials, uint64_t seed, const std::string& csv_path,
          std::ostream& out, std::ostream& err) {
  std::ofstream csv_file;
  if (!csv_path.empty()) {
    csv_file.open(csv_path);
    require(static_cast<bool>(csv_file), ErrorCode::invalid_argument, "cannot write CSV");
  }
  std::ostream& csv = csv_path.empty() ? out : csv_file;
  csv << "u,sigma,n,k,seed,message_bits,encode_ms,reconcile_ms,ok\n";
  double max_ratio = 0;
  uint64_t cell = 0;
  for (uint64_t u : grid.u) {
    for (uint64_t sigma : grid.sigma) {
      for (uint64_t n : grid.n) {
        for (uint64_t k : grid.k) {
          ++cell;
          if (n > u || k > u) continue;
          for (uint64_t trial = 0; trial < trials; ++trial) {
            const uint64_t trial_seed = splitmix(seed ^ splitmix(cell << 20 | trial));
            const auto [s, t] = generate_instance({u, sigma, n, k, k, trial_seed});
            auto start = std::chrono::steady_clock::now();
            const Message msg = sender_encode(s, k, trial_seed);
            const double encode_ms = ms_since(start);
            const Message received = deserialize(serialize(msg));
            start = std::chrono::steady_clock::now();
            bool ok = false;
            try {
              ok = receiver_reconcile(t, received).same_as(s);
            } catch (const Error&) {
              ok = false;
            }
            const double reconcile_ms = ms_since(start);
            const uint64_t bits = message_bit_size(msg);
            csv << u << ',' << sigma << ',' << n << ',' << k << ',' << trial_seed << ',' << bits
                << ',' << std::fixed << std::setprecision(3) << encode_ms << ',' << reconcile_ms
                << ',' << (ok ? "true" : "false") << '\n';
            csv.unsetf(std::ios::floatfield);
            if (!ok) {
              err << "reconciliation failed: u=" << u << " sigma=" << sigma << " n=" << n
                  << " k=" << k << " seed=" << trial_seed << '\n';
              return kUncorrectable;
            }
            if (k >= 1) {
              const double denom = static_cast<double>(k) * (universe_log(u) + universe_log(sigma));
              max_ratio = std::max(max_ratio, static_cast<double>(bits) / denom);
            }
          }
        }
      }
    }
  }
  out << "max_ratio=" << max_ratio << '\n';
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"hamsync: one-way reconciliation of sparse strings under Hamming distance"};
  app.require_subcommand(1);

  std::string u_text, sigma_text = "2", n_text, k_text = "0", d_text = "0", seed_text = "1";
  std::string path_a, path_b, out_path;

  auto* gen = app.add_subcommand("gen", "generate s and t at distance exactly d");
  gen->add_option("--u", u_text, "universe size")->required();
  gen->add_option("--sigma", sigma_text, "alphabet size");
  gen->add_option("--n", n_text, "non-zeros in s")->required();
  gen->add_option("--k", k_text, "distance budget");
  gen->add_option("--d", d_text, "planted differences (<= k)");
  gen->add_option("--seed", seed_text, "random seed");
  gen->add_option("S_FILE", path_a)->required();
  gen->add_option("T_FILE", path_b)->required();

  auto* encode = app.add_subcommand("encode", "write the sender's message for s");
  encode->add_option("S_FILE", path_a)->required();
  encode->add_option("--k", k_text, "distance budget");
  encode->add_option("--seed", seed_text, "random seed");
  encode->add_option("-o,--out", out_path, "digest path")->required();

  auto* reconcile = app.add_subcommand("reconcile", "recover s from t and a digest");
  reconcile->add_option("T_FILE", path_a)->required();
  reconcile->add_option("DIGEST", path_b)->required();
  reconcile->add_option("-o,--out", out_path, "output path")->required();

  auto* verify = app.add_subcommand("verify", "compare two strings");
  verify->add_option("A", path_a)->required();
  verify->add_option("B", path_b)->required();

  std::string grid_text, u_list, sigma_list, n_list, k_list, trials_text = "1";
  auto* bench_cmd = app.add_subcommand("bench", "gen, encode and reconcile over a grid");
  bench_cmd->add_option("--grid", grid_text, "u=..;sigma=..;n=..;k=..");
  bench_cmd->add_option("--u", u_list, "comma-separated universe sizes");
  bench_cmd->add_option("--sigma", sigma_list, "comma-separated alphabet sizes");
  bench_cmd->add_option("--n", n_list, "comma-separated non-zero counts");
  bench_cmd->add_option("--k", k_list, "comma-separated budgets");
  bench_cmd->add_option("--trials", trials_text, "trials per cell");
  bench_cmd->add_option("--seed", seed_text, "base seed");
  bench_cmd->add_option("-o,--out", out_path, "CSV path (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) {
      const GenParams p{parse_number(u_text), parse_number(sigma_text), parse_number(n_text),
                        parse_number(k_text), parse_number(d_text), parse_number(seed_text)};
      const auto [s, t] = generate_instance(p);
      write_kv_file(path_a, s);
      write_kv_file(path_b, t);
      return kOk;
    }
    if (*encode) {
      const SparseString s = read_kv_file(path_a);
      const Message msg = sender_encode(s, parse_number(k_text), parse_number(seed_text));
      write_bytes(out_path, serialize(msg));
      out << "n=" << msg.params.n << '\n'
          << "variant=" << to_string(msg.params.variant) << '\n'
          << "message_bits=" << message_bit_size(msg) << '\n';
      return kOk;
    }
    if (*reconcile) {
      const SparseString t = read_kv_file(path_a);
      const Message msg = deserialize(read_bytes(path_b));
      write_kv_file(out_path, receiver_reconcile(t, msg));
      return kOk;
    }
    if (*verify) {
      const SparseString a = read_kv_file(path_a);
      const SparseString b = read_kv_file(path_b);
      if (a.u != b.u || a.sigma != b.sigma) {
        err << "header mismatch\n";
        return kUsage;
      }
      const uint64_t d = hamming_distance(a, b);
      out << "distance=" << d << '\n';
      return d == 0 ? kOk : kDiffer;
    }
    Grid grid;
    if (!grid_text.empty()) parse_grid(grid_text, grid);
    if (!u_list.empty()) grid.u = parse_list(u_list);
    if (!sigma_list.empty()) grid.sigma = parse_list(sigma_list);
    if (!n_list.empty()) grid.n = parse_list(n_list);
    if (!k_list.empty()) grid.k = parse_list(k_list);
    if (grid.sigma.empty()) grid.sigma = {2};
    if (grid.k.empty()) grid.k = {1};
    require(!grid.u.empty() && !grid.n.empty(), ErrorCode::invalid_argument,
            "bench needs u and n values");
    return bench(grid, parse_number(trials_text), parse_number(seed_text), out_path, out, err);
  } catch (const Error& e) {
    err << to_string(e.code()) << ": " << e.what() << '\n';
    return exit_code_for(e.code());
  }
}

}  // namespace hamsync::cli
