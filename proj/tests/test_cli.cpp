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
#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "kvfile.hpp"

namespace hamsync::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out, err;
};

Result call(std::vector<std::string> args) {
  args.insert(args.begin(), "hamsync");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<char> slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("hamsync_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const char* name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST(Generate, PlantsExactlyD) {
  for (uint64_t d : {0, 1, 5, 40}) {
    const auto [s, t] = generate_instance({uint64_t{1} << 20, 7, 300, 40, d, d + 3});
    EXPECT_EQ(s.n(), 300u);
    EXPECT_EQ(hamming_distance(s, t), d);
    EXPECT_NO_THROW(t.validate());
  }
  const auto [s, t] = generate_instance({64, 2, 64, 8, 8, 1});
  EXPECT_EQ(s.n(), 64u);
  EXPECT_EQ(hamming_distance(s, t), 8u);
}

TEST(ParseNumber, Forms) {
  EXPECT_EQ(parse_number("0"), 0u);
  EXPECT_EQ(parse_number("1234"), 1234u);
  EXPECT_EQ(parse_number("2^48"), uint64_t{1} << 48);
  EXPECT_THROW(parse_number("3^2"), Error);
  EXPECT_THROW(parse_number("2^64"), Error);
  EXPECT_THROW(parse_number("12x"), Error);
  EXPECT_THROW(parse_number(""), Error);
}

TEST(KvFile, RoundTripAndRejects) {
  std::istringstream in("u=100 sigma=4\n7 3\n\n2 1\n");
  const SparseString s = parse_kv(in);
  std::ostringstream out;
  write_kv(out, s);
  EXPECT_EQ(out.str(), "u=100 sigma=4\n2 1\n7 3\n");
  for (const char* bad : {"", "u=100\n", "u=100 sigma=4\n7\n", "u=100 sigma=4\n7 4\n",
                          "u=100 sigma=4\n100 1\n", "u=100 sigma=4\n1 1\n1 2\n"}) {
    std::istringstream b(bad);
    EXPECT_THROW(parse_kv(b), Error) << bad;
  }
}

TEST_F(CliTest, Pipeline) {
  ASSERT_EQ(call({"gen", "--u", "2^32", "--sigma", "256", "--n", "500", "--k", "12", "--d", "12",
                  "--seed", "9", path("s"), path("t")})
                .code,
            kOk);
  const Result enc = call({"encode", path("s"), "--k", "12", "--seed", "3", "-o", path("m")});
  ASSERT_EQ(enc.code, kOk) << enc.err;
  EXPECT_NE(enc.out.find("n=500\n"), std::string::npos);
  EXPECT_NE(enc.out.find("variant=large-universe\n"), std::string::npos);
  EXPECT_NE(enc.out.find("message_bits="), std::string::npos);
  ASSERT_EQ(call({"encode", path("s"), "--k", "12", "--seed", "3", "-o", path("m2")}).code, kOk);
  EXPECT_EQ(slurp(path("m")), slurp(path("m2")));

  const Result rec = call({"reconcile", path("t"), path("m"), "-o", path("r")});
  ASSERT_EQ(rec.code, kOk) << rec.err;
  const Result same = call({"verify", path("s"), path("r")});
  EXPECT_EQ(same.code, kOk);
  EXPECT_EQ(same.out, "distance=0\n");
  const Result diff = call({"verify", path("s"), path("t")});
  EXPECT_EQ(diff.code, kDiffer);
  EXPECT_EQ(diff.out, "distance=12\n");
}

TEST_F(CliTest, SmallUniverseVariantReported) {
  ASSERT_EQ(call({"gen", "--u", "2^16", "--sigma", "2", "--n", "2^14", "--k", "4", "--d", "4",
                  path("s"), path("t")})
                .code,
            kOk);
  const Result enc = call({"encode", path("s"), "--k", "4", "-o", path("m")});
  EXPECT_NE(enc.out.find("variant=small-universe\n"), std::string::npos);
  ASSERT_EQ(call({"reconcile", path("t"), path("m"), "-o", path("r")}).code, kOk);
  EXPECT_EQ(call({"verify", path("s"), path("r")}).code, kOk);
}

TEST_F(CliTest, ExitCodes) {
  ASSERT_EQ(call({"gen", "--u", "1000", "--sigma", "5", "--n", "100", "--k", "7", "--d", "7",
                  path("s"), path("t")})
                .code,
            kOk);
  const Result v = call({"verify", path("s"), path("t")});
  EXPECT_EQ(v.code, kDiffer);
  EXPECT_EQ(v.out, "distance=7\n");

  std::ofstream(path("other")) << "u=1001 sigma=5\n";
  EXPECT_EQ(call({"verify", path("s"), path("other")}).code, kUsage);

  ASSERT_EQ(call({"encode", path("s"), "--k", "7", "-o", path("m")}).code, kOk);
  auto bytes = slurp(path("m"));
  bytes.resize(bytes.size() / 2);
  std::ofstream(path("cut"), std::ios::binary).write(bytes.data(), static_cast<long>(bytes.size()));
  const Result cut = call({"reconcile", path("t"), path("cut"), "-o", path("r")});
  EXPECT_EQ(cut.code, kUsage);
  EXPECT_NE(cut.err.find("truncated"), std::string::npos);

  ASSERT_EQ(call({"encode", path("s"), "--k", "1", "-o", path("m1")}).code, kOk);
  // Past the budget: either noticed or a wrong answer, never a crash or usage error.
  const int over = call({"reconcile", path("t"), path("m1"), "-o", path("r")}).code;
  EXPECT_TRUE(over == kUncorrectable || over == kOk) << over;

  EXPECT_EQ(call({}).code, kUsage);
  EXPECT_EQ(call({"frobnicate"}).code, kUsage);
  EXPECT_EQ(call({"encode", path("missing"), "-o", path("m")}).code, kUsage);
  EXPECT_EQ(exit_code_for(ErrorCode::parameter_overflow), kOverflow);
}

TEST_F(CliTest, BenchSingleCell) {
  const Result r = call({"bench", "--grid", "u=2^20;sigma=4;n=64;k=2", "--trials", "1", "-o",
                         path("b.csv")});
  ASSERT_EQ(r.code, kOk) << r.err;
  std::ifstream in(path("b.csv"));
  std::string header, row, extra;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, "u,sigma,n,k,seed,message_bits,encode_ms,reconcile_ms,ok");
  EXPECT_EQ(row.rfind("1048576,4,64,2,", 0), 0u);
  EXPECT_EQ(row.substr(row.size() - 4), "true");
  EXPECT_FALSE(std::getline(in, extra) && !extra.empty());
  EXPECT_NE(r.out.find("max_ratio="), std::string::npos);
}

}  // namespace
}  // namespace hamsync::cli
