// Copyright 2026 The datamin authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// End-to-end runs of the command-line tool: exit codes, key output lines and
// golden JSON reports.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct Run {
  int code;
  std::string out;
};

const std::string kData = DATAMIN_DATA_DIR;
const std::string kTestData = DATAMIN_TEST_DATA_DIR;

Run cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " DATAMIN_CLI " " + args + " 2>/dev/null";
  FILE* p = ::popen(cmd.c_str(), "r");
  if (!p) return {-1, ""};
  std::string out;
  std::array<char, 4096> buf;
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), p)) out.append(buf.data(), n);
  const int status = ::pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

bool has(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

std::string tmp(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

TEST(CheckTrace, SalaryTrace) {
  const auto r = cli("check-trace --trace " + kData + "/table1.jsonl --mode mono");
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(has(r.out, "FALSE\nwitness: positions 0 and 2")) << r.out;
}

TEST(CheckTrace, SalaryAgeTrace) {
  const auto r = cli("check-trace --trace " + kData + "/table2.jsonl --mode sdist");
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(has(r.out, "positions 1 and 3")) << r.out;
  EXPECT_TRUE(has(r.out, "differing source 1")) << r.out;
}

TEST(CheckTrace, XorWithDomainIsTrue) {
  const auto r = cli("check-trace --trace " + kData + "/xor.jsonl --mode sdist --domain " + kData +
                     "/bits2.json");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "TRUE\n");
  EXPECT_EQ(cli("check-trace --trace " + kData + "/xor.jsonl --mode sdist").code, 2);
}

TEST(CheckTrace, BadInputsAreErrors) {
  const auto conflict = tmp("datamin-cli-conflict.jsonl");
  std::ofstream(conflict) << R"({"in":["1"],"out":"a"})" "\n" R"({"in":["1"],"out":"b"})" "\n";
  EXPECT_EQ(cli("check-trace --trace " + conflict).code, 3);
  EXPECT_EQ(cli("check-trace --trace /nonexistent.jsonl").code, 3);
  EXPECT_EQ(cli("check-trace --trace " + kData + "/table1.jsonl --mode fancy").code, 3);
  EXPECT_EQ(cli("check-trace --trace " + kData + "/table1.jsonl --domain " + kData + "/bits2.json").code, 3);
  EXPECT_EQ(cli("check-trace --trace " + kData + "/table1.jsonl --domain " + kData +
                "/flights-0-100.json").code,
            3);
  EXPECT_EQ(cli("check-trace --bogus").code, 3);
  EXPECT_EQ(cli("").code, 3);
  std::filesystem::remove(conflict);
}

TEST(Monitor, ReplayedInputsStopAtTheThirdStep) {
  const auto r = cli("monitor --program builtin:benefits --inputs " + kData + "/table1-inputs.jsonl");
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(has(r.out, "step 3: (8000) => true  FALSE")) << r.out;
  EXPECT_TRUE(has(r.out, "FALSE after 3 steps")) << r.out;
  EXPECT_FALSE(has(r.out, "step 4"));
}

TEST(Monitor, RandomInputsFindAViolation) {
  const auto r = cli("monitor --program builtin:benefits --domain " + kData +
                     "/salary-0-30000.json --random --seed 11");
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(has(r.out, "witness: positions")) << r.out;
}

TEST(Monitor, MinimisedProgramStaysUnknownUntilTheCap) {
  const auto r = cli("monitor --program builtin:benefits --domain " + kData +
                     "/salary-0-30000.json --random --pre builtin:two-case");
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(has(r.out, "UNKNOWN after 100000 steps")) << r.out.substr(r.out.size() - 200);
  EXPECT_FALSE(has(r.out, "FALSE"));
}

TEST(Monitor, ExternalProgramOverTheLineProtocol) {
  const auto r = cli("monitor --program exec:" + kTestData + "/benefits.py --inputs " + kData +
                     "/table1-inputs.jsonl");
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(has(r.out, "FALSE after 3 steps")) << r.out;
  const auto per_call = cli("monitor --per-call --program exec:" + kTestData + "/benefits.py --inputs " +
                            kData + "/table1-inputs.jsonl");
  EXPECT_EQ(per_call.code, 1);
  EXPECT_EQ(per_call.out, r.out);
}

TEST(Monitor, AdapterFailuresAreErrors) {
  EXPECT_EQ(cli("monitor --timeout 100 --program exec:" + kTestData + "/silent.sh --inputs " + kData +
                "/table1-inputs.jsonl")
                .code,
            3);
  EXPECT_EQ(cli("monitor --program builtin:nope --inputs " + kData + "/table1-inputs.jsonl").code, 3);
  EXPECT_EQ(cli("monitor --program builtin:benefits --random").code, 3);
  EXPECT_EQ(cli("monitor --program nope:x --inputs " + kData + "/table1-inputs.jsonl").code, 3);
}

TEST(Test, Examples) {
  auto r = cli("test --program builtin:xor --domain " + kData + "/bits2.json --mode sdist");
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(has(r.out, "steps: 4 of 4"));
  r = cli("test --program builtin:benefits --domain " + kData + "/salary-0-30000.json --strategy lex");
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(has(r.out, "positions 0 and 1, inputs (0) and (1)")) << r.out;
  r = cli("test --program builtin:benefits --domain " + kData +
          "/salary-representatives.json --pre builtin:two-case");
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(has(r.out, "steps: 2 of 2"));
  r = cli("test --program table:" + kData + "/or.jsonl --domain " + kData + "/bits2.json --mode sdist");
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(cli("test --program builtin:xor --domain " + kData + "/bits2.json --strategy up").code, 3);
}

TEST(SynthMin, LoyaltyAndBenefits) {
  const auto out = tmp("datamin-cli-min.jsonl");
  auto r = cli("synth-min --program builtin:loyalty --domain " + kData + "/flights-0-100.json --out " + out);
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.starts_with("17 partitions\n")) << r.out;
  const auto t = r.out.find("time: ");
  ASSERT_NE(t, std::string::npos);
  EXPECT_LT(std::stod(r.out.substr(t + 6)), 1.0);

  r = cli("synth-min --program builtin:benefits --domain " + kData + "/salary-1-30000.json --out " + out);
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.starts_with("2 partitions\n")) << r.out;
  EXPECT_TRUE(has(r.out, "true: {1..9999} -> 1"));
  EXPECT_TRUE(has(r.out, "false: {10000..30000} -> 10000"));

  r = cli("check-pre --program builtin:benefits --domain " + kData + "/salary-1-30000.json --pre " + out);
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "is_preprocessor: true\nis_minimiser: true\n");
  std::filesystem::remove(out);
}

TEST(SynthMin, BudgetComesFromTheEnvironment) {
  const auto out = tmp("datamin-cli-budget.jsonl");
  const std::string args =
      "synth-min --program builtin:loyalty --domain " + kData + "/flights-0-100.json --out " + out;
  EXPECT_EQ(cli(args, "DATAMIN_BUDGET=100").code, 3);
  EXPECT_EQ(cli(args, "DATAMIN_BUDGET=101").code, 0);
  EXPECT_EQ(cli(args, "DATAMIN_BUDGET=zero").code, 3);
  EXPECT_EQ(cli("oracle --notion dist --table " + kData + "/xor.jsonl", "DATAMIN_BUDGET=1").code, 3);
  EXPECT_EQ(cli("synth-min --program builtin:xor --domain " + kData + "/bits2.json --out " + out).code, 3);
  std::filesystem::remove(out);
}

TEST(CheckPre, Examples) {
  auto r = cli("check-pre --program builtin:benefits --domain " + kData +
               "/salary-0-30000.json --pre builtin:three-band");
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(has(r.out, "is_preprocessor: true\nis_minimiser: false\n  collision: (1000) / (6000)"));
  r = cli("check-pre --program builtin:benefits --domain " + kData + "/salary-0-30000.json --pre builtin:two-case");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(cli("check-pre --program builtin:benefits --domain " + kData + "/salary-0-30000.json --pre nope").code, 3);
}

TEST(Oracle, XorAndOr) {
  struct Case {
    const char* table;
    const char* notion;
    int code;
  };
  for (const auto& c : {Case{"xor", "mono", 1}, Case{"xor", "sdist", 0}, Case{"xor", "dist", 0},
                        Case{"or", "mono", 1}, Case{"or", "sdist", 1}, Case{"or", "dist", 0},
                        Case{"first-coordinate", "dist", 1}, Case{"xor", "weak", 3}}) {
    const auto r = cli(std::string("oracle --table ") + kData + "/" + c.table + ".jsonl --notion " + c.notion);
    EXPECT_EQ(r.code, c.code) << c.table << " " << c.notion;
  }
  EXPECT_TRUE(has(cli("oracle --table " + kData + "/xor.jsonl --notion mono").out,
                  "witness: (0,0) and (1,1) both yield 0"));
}

TEST(Help, ExitsCleanly) { EXPECT_EQ(cli("--help").code, 0); }

class Golden : public ::testing::TestWithParam<std::pair<const char*, const char*>> {};

TEST_P(Golden, JsonReportIsStable) {
  const auto [file, args] = GetParam();
  std::string a = args;
  for (std::size_t k; (k = a.find("@")) != std::string::npos;) a.replace(k, 1, kData + "/");
  const auto r = cli(a);
  EXPECT_EQ(r.out, slurp(kTestData + "/golden/" + file));
}

INSTANTIATE_TEST_SUITE_P(
    Reports, Golden,
    ::testing::Values(
        std::pair{"check-trace-table1.json", "check-trace --trace @table1.jsonl --json"},
        std::pair{"check-trace-table2.json", "check-trace --trace @table2.jsonl --mode sdist --json"},
        std::pair{"check-trace-xor.json",
                  "check-trace --trace @xor.jsonl --mode sdist --domain @bits2.json --json"},
        std::pair{"test-xor-sdist.json",
                  "test --program builtin:xor --domain @bits2.json --mode sdist --strategy lex --json"},
        std::pair{"check-pre-three-band.json",
                  "check-pre --program builtin:benefits --domain @salary-0-30000.json --pre "
                  "builtin:three-band --json"},
        std::pair{"oracle-or-sdist.json", "oracle --table @or.jsonl --notion sdist --json"},
        std::pair{"monitor-table1.jsonl",
                  "monitor --program builtin:benefits --inputs @table1-inputs.jsonl --json"}));

}  // namespace
