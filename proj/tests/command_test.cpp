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

#include <gtest/gtest.h>

#include <chrono>

#include "support/oracles.hpp"

namespace datamin {
namespace {

using namespace std::chrono_literals;

std::string script(const char* name) { return std::string(DATAMIN_TEST_DATA_DIR "/") + name; }

ProgramFailure::Reason failure_of(Program& p, const InputEvent& in) {
  try {
    p.evaluate(in);
  } catch (const ProgramFailure& e) {
    return e.reason();
  }
  ADD_FAILURE() << "no ProgramFailure";
  return ProgramFailure::Reason::kEvaluation;
}

TEST(Command, SessionAgreesWithBuiltin) {
  CommandProgram cmd({script("benefits.py")}, 1);
  auto ref = builtin("benefits");
  for (int s : {0, 5000, 9999, 10000, 11000, 30000})
    EXPECT_EQ(cmd.evaluate(InputEvent{std::to_string(s)}), ref->evaluate(InputEvent{std::to_string(s)}));
  EXPECT_EQ(cmd.name(), "exec:" + script("benefits.py"));
}

TEST(Command, TwoSourcesAreTabSeparated) {
  CommandProgram cmd({"python3", script("dist_benefits.py")}, 2);
  EXPECT_EQ(cmd.evaluate(InputEvent{"5000", "61"}), Value("true"));
  EXPECT_EQ(cmd.evaluate(InputEvent{"11000", "45"}), Value("false"));
}

TEST(Command, SessionKeepsOneProcess) {
  CommandProgram cmd({script("counter.sh")}, 1);
  EXPECT_EQ(cmd.evaluate(InputEvent{"a"}), Value("1"));
  EXPECT_EQ(cmd.evaluate(InputEvent{"b"}), Value("2"));
  EXPECT_EQ(cmd.evaluate(InputEvent{"a"}), Value("1"));  // memoised
}

TEST(Command, PerCallRespawns) {
  CommandProgram cmd({script("counter.sh")}, 1, CommandOptions{false, 10'000ms});
  EXPECT_EQ(cmd.evaluate(InputEvent{"a"}), Value("1"));
  EXPECT_EQ(cmd.evaluate(InputEvent{"b"}), Value("1"));
  CommandProgram one_shot({script("crash.sh")}, 1, CommandOptions{false, 10'000ms});
  EXPECT_EQ(failure_of(one_shot, InputEvent{"x"}), ProgramFailure::Reason::kExit);
}

TEST(Command, TimeoutIsReported) {
  CommandProgram cmd({script("silent.sh")}, 1, CommandOptions{true, 200ms});
  const auto t0 = std::chrono::steady_clock::now();
  EXPECT_EQ(failure_of(cmd, InputEvent{"1"}), ProgramFailure::Reason::kTimeout);
  EXPECT_LT(std::chrono::steady_clock::now() - t0, 5s);
}

TEST(Command, EmbeddedTabIsMalformed) {
  CommandProgram cmd({script("echo.sh")}, 2);
  EXPECT_EQ(failure_of(cmd, InputEvent{"a", "b"}), ProgramFailure::Reason::kMalformed);
  CommandProgram single({script("echo.sh")}, 1);
  EXPECT_EQ(single.evaluate(InputEvent{"token"}), Value("token"));
}

TEST(Command, ExitCarriesStderrExcerpt) {
  CommandProgram cmd({script("crash.sh")}, 1);
  try {
    cmd.evaluate(InputEvent{"42"});
    FAIL();
  } catch (const ProgramFailure& e) {
    EXPECT_EQ(e.reason(), ProgramFailure::Reason::kExit);
    EXPECT_NE(e.stderr_excerpt().find("cannot handle 42"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("exit status 4"), std::string::npos);
  }
}

TEST(Command, UnterminatedReplyIsAnExit) {
  CommandProgram cmd({script("unterminated.sh")}, 1);
  EXPECT_EQ(failure_of(cmd, InputEvent{"1"}), ProgramFailure::Reason::kExit);
}

TEST(Command, MissingExecutableFailsToSpawn) {
  CommandProgram cmd({"/nonexistent/program"}, 1);
  EXPECT_EQ(failure_of(cmd, InputEvent{"1"}), ProgramFailure::Reason::kSpawn);
  EXPECT_THROW(CommandProgram({}, 1), InvalidArgument);
}

TEST(Command, SessionRestartsAfterFailure) {
  CommandProgram cmd({script("crash.sh")}, 1);
  EXPECT_EQ(failure_of(cmd, InputEvent{"1"}), ProgramFailure::Reason::kExit);
  EXPECT_EQ(failure_of(cmd, InputEvent{"2"}), ProgramFailure::Reason::kExit);
}

}  // namespace
}  // namespace datamin
