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

#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace datamin {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed token, domain, or event shape (empty value, arity mismatch...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A file did not follow its documented format. `line` is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Two observations carry the same input but different outputs, so the
/// observed subject is not a function.
class DeterminismViolation : public Error {
 public:
  DeterminismViolation(std::size_t prior_index, const std::string& what,
                       std::optional<std::size_t> line = std::nullopt)
      : Error(line ? "line " + std::to_string(*line) + ": " + what : what),
        prior_index_(prior_index),
        line_(line) {}

  /// 0-based position of the earlier, conflicting observation.
  std::size_t prior_index() const noexcept { return prior_index_; }
  /// Set when the violation was found while parsing a file.
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  std::size_t prior_index_;
  std::optional<std::size_t> line_;
};

/// An observed input does not belong to the declared input domain.
class InputOutsideDomain : public Error {
 public:
  InputOutsideDomain(std::size_t position, const std::string& what)
      : Error(what), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// The program under observation failed to produce an output.
class ProgramFailure : public Error {
 public:
  enum class Reason { kExit, kTimeout, kMalformed, kSpawn, kEvaluation };

  ProgramFailure(Reason reason, const std::string& what,
                 std::string stderr_excerpt = {})
      : Error(what), reason_(reason), stderr_(std::move(stderr_excerpt)) {}

  Reason reason() const noexcept { return reason_; }
  const std::string& stderr_excerpt() const noexcept { return stderr_; }

 private:
  Reason reason_;
  std::string stderr_;
};

/// A computation would exceed its configured work budget.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(std::size_t budget, const std::string& what)
      : Error(what + " (budget " + std::to_string(budget) + ")"),
        budget_(budget) {}

  std::size_t budget() const noexcept { return budget_; }

 private:
  std::size_t budget_;
};

class UnknownBuiltin : public Error {
 public:
  explicit UnknownBuiltin(const std::string& name)
      : Error("unknown builtin program '" + name + "'") {}
};

}  // namespace datamin
