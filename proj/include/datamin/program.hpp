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

// Black-box deterministic programs F : I_1 x ... x I_n -> O.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>

#include "datamin/error.hpp"
#include "datamin/io.hpp"
#include "datamin/trace.hpp"

namespace datamin {

/// Base of all program adapters. evaluate() checks arity and memoises;
/// subclasses implement invoke().
class Program {
 public:
  enum class CachePolicy {
    kMemoise,  // answer repeats from the cache
    kVerify,   // re-invoke on repeats and compare against the cache
    kNone,     // always invoke, remember nothing
  };

  explicit Program(std::size_t arity) : arity_(arity) {
    if (arity_ == 0) throw InvalidArgument("program arity must be >= 1");
  }
  virtual ~Program() = default;
  Program(const Program&) = delete;
  Program& operator=(const Program&) = delete;

  std::size_t arity() const noexcept { return arity_; }
  virtual std::string name() const = 0;

  Value evaluate(const InputEvent& in) {
    if (in.arity() != arity_)
      throw InvalidArgument("program " + name() + " expects arity " + std::to_string(arity_) +
                            ", got " + std::to_string(in.arity()));
    if (policy_ == CachePolicy::kNone) return call(in);
    auto it = cache_.find(in);
    if (it != cache_.end() && policy_ == CachePolicy::kMemoise) return it->second.first;
    Value out = call(in);
    if (it != cache_.end()) {
      if (it->second.first != out)
        throw DeterminismViolation(
            it->second.second, "program " + name() + " returned '" + it->second.first.text() +
                                   "' and then '" + out.text() + "' for input " + to_string(in));
      return out;
    }
    cache_.emplace(in, std::pair(out, invocations_ - 1));
    return out;
  }

  /// The event a monitor attached to this program sees for a user input.
  virtual Event observe(const InputEvent& in) { return Event{in, evaluate(in)}; }

  void set_cache_policy(CachePolicy p) noexcept { policy_ = p; }
  CachePolicy cache_policy() const noexcept { return policy_; }
  /// Calls that reached invoke().
  std::size_t invocations() const noexcept { return invocations_; }

 protected:
  virtual Value invoke(const InputEvent& in) = 0;

 private:
  Value call(const InputEvent& in) {
    ++invocations_;
    return invoke(in);
  }

  std::size_t arity_;
  CachePolicy policy_ = CachePolicy::kMemoise;
  std::size_t invocations_ = 0;
  // input -> (output, invocation number of the first answer)
  std::unordered_map<InputEvent, std::pair<Value, std::size_t>> cache_;
};

using ProgramHandle = std::unique_ptr<Program>;

/// Program backed by a C++ callable.
class FunctionProgram final : public Program {
 public:
  using Fn = std::function<Value(const InputEvent&)>;

  FunctionProgram(std::string name, std::size_t arity, Fn fn)
      : Program(arity), name_(std::move(name)), fn_(std::move(fn)) {}

  std::string name() const override { return name_; }

 protected:
  Value invoke(const InputEvent& in) override { return fn_(in); }

 private:
  std::string name_;
  Fn fn_;
};

/// Evaluator that is a lookup in a recorded input-output table.
class TableProgram final : public Program {
 public:
  explicit TableProgram(const Trace& table, std::string name = "table")
      : Program(table.arity() ? table.arity() : 1), name_(std::move(name)) {
    for (const auto& e : table) rows_.emplace(e.input, e.output);
  }

  static ProgramHandle from_file(const std::string& path) {
    return std::make_unique<TableProgram>(io::load_trace(path), "table:" + path);
  }

  std::string name() const override { return name_; }
  std::size_t rows() const noexcept { return rows_.size(); }

 protected:
  Value invoke(const InputEvent& in) override {
    auto it = rows_.find(in);
    if (it == rows_.end())
      throw InputOutsideDomain(invocations() - 1,
                               "input " + to_string(in) + " is not in the table " + name_);
    return it->second;
  }

 private:
  std::string name_;
  std::unordered_map<InputEvent, Value> rows_;
};

namespace builtins {

inline std::int64_t integer(const InputEvent& in, std::size_t j, std::string_view who) {
  auto n = detail::parse_int64(in[j].text());
  if (!n)
    throw ProgramFailure(ProgramFailure::Reason::kEvaluation,
                         std::string(who) + ": '" + in[j].text() + "' is not an integer");
  return *n;
}

inline int bit(const InputEvent& in, std::size_t j, std::string_view who) {
  const auto& t = in[j].text();
  if (t != "0" && t != "1")
    throw ProgramFailure(ProgramFailure::Reason::kEvaluation,
                         std::string(who) + ": '" + t + "' is not 0 or 1");
  return t == "1";
}

inline Value boolean(bool b) { return Value(b ? "true" : "false"); }

/// Eligible for benefits iff salary < 10000.
inline Value benefits(const InputEvent& in) {
  return boolean(integer(in, 0, "benefits") < 10000);
}

/// Eligible iff salary < 10000 or age > 60.
inline Value dist_benefits(const InputEvent& in) {
  return boolean(integer(in, 0, "dist-benefits") < 10000 ||
                 integer(in, 1, "dist-benefits") > 60);
}

/// Status level from the number of flights taken.
inline Value loyalty(const InputEvent& in) {
  const std::int64_t n = integer(in, 0, "loyalty");
  std::int64_t status;
  if (n <= 9)
    status = 0;
  else if (n <= 19)
    status = n - 10;
  else if (n <= 24)
    status = 10 * (n - 10);
  else if (n <= 29)
    status = 150;
  else
    status = 500;
  return Value(status);
}

}  // namespace builtins

/// builtin:<name>. `arity` is only consulted by identity and const:<v>,
/// whose arity is free (default 1); fixed-arity builtins reject a mismatch.
inline ProgramHandle builtin(std::string_view name, std::optional<std::size_t> arity = {}) {
  auto fixed = [&](std::size_t n) {
    if (arity && *arity != n)
      throw InvalidArgument("builtin " + std::string(name) + " has arity " + std::to_string(n));
    return n;
  };
  const std::string id(name);
  if (name == "benefits")
    return std::make_unique<FunctionProgram>(id, fixed(1), builtins::benefits);
  if (name == "dist-benefits")
    return std::make_unique<FunctionProgram>(id, fixed(2), builtins::dist_benefits);
  if (name == "xor")
    return std::make_unique<FunctionProgram>(id, fixed(2), [](const InputEvent& in) {
      return Value(builtins::bit(in, 0, "xor") != builtins::bit(in, 1, "xor") ? "1" : "0");
    });
  if (name == "or")
    return std::make_unique<FunctionProgram>(id, fixed(2), [](const InputEvent& in) {
      return Value(builtins::bit(in, 0, "or") || builtins::bit(in, 1, "or") ? "1" : "0");
    });
  if (name == "loyalty")
    return std::make_unique<FunctionProgram>(id, fixed(1), builtins::loyalty);
  if (name == "identity")
    return std::make_unique<FunctionProgram>(id, arity.value_or(1), [](const InputEvent& in) {
      if (in.arity() == 1) return in[0];
      std::string joined;
      for (std::size_t j = 0; j < in.arity(); ++j) {
        if (j) joined += ',';
        joined += in[j].text();
      }
      return Value(std::move(joined));
    });
  if (name.starts_with("const:")) {
    Value v(name.substr(6));
    return std::make_unique<FunctionProgram>(id, arity.value_or(1),
                                             [v](const InputEvent&) { return v; });
  }
  throw UnknownBuiltin(id);
}

}  // namespace datamin
