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

// Input pre-processors: synthesis of a monolithic minimiser by grouping the
// domain on program output, and validation of arbitrary input maps.
//
// A map Pre is a pre-processor for F on I when F(Pre(i)) = F(i) and
// Pre(Pre(i)) = Pre(i) for all i in I. It is a minimiser when, in addition,
// F is injective on range(Pre).

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "datamin/error.hpp"
#include "datamin/io.hpp"
#include "datamin/program.hpp"
#include "datamin/tester.hpp"
#include "datamin/trace.hpp"

namespace datamin {

/// Domain grouped by output. Classes are ordered by their least member;
/// members are in domain order.
struct PartitionMap {
  struct Class {
    Value output;
    std::vector<InputEvent> members;
  };
  InputDomain domain;
  std::vector<Class> classes;

  const Class* find(const Value& output) const {
    for (const auto& c : classes)
      if (c.output == output) return &c;
    return nullptr;
  }
};

/// Total map from inputs to representatives.
class MinimiserTable {
 public:
  MinimiserTable() = default;

  /// Rejects an input listed twice. Idempotence is not enforced here so that
  /// faulty maps can still be loaded and validated.
  explicit MinimiserTable(const std::vector<io::Mapping>& rows) {
    for (const auto& r : rows) {
      if (!mapping_.emplace(r.from, r.to).second)
        throw InvalidArgument("pre-processor maps " + to_string(r.from) + " more than once");
      order_.push_back(r.from);
    }
    for (const auto& r : rows) reps_.push_back(r.to);
    std::sort(reps_.begin(), reps_.end());
    reps_.erase(std::unique(reps_.begin(), reps_.end()), reps_.end());
  }

  static MinimiserTable from_mappings(const std::vector<io::Mapping>& rows) {
    return MinimiserTable(rows);
  }

  const InputEvent& apply(const InputEvent& in) const {
    auto it = mapping_.find(in);
    if (it == mapping_.end())
      throw InputOutsideDomain(0, "pre-processor has no entry for " + to_string(in));
    return it->second;
  }

  bool contains(const InputEvent& in) const { return mapping_.contains(in); }
  std::size_t size() const noexcept { return mapping_.size(); }
  /// range(mapping), sorted.
  const std::vector<InputEvent>& representatives() const noexcept { return reps_; }

  bool is_idempotent() const {
    for (const auto& r : reps_) {
      auto it = mapping_.find(r);
      if (it == mapping_.end() || it->second != r) return false;
    }
    return true;
  }

  /// Rows in insertion order.
  std::vector<io::Mapping> to_mappings() const {
    std::vector<io::Mapping> out;
    out.reserve(order_.size());
    for (const auto& from : order_) out.push_back({from, mapping_.at(from)});
    return out;
  }

 private:
  std::unordered_map<InputEvent, InputEvent> mapping_;
  std::vector<InputEvent> order_;
  std::vector<InputEvent> reps_;
};

/// Materialises `fn` over `domain`.
inline MinimiserTable tabulate_preprocessor(const InputDomain& domain,
                                            const std::function<InputEvent(const InputEvent&)>& fn,
                                            std::uint64_t budget = 1'000'000) {
  std::vector<io::Mapping> rows;
  for (auto& in : enumerate(domain, budget)) {
    InputEvent to = fn(in);
    rows.push_back({std::move(in), std::move(to)});
  }
  return MinimiserTable(rows);
}

namespace preprocessors {

/// salary < 10000 -> 5000, otherwise 15000.
inline InputEvent benefits_two_case(const InputEvent& in) {
  return InputEvent{builtins::integer(in, 0, "two-case") < 10000 ? "5000" : "15000"};
}

/// salary < 6000 -> 1000; 6000..9999 -> 6000; otherwise 10000.
inline InputEvent benefits_three_band(const InputEvent& in) {
  const auto s = builtins::integer(in, 0, "three-band");
  return InputEvent{s < 6000 ? "1000" : s < 10000 ? "6000" : "10000"};
}

/// Named pre-processor, or nullopt.
inline std::optional<std::function<InputEvent(const InputEvent&)>> by_name(std::string_view name) {
  if (name == "two-case") return benefits_two_case;
  if (name == "three-band") return benefits_three_band;
  if (name == "identity") return [](const InputEvent& in) { return in; };
  return std::nullopt;
}

}  // namespace preprocessors

enum class RepStrategy { kLeast, kFirst, kRandom };

struct RepChoice {
  RepStrategy kind = RepStrategy::kLeast;
  std::uint64_t seed = 0;

  /// "least", "first" or "rand:SEED".
  static RepChoice parse(std::string_view s) {
    if (s == "least") return {RepStrategy::kLeast, 0};
    if (s == "first") return {RepStrategy::kFirst, 0};
    if (s.starts_with("rand:")) {
      auto n = detail::parse_int64(s.substr(5));
      if (n && *n >= 0) return {RepStrategy::kRandom, static_cast<std::uint64_t>(*n)};
    }
    throw InvalidArgument("representative strategy must be least, first or rand:SEED, got '" +
                          std::string(s) + "'");
  }
};

struct SynthOptions {
  RepChoice rep;
  /// Visitation order seed; only observable through RepStrategy::kFirst.
  std::uint64_t visit_seed = 0;
  std::uint64_t budget = 1'000'000;
};

struct Synthesis {
  MinimiserTable table;
  PartitionMap partition;
};

/// Groups the domain by program output and maps each input to its class
/// representative. Every input is evaluated exactly once.
inline Synthesis synthesize(Program& program, const InputDomain& domain,
                            const SynthOptions& opts = {}) {
  if (domain.arity() != 1)
    throw InvalidArgument("minimiser synthesis needs a single-source domain");
  if (program.arity() != domain.arity())
    throw InvalidArgument("program arity does not match domain arity");
  if (domain.size() > opts.budget)
    throw BudgetExceeded(static_cast<std::size_t>(opts.budget),
                         "domain of " + std::to_string(domain.size()) + " inputs exceeds the cap");

  const std::uint64_t n = domain.size();
  std::vector<std::uint64_t> order;
  if (opts.rep.kind == RepStrategy::kFirst) order = detail::permutation(n, opts.visit_seed);

  // Class ids by output; per class, members as domain indices.
  std::unordered_map<Value, std::size_t> class_of;
  std::vector<Value> outputs;
  std::vector<std::vector<std::uint64_t>> members;
  std::vector<std::uint64_t> first_visited;
  for (std::uint64_t k = 0; k < n; ++k) {
    const std::uint64_t idx = order.empty() ? k : order[k];
    Value out = program.evaluate(domain.at(idx));
    auto [it, inserted] = class_of.try_emplace(out, outputs.size());
    if (inserted) {
      outputs.push_back(std::move(out));
      members.emplace_back();
      first_visited.push_back(idx);
    }
    members[it->second].push_back(idx);
  }

  std::mt19937_64 rng(opts.rep.seed);
  std::vector<std::size_t> ids(outputs.size());
  std::vector<std::uint64_t> rep(outputs.size());
  for (std::size_t c = 0; c < outputs.size(); ++c) {
    ids[c] = c;
    auto& m = members[c];
    std::sort(m.begin(), m.end());
    switch (opts.rep.kind) {
      case RepStrategy::kLeast: rep[c] = m.front(); break;
      case RepStrategy::kFirst: rep[c] = first_visited[c]; break;
      case RepStrategy::kRandom: rep[c] = m[detail::bounded(rng, m.size())]; break;
    }
  }
  std::sort(ids.begin(), ids.end(),
            [&](std::size_t a, std::size_t b) { return members[a].front() < members[b].front(); });

  Synthesis s{MinimiserTable{}, PartitionMap{domain, {}}};
  std::vector<std::uint64_t> rep_of(static_cast<std::size_t>(n));
  for (std::size_t c : ids) {
    PartitionMap::Class cls{outputs[c], {}};
    cls.members.reserve(members[c].size());
    for (auto idx : members[c]) {
      cls.members.push_back(domain.at(idx));
      rep_of[idx] = rep[c];
    }
    s.partition.classes.push_back(std::move(cls));
  }
  std::vector<io::Mapping> rows;
  rows.reserve(static_cast<std::size_t>(n));
  for (std::uint64_t k = 0; k < n; ++k) rows.push_back({domain.at(k), domain.at(rep_of[k])});
  s.table = MinimiserTable(rows);
  return s;
}

struct ValidationFailure {
  enum class Kind {
    kMissing,      // no entry for a domain input
    kOutside,      // image is not a domain input
    kBehaviour,    // F(Pre(i)) != F(i)
    kIdempotence,  // Pre(Pre(i)) != Pre(i)
    kCollision,    // two representatives share an output
  };
  Kind kind;
  InputEvent input;
  std::optional<InputEvent> other;
};

inline const char* to_string(ValidationFailure::Kind k) {
  switch (k) {
    case ValidationFailure::Kind::kMissing: return "missing";
    case ValidationFailure::Kind::kOutside: return "outside-domain";
    case ValidationFailure::Kind::kBehaviour: return "behaviour";
    case ValidationFailure::Kind::kIdempotence: return "idempotence";
    case ValidationFailure::Kind::kCollision: return "collision";
  }
  return "unknown";
}

struct ValidationReport {
  bool is_preprocessor = true;
  bool is_minimiser = true;
  /// At most `max_failures` entries; `failure_count` counts all of them.
  std::vector<ValidationFailure> failures;
  std::size_t failure_count = 0;
};

/// Checks behaviour preservation and idempotence over the whole domain, then
/// injectivity of the program on range(table).
inline ValidationReport validate_preprocessor(Program& program, const InputDomain& domain,
                                              const MinimiserTable& table,
                                              std::size_t max_failures = 16) {
  if (program.arity() != domain.arity())
    throw InvalidArgument("program arity does not match domain arity");
  ValidationReport report;
  auto fail = [&](ValidationFailure f) {
    ++report.failure_count;
    if (report.failures.size() < max_failures) report.failures.push_back(std::move(f));
  };
  using K = ValidationFailure::Kind;

  for (std::uint64_t k = 0; k < domain.size(); ++k) {
    const InputEvent in = domain.at(k);
    if (!table.contains(in)) {
      fail({K::kMissing, in, std::nullopt});
      continue;
    }
    const InputEvent& r = table.apply(in);
    if (!domain.contains(r)) {
      fail({K::kOutside, in, r});
      continue;
    }
    if (program.evaluate(r) != program.evaluate(in)) fail({K::kBehaviour, in, r});
    if (!table.contains(r) || table.apply(r) != r) fail({K::kIdempotence, in, r});
  }
  report.is_preprocessor = report.failure_count == 0;

  std::unordered_map<Value, InputEvent> seen;
  for (const auto& r : table.representatives()) {
    if (!domain.contains(r)) continue;
    auto [it, inserted] = seen.try_emplace(program.evaluate(r), r);
    if (!inserted) {
      fail({K::kCollision, it->second, r});
      report.is_minimiser = false;
    }
  }
  report.is_minimiser = report.is_minimiser && report.is_preprocessor;
  return report;
}

/// i -> F(Pre(i)). Attached monitors see the pre-processed input.
class ComposedProgram final : public Program {
 public:
  ComposedProgram(ProgramHandle inner, std::shared_ptr<const MinimiserTable> table)
      : Program(inner->arity()), inner_(std::move(inner)), table_(std::move(table)) {}

  std::string name() const override { return "compose(" + inner_->name() + ")"; }

  Event observe(const InputEvent& in) override { return Event{table_->apply(in), evaluate(in)}; }

  Program& inner() noexcept { return *inner_; }
  const MinimiserTable& table() const noexcept { return *table_; }

 protected:
  Value invoke(const InputEvent& in) override { return inner_->evaluate(table_->apply(in)); }

 private:
  ProgramHandle inner_;
  std::shared_ptr<const MinimiserTable> table_;
};

inline ProgramHandle compose(ProgramHandle program, MinimiserTable table) {
  return std::make_unique<ComposedProgram>(
      std::move(program), std::make_shared<const MinimiserTable>(std::move(table)));
}

}  // namespace datamin
