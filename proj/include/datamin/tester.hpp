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

// Pre-deployment testing over a finite domain, and exhaustive minimality
// oracles on materialised function tables.

#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "datamin/error.hpp"
#include "datamin/monitor.hpp"
#include "datamin/program.hpp"
#include "datamin/properties.hpp"
#include "datamin/trace.hpp"

namespace datamin {

enum class Strategy { kRandomPermutation, kLexicographic };

inline const char* to_string(Strategy s) {
  return s == Strategy::kRandomPermutation ? "random-permutation" : "lexicographic";
}

namespace detail {

/// Unbiased draw in [0, bound) from a 64-bit engine.
inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

/// Fisher-Yates shuffle of 0..n-1.
inline std::vector<std::uint64_t> permutation(std::uint64_t n, std::uint64_t seed) {
  std::vector<std::uint64_t> p(static_cast<std::size_t>(n));
  for (std::uint64_t k = 0; k < n; ++k) p[k] = k;
  std::mt19937_64 rng(seed);
  for (std::uint64_t k = n; k > 1; --k) std::swap(p[k - 1], p[bounded(rng, k)]);
  return p;
}

}  // namespace detail

/// Total function over a product domain, stored in domain index order.
class FunctionTable {
 public:
  FunctionTable(InputDomain domain, std::vector<Value> outputs)
      : domain_(std::move(domain)), outputs_(std::move(outputs)) {
    if (outputs_.size() != domain_.size())
      throw InvalidArgument("function table must have one output per domain element");
  }

  /// Evaluates `program` once per domain element.
  static FunctionTable tabulate(Program& program, const InputDomain& domain,
                                std::uint64_t budget = 10'000'000) {
    if (domain.size() > budget)
      throw BudgetExceeded(static_cast<std::size_t>(budget), "domain too large to tabulate");
    std::vector<Value> outs;
    outs.reserve(static_cast<std::size_t>(domain.size()));
    for (std::uint64_t k = 0; k < domain.size(); ++k) outs.push_back(program.evaluate(domain.at(k)));
    return FunctionTable(domain, std::move(outs));
  }

  /// Rows must cover the product of the observed per-coordinate values
  /// exactly once. Each source becomes an explicit value set.
  static FunctionTable from_trace(const Trace& rows) {
    if (rows.empty()) throw InvalidArgument("function table is empty");
    std::vector<std::vector<Value>> values(rows.arity());
    std::vector<std::unordered_map<Value, bool>> seen(rows.arity());
    for (const auto& e : rows)
      for (std::size_t j = 0; j < rows.arity(); ++j)
        if (seen[j].emplace(e.input[j], true).second) values[j].push_back(e.input[j]);
    std::vector<SourceDomain> sources;
    for (auto& v : values) sources.push_back(SourceDomain::set(std::move(v)));
    InputDomain domain(std::move(sources));
    if (rows.distinct_inputs() != rows.size())
      throw InvalidArgument("function table lists an input more than once");
    if (rows.size() != domain.size())
      throw InvalidArgument("function table covers " + std::to_string(rows.size()) + " of " +
                            std::to_string(domain.size()) + " inputs of its product domain");
    std::vector<std::optional<Value>> slots(rows.size());
    for (const auto& e : rows) slots[*domain.index_of(e.input)] = e.output;
    std::vector<Value> outs;
    outs.reserve(slots.size());
    for (auto& s : slots) outs.push_back(std::move(*s));
    return FunctionTable(std::move(domain), std::move(outs));
  }

  const InputDomain& domain() const noexcept { return domain_; }
  std::uint64_t size() const noexcept { return outputs_.size(); }
  InputEvent input(std::uint64_t k) const { return domain_.at(k); }
  const Value& output(std::uint64_t k) const { return outputs_.at(k); }
  const Value& operator()(const InputEvent& in) const {
    auto k = domain_.index_of(in);
    if (!k) throw InputOutsideDomain(0, "input " + to_string(in) + " is not in the table");
    return outputs_[*k];
  }

  /// Rows in domain order, as a trace.
  Trace to_trace() const {
    Trace t(domain_.arity());
    for (std::uint64_t k = 0; k < size(); ++k) t = std::move(t).append({input(k), outputs_[k]});
    return t;
  }

 private:
  InputDomain domain_;
  std::vector<Value> outputs_;
};

struct TableWitness {
  InputEvent a;
  InputEvent b;
  friend bool operator==(const TableWitness&, const TableWitness&) = default;
};

struct OracleResult {
  bool minimal = true;
  std::optional<TableWitness> witness;
};

/// Injectivity. Witness: least colliding pair in domain order.
inline OracleResult oracle_monolithic_minimal(const FunctionTable& table) {
  std::unordered_map<Value, std::uint64_t> first;
  std::optional<std::pair<std::uint64_t, std::uint64_t>> best;
  for (std::uint64_t k = 0; k < table.size(); ++k) {
    auto [it, inserted] = first.try_emplace(table.output(k), k);
    if (inserted) continue;
    // The first collision of each output is its least pair.
    std::pair cand(it->second, k);
    if (!best || cand < *best) best = cand;
    // Later collisions of the same output only grow index_b.
    it->second = std::min(it->second, k);
  }
  if (!best) return {};
  return {false, TableWitness{table.input(best->first), table.input(best->second)}};
}

/// Every pair of inputs differing in exactly one coordinate has distinct
/// outputs. Witness: least such pair with equal outputs.
inline OracleResult oracle_strong_dist_minimal(const FunctionTable& table) {
  const auto& dom = table.domain();
  for (std::uint64_t a = 0; a < table.size(); ++a) {
    const InputEvent in = table.input(a);
    std::optional<std::uint64_t> best_b;
    // Neighbours of `a` that follow it in domain order: raise one coordinate.
    std::uint64_t stride = 1;
    for (std::size_t j = dom.arity(); j-- > 0;) {
      const auto& src = dom.source(j);
      const std::uint64_t kj = *src.index_of(in[j]);
      for (std::uint64_t v = kj + 1; v < src.size(); ++v) {
        const std::uint64_t b = a + (v - kj) * stride;
        if (table.output(b) == table.output(a)) {
          if (!best_b || b < *best_b) best_b = b;
          break;
        }
      }
      stride *= src.size();
    }
    if (best_b) return {false, TableWitness{in, table.input(*best_b)}};
  }
  return {};
}

struct DistWitness {
  std::size_t source = 0;
  Value u;
  Value v;
  friend bool operator==(const DistWitness&, const DistWitness&) = default;
};

struct DistOracleResult {
  bool minimal = true;
  std::optional<DistWitness> witness;
};

/// For every source and every pair of its values u != v, some context of the
/// other coordinates must tell them apart. Costs
/// sum_id |I_id|^2 * prod_{j != id} |I_j| lookups in the worst case.
inline DistOracleResult oracle_dist_minimal(const FunctionTable& table,
                                            std::uint64_t budget = 10'000'000) {
  const auto& dom = table.domain();
  std::uint64_t lookups = 0;
  std::uint64_t stride = 1;
  std::vector<std::uint64_t> strides(dom.arity());
  for (std::size_t j = dom.arity(); j-- > 0;) {
    strides[j] = stride;
    stride *= dom.source(j).size();
  }
  for (std::size_t id = 0; id < dom.arity(); ++id) {
    const auto& src = dom.source(id);
    const std::uint64_t n = src.size();
    const std::uint64_t contexts = table.size() / n;
    const std::uint64_t sid = strides[id];
    for (std::uint64_t u = 0; u < n; ++u) {
      for (std::uint64_t v = u + 1; v < n; ++v) {
        bool separated = false;
        for (std::uint64_t c = 0; c < contexts && !separated; ++c) {
          if (++lookups > budget)
            throw BudgetExceeded(static_cast<std::size_t>(budget),
                                 "distributed minimality oracle");
          // Context c enumerates all coordinates but `id`.
          const std::uint64_t base = (c / sid) * sid * n + c % sid;
          separated = table.output(base + u * sid) != table.output(base + v * sid);
        }
        if (!separated) return {false, DistWitness{id, src.at(u), src.at(v)}};
      }
    }
  }
  return {};
}

struct TestReport {
  Verdict verdict = Verdict::kUnknown;
  std::optional<Witness> witness;
  std::size_t steps = 0;
  Trace trace;
  std::optional<std::uint64_t> seed;
  Strategy strategy = Strategy::kRandomPermutation;
};

struct TestOptions {
  Mode mode = Mode::kMonolithic;
  Strategy strategy = Strategy::kRandomPermutation;
  std::uint64_t seed = 0;
  /// Probe every input a second time and require the same output.
  bool probe_twice = false;
};

/// Feeds every input of `domain` once, in strategy order, to `program` and
/// a monitor that knows the domain; stops at the first conclusive verdict.
/// The monitor observes what the program exposes (for compositions, the
/// pre-processed input), so `domain` must be the domain the program sees.
inline TestReport run_test(Program& program, const InputDomain& domain, const TestOptions& opts) {
  if (program.arity() != domain.arity())
    throw InvalidArgument("program arity does not match domain arity");
  TestReport report;
  report.strategy = opts.strategy;
  if (opts.strategy == Strategy::kRandomPermutation) report.seed = opts.seed;

  Monitor monitor(MonitorConfig{opts.mode, std::make_shared<const InputDomain>(domain)});
  std::vector<std::uint64_t> order;
  if (opts.strategy == Strategy::kRandomPermutation)
    order = detail::permutation(domain.size(), opts.seed);

  const auto saved = program.cache_policy();
  if (opts.probe_twice) program.set_cache_policy(Program::CachePolicy::kVerify);
  try {
    for (std::uint64_t k = 0; k < domain.size(); ++k) {
      const InputEvent in = domain.at(order.empty() ? k : order[k]);
      Event e = program.observe(in);
      if (opts.probe_twice) program.observe(in);
      report.trace = std::move(report.trace).append(e);
      ++report.steps;
      auto r = monitor.step(e);
      if (conclusive(r.verdict)) {
        report.verdict = r.verdict;
        report.witness = r.witness;
        break;
      }
    }
  } catch (...) {
    program.set_cache_policy(saved);
    throw;
  }
  program.set_cache_policy(saved);
  // A one-element domain is exhausted after a single observation, which the
  // monitor never decides. The program is deterministic, so re-observing the
  // recorded event is equivalent to probing it again.
  if (report.verdict == Verdict::kUnknown && report.steps == domain.size() && report.steps > 0) {
    auto r = monitor.step(report.trace[report.steps - 1]);
    report.verdict = r.verdict;
    report.witness = r.witness;
  }
  return report;
}

}  // namespace datamin
