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

// Three-valued minimality monitors.
//
//   TRUE     |σ| > 1, σ is minimal and covers every input of the domain
//   FALSE    |σ| > 1 and σ is not minimal
//   UNKNOWN  otherwise (always, for |σ| <= 1)
//
// Without a domain TRUE is unreachable. monitor_eval() decides a whole trace;
// Monitor consumes one event at a time and latches the first conclusive
// verdict.

#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "datamin/error.hpp"
#include "datamin/properties.hpp"
#include "datamin/trace.hpp"

namespace datamin {

enum class Verdict { kTrue, kFalse, kUnknown };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kTrue: return "TRUE";
    case Verdict::kFalse: return "FALSE";
    case Verdict::kUnknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

inline bool conclusive(Verdict v) { return v != Verdict::kUnknown; }

struct MonitorConfig {
  Mode mode = Mode::kMonolithic;
  /// Needed for TRUE verdicts; shared so that configs stay cheap to copy.
  std::shared_ptr<const InputDomain> domain;

  static MonitorConfig with_domain(Mode mode, InputDomain d) {
    return {mode, std::make_shared<const InputDomain>(std::move(d))};
  }
};

struct MonitorResult {
  Verdict verdict = Verdict::kUnknown;
  std::optional<Witness> witness;

  friend bool operator==(const MonitorResult&, const MonitorResult&) = default;
};

namespace detail {

inline void check_domain(const MonitorConfig& cfg, const Trace& trace) {
  if (!cfg.domain) return;
  if (!trace.empty() && trace.arity() != cfg.domain->arity())
    throw InvalidArgument("trace arity does not match domain arity");
  for (std::size_t i = 0; i < trace.size(); ++i)
    if (!cfg.domain->contains(trace[i].input))
      throw InputOutsideDomain(i, "input " + to_string(trace[i].input) + " at position " +
                                      std::to_string(i) + " is outside the domain");
}

}  // namespace detail

/// Verdict of the monitor on a whole trace.
///
/// The FALSE witness is the least pair of the shortest violating prefix, so
/// it is the pair a streaming monitor reports when it first latches.
inline MonitorResult monitor_eval(const MonitorConfig& cfg, const Trace& trace) {
  detail::check_domain(cfg, trace);
  if (trace.size() <= 1) return {};
  if (!sat(cfg.mode, trace)) {
    // Violation is extension-closed, so the failing prefixes form a suffix
    // of lengths and can be bisected.
    std::size_t lo = 2, hi = trace.size();
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (sat(cfg.mode, trace.prefix(mid)))
        lo = mid + 1;
      else
        hi = mid;
    }
    return {Verdict::kFalse, witness(cfg.mode, trace.prefix(lo))};
  }
  if (cfg.domain && in_ex(*cfg.domain, trace)) return {Verdict::kTrue, std::nullopt};
  return {};
}

/// Incremental state: indexes sized by the distinct inputs seen so far.
struct MonitorState {
  std::size_t events_seen = 0;
  std::size_t arity = 0;
  /// Σ# history and in-ex progress: input -> (output, first position).
  std::unordered_map<InputEvent, std::pair<Value, std::size_t>> seen_inputs;
  /// output -> (first input, first position).
  std::unordered_map<Value, std::pair<InputEvent, std::size_t>> output_index;
  /// Per source j: (input without j, output) -> (coordinate j, first position).
  std::vector<std::unordered_map<detail::OutputMaskKey, std::pair<Value, std::size_t>,
                                 detail::OutputMaskHash>>
      masked_index;
  std::optional<MonitorResult> latched;
};

/// Streaming monitor. Single owner; not for concurrent use.
class Monitor {
 public:
  explicit Monitor(MonitorConfig cfg) : cfg_(std::move(cfg)) {}

  /// Verdict for the history extended by `e`.
  MonitorResult step(const Event& e) {
    const std::size_t pos = state_.events_seen;
    check_event(e, pos);
    const bool fresh = !state_.seen_inputs.contains(e.input);

    if (state_.latched) {
      record(e, pos, fresh);
      return *state_.latched;
    }

    std::optional<Witness> found =
        cfg_.mode == Mode::kMonolithic ? find_mono(e) : find_sdm(e);
    record(e, pos, fresh);

    if (found) {
      found->index_b = pos;
      state_.latched = MonitorResult{Verdict::kFalse, found};
      return *state_.latched;
    }
    if (cfg_.domain && state_.events_seen > 1 &&
        state_.seen_inputs.size() == cfg_.domain->size()) {
      state_.latched = MonitorResult{Verdict::kTrue, std::nullopt};
      return *state_.latched;
    }
    return {};
  }

  MonitorResult current() const { return state_.latched.value_or(MonitorResult{}); }
  const MonitorState& state() const noexcept { return state_; }
  const MonitorConfig& config() const noexcept { return cfg_; }

 private:
  void check_event(const Event& e, std::size_t pos) {
    if (e.input.arity() == 0) throw InvalidArgument("input event arity must be >= 1");
    if (state_.arity == 0) {
      state_.arity = e.input.arity();
      if (cfg_.domain && cfg_.domain->arity() != state_.arity)
        throw InvalidArgument("event arity does not match domain arity");
      state_.masked_index.resize(state_.arity);
    } else if (e.input.arity() != state_.arity) {
      throw InvalidArgument("event arity does not match the monitored history");
    }
    if (auto it = state_.seen_inputs.find(e.input);
        it != state_.seen_inputs.end() && it->second.first != e.output)
      throw DeterminismViolation(it->second.second,
                                 "input " + to_string(e.input) + " observed with outputs '" +
                                     it->second.first.text() + "' and '" + e.output.text() +
                                     "'");
    if (cfg_.domain && !cfg_.domain->contains(e.input))
      throw InputOutsideDomain(pos, "input " + to_string(e.input) + " at position " +
                                        std::to_string(pos) + " is outside the domain");
  }

  // Before the first violation every output maps to a single input, so the
  // stored first position is the least partner of the new event.
  std::optional<Witness> find_mono(const Event& e) const {
    auto it = state_.output_index.find(e.output);
    if (it == state_.output_index.end() || it->second.first == e.input) return std::nullopt;
    return Witness{Mode::kMonolithic, it->second.second, 0, std::nullopt};
  }

  std::optional<Witness> find_sdm(const Event& e) const {
    std::optional<Witness> best;
    for (std::size_t j = 0; j < state_.arity; ++j) {
      const auto& index = state_.masked_index[j];
      auto it = index.find({e.input.without(j), e.output});
      if (it == index.end() || it->second.first == e.input[j]) continue;
      if (!best || it->second.second < best->index_a)
        best = Witness{Mode::kStrongDistributed, it->second.second, 0, j};
    }
    return best;
  }

  void record(const Event& e, std::size_t pos, bool fresh) {
    ++state_.events_seen;
    if (!fresh) return;
    state_.seen_inputs.emplace(e.input, std::pair(e.output, pos));
    if (state_.latched) return;
    if (cfg_.mode == Mode::kMonolithic) {
      state_.output_index.try_emplace(e.output, e.input, pos);
    } else {
      for (std::size_t j = 0; j < state_.arity; ++j)
        state_.masked_index[j].try_emplace({e.input.without(j), e.output}, e.input[j], pos);
    }
  }

  MonitorConfig cfg_;
  MonitorState state_;
};

/// Verdict after every prefix, computed by streaming the trace.
inline std::vector<MonitorResult> monitor_prefixes(const MonitorConfig& cfg, const Trace& trace) {
  Monitor m(cfg);
  std::vector<MonitorResult> out;
  out.reserve(trace.size());
  for (const auto& e : trace) out.push_back(m.step(e));
  return out;
}

}  // namespace datamin
