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

// Whole-trace predicates for monolithic and strong distributed minimality.
//
// A trace is monolithic-minimal when distinct inputs always carry distinct
// outputs, and strong-distributed-minimal when inputs that differ in exactly
// one coordinate carry distinct outputs. Both are prefix-closed and their
// negations are extension-closed.

#pragma once

#include <cstddef>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "datamin/error.hpp"
#include "datamin/trace.hpp"

namespace datamin {

enum class Mode { kMonolithic, kStrongDistributed };

inline const char* to_string(Mode m) {
  return m == Mode::kMonolithic ? "monolithic" : "strong-distributed";
}

/// Two trace positions proving non-minimality.
struct Witness {
  Mode kind = Mode::kMonolithic;
  std::size_t index_a = 0;
  std::size_t index_b = 0;
  /// Coordinate at which the inputs differ (strong-distributed only, 0-based).
  std::optional<std::size_t> differing_source;

  friend bool operator==(const Witness&, const Witness&) = default;
};

/// Index of the unique differing coordinate, if exactly one differs.
inline std::optional<std::size_t> hamming_one(const InputEvent& a, const InputEvent& b) {
  if (a.arity() != b.arity()) throw InvalidArgument("hamming_one: arity mismatch");
  std::optional<std::size_t> at;
  for (std::size_t j = 0; j < a.arity(); ++j) {
    if (a[j] == b[j]) continue;
    if (at) return std::nullopt;
    at = j;
  }
  return at;
}

namespace detail {

inline bool better(const Witness& w, const std::optional<Witness>& best) {
  return !best || std::pair(w.index_a, w.index_b) < std::pair(best->index_a, best->index_b);
}

/// Event positions are grouped by a key; within a group the least violating
/// pair is (first position, first position whose input differs from it).
/// Any later pair in the group would have a larger first index.
template <typename Key, typename Hash = std::hash<Key>>
struct FirstDiffIndex {
  struct Group {
    std::size_t first;
    std::optional<std::size_t> first_diff;
  };
  std::unordered_map<Key, Group, Hash> groups;

  template <typename Differs>
  void add(const Key& key, std::size_t pos, const Trace& t, Differs differs) {
    auto [it, inserted] = groups.try_emplace(key, Group{pos, std::nullopt});
    if (!inserted && !it->second.first_diff && differs(t[it->second.first], t[pos]))
      it->second.first_diff = pos;
  }
};

struct OutputMaskKey {
  InputEvent rest;
  Value output;
  friend bool operator==(const OutputMaskKey&, const OutputMaskKey&) = default;
};

struct OutputMaskHash {
  std::size_t operator()(const OutputMaskKey& k) const noexcept {
    std::size_t seed = std::hash<InputEvent>{}(k.rest);
    hash_combine(seed, std::hash<Value>{}(k.output));
    return seed;
  }
};

}  // namespace detail

/// Least (index_a, index_b) pair with different inputs and equal outputs.
inline std::optional<Witness> witness_mono(const Trace& trace) {
  detail::FirstDiffIndex<Value> index;
  for (std::size_t i = 0; i < trace.size(); ++i)
    index.add(trace[i].output, i, trace,
              [](const Event& a, const Event& b) { return a.input != b.input; });
  std::optional<Witness> best;
  for (const auto& [_, g] : index.groups) {
    if (!g.first_diff) continue;
    Witness w{Mode::kMonolithic, g.first, *g.first_diff, std::nullopt};
    if (detail::better(w, best)) best = w;
  }
  return best;
}

inline bool sat_phi_m(const Trace& trace) { return !witness_mono(trace).has_value(); }

/// Least (index_a, index_b) pair at Hamming distance one with equal outputs.
inline std::optional<Witness> witness_sdm(const Trace& trace) {
  std::optional<Witness> best;
  for (std::size_t j = 0; j < trace.arity(); ++j) {
    // Same rest-of-tuple and same output: distinct inputs in the group differ
    // exactly at coordinate j.
    detail::FirstDiffIndex<detail::OutputMaskKey, detail::OutputMaskHash> index;
    for (std::size_t i = 0; i < trace.size(); ++i)
      index.add({trace[i].input.without(j), trace[i].output}, i, trace,
                [j](const Event& a, const Event& b) { return a.input[j] != b.input[j]; });
    for (const auto& [_, g] : index.groups) {
      if (!g.first_diff) continue;
      Witness w{Mode::kStrongDistributed, g.first, *g.first_diff, j};
      if (detail::better(w, best)) best = w;
    }
  }
  return best;
}

inline bool sat_phi_sdm(const Trace& trace) { return !witness_sdm(trace).has_value(); }

inline std::optional<Witness> witness(Mode mode, const Trace& trace) {
  return mode == Mode::kMonolithic ? witness_mono(trace) : witness_sdm(trace);
}

inline bool sat(Mode mode, const Trace& trace) { return !witness(mode, trace).has_value(); }

/// Whether every element of `domain` occurs as an input of `trace`.
/// Throws InputOutsideDomain for an observed input the domain lacks.
inline bool in_ex(const InputDomain& domain, const Trace& trace) {
  if (!trace.empty() && trace.arity() != domain.arity())
    throw InvalidArgument("in_ex: trace arity does not match domain arity");
  if (trace.size() < domain.size()) return false;
  std::unordered_set<InputEvent> seen;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& in = trace[i].input;
    if (!domain.contains(in))
      throw InputOutsideDomain(i, "input " + to_string(in) + " at position " +
                                      std::to_string(i) + " is outside the domain");
    seen.insert(in);
    if (seen.size() == domain.size()) return true;
  }
  return false;
}

}  // namespace datamin
