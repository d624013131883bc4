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

// Values, input events, deterministic traces and finite input domains.

#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "datamin/error.hpp"

namespace datamin {

namespace detail {

inline void hash_combine(std::size_t& seed, std::size_t h) noexcept {
  seed ^= h + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

inline bool is_space(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
         c == '\f';
}

/// Optional '-' followed by at least one digit.
inline bool is_decimal(std::string_view s) noexcept {
  if (!s.empty() && s.front() == '-') s.remove_prefix(1);
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

/// Decimal integer without leading zeros and without "-0".
inline bool is_canonical_decimal(std::string_view s) noexcept {
  if (!is_decimal(s)) return false;
  std::string_view digits = s.front() == '-' ? s.substr(1) : s;
  if (digits.size() > 1 && digits.front() == '0') return false;
  if (s.front() == '-' && digits == "0") return false;
  return true;
}

/// Numeric three-way comparison of two decimal tokens of unbounded width.
inline std::strong_ordering compare_decimal(std::string_view a, std::string_view b) {
  const bool neg_a = a.front() == '-';
  const bool neg_b = b.front() == '-';
  auto magnitude = [](std::string_view s) {
    if (s.front() == '-') s.remove_prefix(1);
    auto nz = s.find_first_not_of('0');
    return nz == std::string_view::npos ? std::string_view{} : s.substr(nz);
  };
  auto ma = magnitude(a);
  auto mb = magnitude(b);
  const bool zero_a = ma.empty();
  const bool zero_b = mb.empty();
  const int sign_a = zero_a ? 0 : (neg_a ? -1 : 1);
  const int sign_b = zero_b ? 0 : (neg_b ? -1 : 1);
  if (sign_a != sign_b) return sign_a <=> sign_b;
  std::strong_ordering mag = ma.size() != mb.size() ? ma.size() <=> mb.size()
                                                    : ma.compare(mb) <=> 0;
  return sign_a < 0 ? 0 <=> mag : mag;
}

inline std::optional<std::int64_t> parse_int64(std::string_view s) noexcept {
  if (!is_decimal(s)) return std::nullopt;
  const bool neg = s.front() == '-';
  if (neg) s.remove_prefix(1);
  // Accumulate negatively so INT64_MIN is representable.
  std::int64_t acc = 0;
  for (char c : s) {
    const int d = c - '0';
    if (acc < (std::numeric_limits<std::int64_t>::min() + d) / 10) return std::nullopt;
    acc = acc * 10 - d;
  }
  if (!neg) {
    if (acc == std::numeric_limits<std::int64_t>::min()) return std::nullopt;
    return -acc;
  }
  return acc;
}

}  // namespace detail

/// An opaque, non-empty text token without whitespace. Equality is exact
/// token equality: "5000" and "05000" are different values.
class Value {
 public:
  explicit Value(std::string token) : token_(std::move(token)) {
    if (token_.empty()) throw InvalidArgument("value token must be non-empty");
    if (std::any_of(token_.begin(), token_.end(), detail::is_space))
      throw InvalidArgument("value token '" + token_ + "' contains whitespace");
  }
  explicit Value(std::string_view token) : Value(std::string(token)) {}
  explicit Value(const char* token) : Value(std::string(token)) {}
  explicit Value(std::int64_t number) : token_(std::to_string(number)) {}

  const std::string& text() const noexcept { return token_; }

  friend bool operator==(const Value&, const Value&) = default;
  friend std::strong_ordering operator<=>(const Value& a, const Value& b) {
    return a.token_.compare(b.token_) <=> 0;
  }

 private:
  std::string token_;
};

/// One input tuple (i_1, ..., i_n). Arity 1 is the monolithic case.
class InputEvent {
 public:
  InputEvent() = default;
  explicit InputEvent(std::vector<Value> coords) : coords_(std::move(coords)) {}
  InputEvent(std::initializer_list<std::string_view> tokens) {
    coords_.reserve(tokens.size());
    for (auto t : tokens) coords_.emplace_back(t);
  }

  std::size_t arity() const noexcept { return coords_.size(); }
  const Value& operator[](std::size_t j) const { return coords_[j]; }
  const std::vector<Value>& coords() const noexcept { return coords_; }

  /// The tuple with coordinate `j` removed.
  InputEvent without(std::size_t j) const {
    std::vector<Value> rest;
    rest.reserve(coords_.size() - 1);
    for (std::size_t k = 0; k < coords_.size(); ++k)
      if (k != j) rest.push_back(coords_[k]);
    return InputEvent(std::move(rest));
  }

  friend bool operator==(const InputEvent&, const InputEvent&) = default;
  friend auto operator<=>(const InputEvent& a, const InputEvent& b) {
    return a.coords_ <=> b.coords_;
  }

 private:
  std::vector<Value> coords_;
};

/// "(5000,45)"
inline std::string to_string(const InputEvent& in) {
  std::string out = "(";
  for (std::size_t j = 0; j < in.arity(); ++j) {
    if (j) out += ',';
    out += in[j].text();
  }
  return out + ')';
}

struct Event {
  InputEvent input;
  Value output;

  friend bool operator==(const Event&, const Event&) = default;
};

}  // namespace datamin

template <>
struct std::hash<datamin::Value> {
  std::size_t operator()(const datamin::Value& v) const noexcept {
    return std::hash<std::string>{}(v.text());
  }
};

template <>
struct std::hash<datamin::InputEvent> {
  std::size_t operator()(const datamin::InputEvent& in) const noexcept {
    std::size_t seed = in.arity();
    for (const auto& v : in.coords())
      datamin::detail::hash_combine(seed, std::hash<datamin::Value>{}(v));
    return seed;
  }
};

namespace datamin {

/// A finite input-output word in which equal inputs always carry equal
/// outputs. The only ways to grow a trace check that condition.
class Trace {
 public:
  /// Arity is fixed by the first appended event.
  Trace() = default;
  explicit Trace(std::size_t arity) : arity_(arity) {}

  std::size_t arity() const noexcept { return arity_; }
  std::size_t size() const noexcept { return events_.size(); }
  bool empty() const noexcept { return events_.empty(); }
  const Event& operator[](std::size_t i) const { return events_[i]; }
  const std::vector<Event>& events() const noexcept { return events_; }
  auto begin() const noexcept { return events_.begin(); }
  auto end() const noexcept { return events_.end(); }

  /// trace . e; throws DeterminismViolation or InvalidArgument.
  [[nodiscard]] Trace append(Event e) const& {
    Trace copy = *this;
    copy.push(std::move(e));
    return copy;
  }
  [[nodiscard]] Trace append(Event e) && {
    push(std::move(e));
    return std::move(*this);
  }

  /// First `n` events (clamped to size()).
  Trace prefix(std::size_t n) const {
    Trace p(arity_);
    n = std::min(n, events_.size());
    p.events_.assign(events_.begin(), events_.begin() + static_cast<std::ptrdiff_t>(n));
    for (std::size_t i = 0; i < n; ++i) p.first_.try_emplace(p.events_[i].input, i);
    return p;
  }

  /// Position of the first event carrying `input`.
  std::optional<std::size_t> find(const InputEvent& input) const {
    auto it = first_.find(input);
    if (it == first_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t distinct_inputs() const noexcept { return first_.size(); }

  friend bool operator==(const Trace& a, const Trace& b) {
    return a.events_ == b.events_;
  }

 private:
  void push(Event e) {
    if (e.input.arity() == 0) throw InvalidArgument("input event arity must be >= 1");
    if (arity_ == 0) arity_ = e.input.arity();
    if (e.input.arity() != arity_)
      throw InvalidArgument("event arity " + std::to_string(e.input.arity()) +
                            " does not match trace arity " + std::to_string(arity_));
    auto [it, inserted] = first_.try_emplace(e.input, events_.size());
    if (!inserted && events_[it->second].output != e.output)
      throw DeterminismViolation(
          it->second, "input " + to_string(e.input) + " observed with outputs '" +
                          events_[it->second].output.text() + "' and '" +
                          e.output.text() + "'");
    events_.push_back(std::move(e));
  }

  std::size_t arity_ = 0;
  std::vector<Event> events_;
  std::unordered_map<InputEvent, std::size_t> first_;
};

/// True iff `a`'s events are the first |a| events of `b`.
inline bool is_prefix(const Trace& a, const Trace& b) {
  if (a.arity() && b.arity() && a.arity() != b.arity())
    throw InvalidArgument("is_prefix: arity mismatch");
  if (a.size() > b.size()) return false;
  return std::equal(a.begin(), a.end(), b.begin());
}

/// Finite, non-empty set of values for one input source. Either an explicit
/// set or an inclusive integer range, which is never materialised.
class SourceDomain {
 public:
  static SourceDomain range(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw InvalidArgument("range lower bound exceeds upper bound");
    if (static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) ==
        std::numeric_limits<std::uint64_t>::max())
      throw InvalidArgument("range has more than 2^64 - 1 values");
    SourceDomain d;
    d.repr_ = Range{lo, hi};
    return d;
  }

  static SourceDomain set(std::vector<Value> values) {
    if (values.empty()) throw InvalidArgument("source domain must be non-empty");
    const bool numeric = std::all_of(values.begin(), values.end(), [](const Value& v) {
      return detail::is_decimal(v.text());
    });
    if (numeric) {
      std::sort(values.begin(), values.end(), [](const Value& a, const Value& b) {
        auto c = detail::compare_decimal(a.text(), b.text());
        return c != 0 ? c < 0 : a < b;
      });
    } else {
      std::sort(values.begin(), values.end());
    }
    if (std::adjacent_find(values.begin(), values.end()) != values.end())
      throw InvalidArgument("source domain contains duplicate values");
    Set s{std::move(values), {}};
    for (std::size_t k = 0; k < s.values.size(); ++k) s.index.emplace(s.values[k], k);
    SourceDomain d;
    d.repr_ = std::move(s);
    return d;
  }

  static SourceDomain set(std::initializer_list<std::string_view> tokens) {
    std::vector<Value> v;
    for (auto t : tokens) v.emplace_back(t);
    return set(std::move(v));
  }

  std::uint64_t size() const noexcept {
    if (auto* r = std::get_if<Range>(&repr_))
      return static_cast<std::uint64_t>(r->hi) - static_cast<std::uint64_t>(r->lo) + 1;
    return std::get<Set>(repr_).values.size();
  }

  /// k-th value in canonical order.
  Value at(std::uint64_t k) const {
    if (auto* r = std::get_if<Range>(&repr_))
      return Value(static_cast<std::int64_t>(static_cast<std::uint64_t>(r->lo) + k));
    return std::get<Set>(repr_).values.at(k);
  }

  std::optional<std::uint64_t> index_of(const Value& v) const {
    if (auto* r = std::get_if<Range>(&repr_)) {
      if (!detail::is_canonical_decimal(v.text())) return std::nullopt;
      auto n = detail::parse_int64(v.text());
      if (!n || *n < r->lo || *n > r->hi) return std::nullopt;
      return static_cast<std::uint64_t>(*n) - static_cast<std::uint64_t>(r->lo);
    }
    const auto& idx = std::get<Set>(repr_).index;
    auto it = idx.find(v);
    if (it == idx.end()) return std::nullopt;
    return it->second;
  }

  bool is_range() const noexcept { return std::holds_alternative<Range>(repr_); }
  std::pair<std::int64_t, std::int64_t> bounds() const {
    const auto& r = std::get<Range>(repr_);
    return {r.lo, r.hi};
  }
  const std::vector<Value>& values() const { return std::get<Set>(repr_).values; }

 private:
  struct Range {
    std::int64_t lo;
    std::int64_t hi;
  };
  struct Set {
    std::vector<Value> values;
    std::unordered_map<Value, std::size_t> index;
  };

  SourceDomain() = default;
  std::variant<Range, Set> repr_;
};

/// Product I_1 x ... x I_n of source domains. Elements are indexed in
/// lexicographic order, with the last source varying fastest.
class InputDomain {
 public:
  explicit InputDomain(std::vector<SourceDomain> sources) : sources_(std::move(sources)) {
    if (sources_.empty()) throw InvalidArgument("input domain needs at least one source");
    size_ = 1;
    for (const auto& s : sources_) {
      if (s.size() > std::numeric_limits<std::uint64_t>::max() / size_)
        throw InvalidArgument("input domain size overflows 64 bits");
      size_ *= s.size();
    }
  }

  std::size_t arity() const noexcept { return sources_.size(); }
  std::uint64_t size() const noexcept { return size_; }
  const std::vector<SourceDomain>& sources() const noexcept { return sources_; }
  const SourceDomain& source(std::size_t j) const { return sources_.at(j); }

  InputEvent at(std::uint64_t index) const {
    if (index >= size_) throw InvalidArgument("domain index out of range");
    std::vector<Value> coords(sources_.size(), Value("_"));
    for (std::size_t j = sources_.size(); j-- > 0;) {
      const auto n = sources_[j].size();
      coords[j] = sources_[j].at(index % n);
      index /= n;
    }
    return InputEvent(std::move(coords));
  }

  std::optional<std::uint64_t> index_of(const InputEvent& in) const {
    if (in.arity() != sources_.size()) return std::nullopt;
    std::uint64_t index = 0;
    for (std::size_t j = 0; j < sources_.size(); ++j) {
      auto k = sources_[j].index_of(in[j]);
      if (!k) return std::nullopt;
      index = index * sources_[j].size() + *k;
    }
    return index;
  }

  bool contains(const InputEvent& in) const { return index_of(in).has_value(); }

 private:
  std::vector<SourceDomain> sources_;
  std::uint64_t size_ = 0;
};

/// Every element of the product domain exactly once, in index order.
/// Refuses to materialise more than `limit` elements.
inline std::vector<InputEvent> enumerate(const InputDomain& domain,
                                         std::uint64_t limit = 100'000'000) {
  if (domain.size() > limit)
    throw BudgetExceeded(static_cast<std::size_t>(limit), "domain too large to enumerate");
  std::vector<InputEvent> out;
  out.reserve(static_cast<std::size_t>(domain.size()));
  for (std::uint64_t k = 0; k < domain.size(); ++k) out.push_back(domain.at(k));
  return out;
}

}  // namespace datamin
