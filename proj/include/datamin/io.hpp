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

// File formats.
//
//   trace / function table (JSONL):  {"in":["5000"],"out":"true"}
//   input list (JSONL):              {"in":["5000"]}
//   domain (JSON):                   {"sources":[{"set":["a","b"]},{"range":[0,9]}]}
//   pre-processor table (JSONL):     {"from":["7200"],"to":["5000"]}

#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "datamin/error.hpp"
#include "datamin/trace.hpp"

namespace datamin::io {

namespace detail {

using json = nlohmann::json;

inline json parse_object(const std::string& line, std::size_t lineno) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(lineno, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError(lineno, "expected a JSON object");
  return j;
}

inline void require_keys(const json& j, std::initializer_list<const char*> keys,
                         std::size_t lineno) {
  for (const char* k : keys)
    if (!j.contains(k)) throw ParseError(lineno, std::string("missing field '") + k + "'");
  if (j.size() != keys.size()) {
    for (const auto& [key, _] : j.items()) {
      if (std::find_if(keys.begin(), keys.end(), [&](const char* k) { return key == k; }) ==
          keys.end())
        throw ParseError(lineno, "unexpected field '" + key + "'");
    }
  }
}

inline Value to_value(const json& j, std::size_t lineno) {
  if (!j.is_string()) throw ParseError(lineno, "expected a string value");
  try {
    return Value(j.get<std::string>());
  } catch (const InvalidArgument& e) {
    throw ParseError(lineno, e.what());
  }
}

inline InputEvent to_input(const json& j, std::size_t lineno) {
  if (!j.is_array() || j.empty())
    throw ParseError(lineno, "expected a non-empty array of strings");
  std::vector<Value> coords;
  coords.reserve(j.size());
  for (const auto& c : j) coords.push_back(to_value(c, lineno));
  return InputEvent(std::move(coords));
}

inline json from_input(const InputEvent& in) {
  json a = json::array();
  for (const auto& v : in.coords()) a.push_back(v.text());
  return a;
}

/// Calls `fn(line, lineno)` for every non-empty line.
template <typename Fn>
void for_each_line(std::istream& is, Fn&& fn) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    fn(line, lineno);
  }
}

inline std::ifstream open(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open '" + path + "'");
  return is;
}

}  // namespace detail

inline Event parse_event(const std::string& line, std::size_t lineno = 1) {
  auto j = detail::parse_object(line, lineno);
  detail::require_keys(j, {"in", "out"}, lineno);
  return Event{detail::to_input(j["in"], lineno), detail::to_value(j["out"], lineno)};
}

inline std::string serialize_event(const Event& e) {
  detail::json j = {{"in", detail::from_input(e.input)}, {"out", e.output.text()}};
  return j.dump();
}

/// Parses a JSONL trace; Σ# is enforced through Trace::append.
inline Trace parse_trace(std::istream& is) {
  Trace trace;
  std::vector<std::size_t> lines;
  detail::for_each_line(is, [&](const std::string& line, std::size_t lineno) {
    Event e = parse_event(line, lineno);
    try {
      trace = std::move(trace).append(std::move(e));
    } catch (const DeterminismViolation& dv) {
      throw DeterminismViolation(dv.prior_index(),
                                 std::string(dv.what()) + " (first seen on line " +
                                     std::to_string(lines[dv.prior_index()]) + ")",
                                 lineno);
    } catch (const InvalidArgument& ia) {
      throw ParseError(lineno, ia.what());
    }
    lines.push_back(lineno);
  });
  return trace;
}

inline Trace parse_trace(const std::string& text) {
  std::istringstream is(text);
  return parse_trace(is);
}

inline Trace load_trace(const std::string& path) {
  auto is = detail::open(path);
  return parse_trace(is);
}

inline void serialize_trace(const Trace& trace, std::ostream& os) {
  for (const auto& e : trace) os << serialize_event(e) << '\n';
}

inline std::string serialize_trace(const Trace& trace) {
  std::ostringstream os;
  serialize_trace(trace, os);
  return os.str();
}

/// Lines of {"in":[...]}: the input column of a trace.
inline std::vector<InputEvent> parse_inputs(std::istream& is) {
  std::vector<InputEvent> out;
  detail::for_each_line(is, [&](const std::string& line, std::size_t lineno) {
    auto j = detail::parse_object(line, lineno);
    detail::require_keys(j, {"in"}, lineno);
    auto in = detail::to_input(j["in"], lineno);
    if (!out.empty() && out.front().arity() != in.arity())
      throw ParseError(lineno, "input arity differs from the first line");
    out.push_back(std::move(in));
  });
  return out;
}

inline InputDomain parse_domain(const std::string& text) {
  auto j = detail::parse_object(text, 1);
  detail::require_keys(j, {"sources"}, 1);
  const auto& sources = j["sources"];
  if (!sources.is_array() || sources.empty())
    throw ParseError(1, "'sources' must be a non-empty array");
  std::vector<SourceDomain> out;
  try {
    for (const auto& s : sources) {
      if (!s.is_object() || s.size() != 1)
        throw ParseError(1, "each source must be {\"set\":[...]} or {\"range\":[lo,hi]}");
      if (s.contains("set")) {
        const auto& set = s["set"];
        if (!set.is_array() || set.empty()) throw ParseError(1, "'set' must be a non-empty array");
        std::vector<Value> values;
        for (const auto& v : set) values.push_back(detail::to_value(v, 1));
        out.push_back(SourceDomain::set(std::move(values)));
      } else if (s.contains("range")) {
        const auto& r = s["range"];
        if (!r.is_array() || r.size() != 2 || !r[0].is_number_integer() ||
            !r[1].is_number_integer())
          throw ParseError(1, "'range' must be [lo,hi] with integer bounds");
        for (const auto& b : r)
          if (b.is_number_unsigned() &&
              b.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX))
            throw ParseError(1, "'range' bound does not fit in 64-bit signed integers");
        out.push_back(SourceDomain::range(r[0].get<std::int64_t>(), r[1].get<std::int64_t>()));
      } else {
        throw ParseError(1, "each source must be {\"set\":[...]} or {\"range\":[lo,hi]}");
      }
    }
    return InputDomain(std::move(out));
  } catch (const InvalidArgument& e) {
    throw ParseError(1, e.what());
  }
}

inline InputDomain load_domain(const std::string& path) {
  auto is = detail::open(path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_domain(ss.str());
}

inline std::string serialize_domain(const InputDomain& domain) {
  detail::json sources = detail::json::array();
  for (const auto& s : domain.sources()) {
    if (s.is_range()) {
      auto [lo, hi] = s.bounds();
      sources.push_back({{"range", {lo, hi}}});
    } else {
      detail::json set = detail::json::array();
      for (const auto& v : s.values()) set.push_back(v.text());
      sources.push_back({{"set", set}});
    }
  }
  return detail::json{{"sources", sources}}.dump();
}

/// One row of a pre-processor table.
struct Mapping {
  InputEvent from;
  InputEvent to;
};

inline std::vector<Mapping> parse_mappings(std::istream& is) {
  std::vector<Mapping> out;
  detail::for_each_line(is, [&](const std::string& line, std::size_t lineno) {
    auto j = detail::parse_object(line, lineno);
    detail::require_keys(j, {"from", "to"}, lineno);
    Mapping m{detail::to_input(j["from"], lineno), detail::to_input(j["to"], lineno)};
    if (m.from.arity() != m.to.arity())
      throw ParseError(lineno, "'from' and 'to' arities differ");
    if (!out.empty() && out.front().from.arity() != m.from.arity())
      throw ParseError(lineno, "arity differs from the first line");
    out.push_back(std::move(m));
  });
  return out;
}

inline std::string serialize_mapping(const Mapping& m) {
  detail::json j = {{"from", detail::from_input(m.from)}, {"to", detail::from_input(m.to)}};
  return j.dump();
}

}  // namespace datamin::io
