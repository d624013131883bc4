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

#include "support/oracles.hpp"

namespace datamin {
namespace {

using testing::Gen;

std::vector<Verdict> column(const MonitorConfig& cfg, const Trace& t) {
  std::vector<Verdict> v;
  for (const auto& r : monitor_prefixes(cfg, t)) v.push_back(r.verdict);
  return v;
}

constexpr Verdict U = Verdict::kUnknown, F = Verdict::kFalse, T = Verdict::kTrue;

const InputDomain& bits2() {
  static const InputDomain d({SourceDomain::set({"0", "1"}), SourceDomain::set({"0", "1"})});
  return d;
}

TEST(Monitor, SalaryTraceColumn) {
  const auto t = io::load_trace(DATAMIN_DATA_DIR "/table1.jsonl");
  const MonitorConfig cfg{Mode::kMonolithic, nullptr};
  EXPECT_EQ(column(cfg, t), (std::vector{U, U, F, F, F}));
  for (const auto& r : monitor_prefixes(cfg, t)) {
    if (r.verdict != F) continue;
    EXPECT_EQ(r.witness->index_a, 0u);
    EXPECT_EQ(r.witness->index_b, 2u);
  }
}

TEST(Monitor, SalaryAgeTraceColumn) {
  const auto t = io::load_trace(DATAMIN_DATA_DIR "/table2.jsonl");
  const MonitorConfig cfg{Mode::kStrongDistributed, nullptr};
  EXPECT_EQ(column(cfg, t), (std::vector{U, U, U, F}));
  const auto r = monitor_eval(cfg, t);
  EXPECT_EQ(r.witness, (Witness{Mode::kStrongDistributed, 1, 3, 1}));
}

TEST(Monitor, XorWithDomain) {
  const auto t = io::load_trace(DATAMIN_DATA_DIR "/xor.jsonl");
  auto sdm = MonitorConfig::with_domain(Mode::kStrongDistributed, bits2());
  EXPECT_EQ(column(sdm, t), (std::vector{U, U, U, T}));
  EXPECT_EQ(monitor_eval(sdm, t).verdict, T);
  auto mono = MonitorConfig::with_domain(Mode::kMonolithic, bits2());
  // (0,1) and (1,0) both yield 1.
  EXPECT_EQ(column(mono, t), (std::vector{U, U, F, F}));
  EXPECT_EQ(monitor_eval(mono, t).witness, (Witness{Mode::kMonolithic, 1, 2, std::nullopt}));
}

TEST(Monitor, TrueNeedsADomain) {
  const auto t = io::load_trace(DATAMIN_DATA_DIR "/xor.jsonl");
  const MonitorConfig cfg{Mode::kStrongDistributed, nullptr};
  EXPECT_EQ(column(cfg, t), (std::vector{U, U, U, U}));
}

TEST(Monitor, SingletonDomainNeedsTwoObservations) {
  auto cfg = MonitorConfig::with_domain(Mode::kMonolithic, InputDomain({SourceDomain::set({"x"})}));
  Monitor m(cfg);
  const Event e{InputEvent{"x"}, Value("1")};
  EXPECT_EQ(m.step(e).verdict, U);
  EXPECT_EQ(m.step(e).verdict, T);
  EXPECT_EQ(monitor_eval(cfg, Trace().append(e)).verdict, U);
  EXPECT_EQ(monitor_eval(cfg, Trace().append(e).append(e)).verdict, T);
}

TEST(Monitor, LatchedMonitorStillChecksItsInputs) {
  auto cfg = MonitorConfig::with_domain(Mode::kMonolithic, bits2());
  Monitor m(cfg);
  m.step({InputEvent{"0", "0"}, Value("a")});
  EXPECT_EQ(m.step({InputEvent{"0", "1"}, Value("a")}).verdict, F);
  EXPECT_EQ(m.step({InputEvent{"1", "1"}, Value("b")}).verdict, F);
  try {
    m.step({InputEvent{"0", "1"}, Value("b")});
    FAIL();
  } catch (const DeterminismViolation& e) {
    EXPECT_EQ(e.prior_index(), 1u);
  }
  EXPECT_THROW(m.step({InputEvent{"2", "1"}, Value("b")}), InputOutsideDomain);
  EXPECT_THROW(m.step({InputEvent{"1"}, Value("b")}), InvalidArgument);
  EXPECT_EQ(m.current().verdict, F);
}

TEST(Monitor, BatchChecksDomainMembership) {
  auto cfg = MonitorConfig::with_domain(Mode::kMonolithic, bits2());
  const Trace t = Trace().append({InputEvent{"0", "0"}, Value("a")}).append({InputEvent{"0", "2"}, Value("b")});
  try {
    (void)monitor_eval(cfg, t);
    FAIL();
  } catch (const InputOutsideDomain& e) {
    EXPECT_EQ(e.position(), 1u);
  }
  EXPECT_THROW(monitor_eval(cfg, Trace().append({InputEvent{"0"}, Value("a")})), InvalidArgument);
}

TEST(Monitor, FirstEventFixesArity) {
  Monitor m(MonitorConfig{Mode::kStrongDistributed, nullptr});
  m.step({InputEvent{"1", "2", "3"}, Value("a")});
  EXPECT_EQ(m.state().arity, 3u);
  EXPECT_EQ(m.state().masked_index.size(), 3u);
  EXPECT_THROW(m.step({InputEvent{"1", "2"}, Value("a")}), InvalidArgument);
}

// Streaming verdicts, batch verdicts and the three-case definition agree on
// every prefix of random traces, with and without a domain.
TEST(Monitor, StreamingBatchAndDefinitionAgree) {
  Gen g(17);
  for (int round = 0; round < 600; ++round) {
    const auto sources = g.sources(g.sizes(g.between(1, 3), 3));
    const auto product = testing::naive_product(sources);
    const auto t = g.trace(sources, g.between(0, 30), g.between(2, 30));
    const bool with_domain = round % 2 == 0;
    for (Mode m : {Mode::kMonolithic, Mode::kStrongDistributed}) {
      MonitorConfig cfg{m, with_domain ? std::make_shared<const InputDomain>(Gen::domain_of(sources))
                                       : nullptr};
      const auto streamed = monitor_prefixes(cfg, t);
      for (std::size_t n = 1; n <= t.size(); ++n) {
        const auto p = t.prefix(n);
        const auto batch = monitor_eval(cfg, p);
        ASSERT_EQ(streamed[n - 1], batch) << "prefix " << n;
        ASSERT_EQ(batch.verdict, testing::naive_verdict(m, with_domain ? &product : nullptr, p));
      }
    }
  }
}

// FALSE appears at the first prefix whose satisfaction fails, with the
// pairwise-scan witness of that prefix.
TEST(Monitor, ViolationIsReportedAtTheEarliestPrefix) {
  Gen g(19);
  for (int round = 0; round < 600; ++round) {
    const auto t = g.trace(g.sources(g.sizes(g.between(1, 3), 4)), g.between(2, 30), 3);
    for (Mode m : {Mode::kMonolithic, Mode::kStrongDistributed}) {
      std::optional<std::size_t> first_bad;
      for (std::size_t n = 2; n <= t.size() && !first_bad; ++n)
        if (testing::naive(m, t.prefix(n))) first_bad = n;
      const auto streamed = monitor_prefixes(MonitorConfig{m, nullptr}, t);
      for (std::size_t n = 1; n <= t.size(); ++n)
        EXPECT_EQ(streamed[n - 1].verdict == F, first_bad && n >= *first_bad);
      if (!first_bad) continue;
      const auto expect = testing::naive(m, t.prefix(*first_bad));
      const auto& w = streamed.back().witness;
      ASSERT_TRUE(w);
      EXPECT_EQ(w->index_a, expect->a);
      EXPECT_EQ(w->index_b, expect->b);
      EXPECT_EQ(w->differing_source, expect->source);
    }
  }
}

/// Every extension of `t` by up to `depth` events over `sources` (outputs
/// drawn from the trace's outputs plus one fresh symbol), respecting Σ#.
template <typename Visit>
void for_each_extension(const Trace& t, const std::vector<InputEvent>& inputs,
                        const std::vector<Value>& outputs, std::size_t depth, Visit visit) {
  visit(t);
  if (depth == 0) return;
  for (const auto& in : inputs) {
    if (auto k = t.find(in)) {
      for_each_extension(t.append({in, t[*k].output}), inputs, outputs, depth - 1, visit);
      continue;
    }
    for (const auto& o : outputs) for_each_extension(t.append({in, o}), inputs, outputs, depth - 1, visit);
  }
}

// A conclusive verdict is kept by every extension; an inconclusive one can
// still move in at least one direction.
TEST(Monitor, ConclusiveVerdictsAreFinal) {
  Gen g(23);
  for (int round = 0; round < 60; ++round) {
    const auto sources = g.sources(g.sizes(g.between(1, 2), 2));
    const auto product = testing::naive_product(sources);
    const auto t = g.trace(sources, g.between(1, 4), 2);
    std::vector<Value> outputs{Value("o0"), Value("o1"), Value("fresh")};
    for (Mode m : {Mode::kMonolithic, Mode::kStrongDistributed}) {
      MonitorConfig cfg{m, std::make_shared<const InputDomain>(Gen::domain_of(sources))};
      const Verdict v = monitor_eval(cfg, t).verdict;
      bool moved = false;
      for_each_extension(t, product, outputs, 2, [&](const Trace& ext) {
        const Verdict w = monitor_eval(cfg, ext).verdict;
        if (conclusive(v)) {
          EXPECT_EQ(w, v);
        }
        moved = moved || w != v;
      });
      if (!conclusive(v)) {
        EXPECT_TRUE(moved);
      }
    }
  }
}

}  // namespace
}  // namespace datamin
