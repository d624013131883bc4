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

// datamin: command-line front end.
//
// Exit codes: 0 TRUE / minimal, 1 FALSE / not minimal, 2 UNKNOWN, 3 error.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "datamin.hpp"

namespace {

using datamin::Event;
using datamin::InputDomain;
using datamin::InputEvent;
using datamin::Mode;
using datamin::Trace;
using datamin::Verdict;
using json = nlohmann::ordered_json;

constexpr int kExitError = 3;

int exit_code(Verdict v) {
  switch (v) {
    case Verdict::kTrue: return 0;
    case Verdict::kFalse: return 1;
    case Verdict::kUnknown: return 2;
  }
  return kExitError;
}

/// DATAMIN_BUDGET, if set, replaces every default budget.
std::optional<std::uint64_t> env_budget() {
  const char* s = std::getenv("DATAMIN_BUDGET");
  if (!s || !*s) return std::nullopt;
  auto n = datamin::detail::parse_int64(s);
  if (!n || *n <= 0) throw datamin::InvalidArgument("DATAMIN_BUDGET must be a positive integer");
  return static_cast<std::uint64_t>(*n);
}

std::uint64_t budget_or(std::uint64_t fallback) { return env_budget().value_or(fallback); }

Mode parse_mode(const std::string& s) {
  if (s == "mono") return Mode::kMonolithic;
  if (s == "sdist") return Mode::kStrongDistributed;
  throw datamin::InvalidArgument("mode must be mono or sdist, got '" + s + "'");
}

struct ProgramFlags {
  std::string spec;
  bool per_call = false;
  std::int64_t timeout_ms = 10'000;
  std::optional<std::size_t> arity;
};

void add_program_flags(CLI::App* cmd, ProgramFlags& f) {
  cmd->add_option("--program", f.spec, "builtin:<name>, table:<file> or exec:<argv...>")
      ->required();
  cmd->add_flag("--per-call", f.per_call, "spawn a fresh process per input (exec: only)");
  cmd->add_option("--timeout", f.timeout_ms, "reply timeout in milliseconds (exec: only)")
      ->check(CLI::PositiveNumber);
}

/// `fallback_arity` is the domain arity when a domain is known.
datamin::ProgramHandle make_program(const ProgramFlags& f,
                                    std::optional<std::size_t> fallback_arity) {
  const std::string& spec = f.spec;
  if (spec.starts_with("builtin:")) return datamin::builtin(spec.substr(8), fallback_arity);
  if (spec.starts_with("table:")) return datamin::TableProgram::from_file(spec.substr(6));
  if (spec.starts_with("exec:")) {
    std::istringstream is(spec.substr(5));
    std::vector<std::string> argv;
    for (std::string w; is >> w;) argv.push_back(w);
    datamin::CommandOptions opts;
    opts.persistent = !f.per_call;
    opts.timeout = std::chrono::milliseconds(f.timeout_ms);
    return std::make_unique<datamin::CommandProgram>(std::move(argv), fallback_arity.value_or(1),
                                                     opts);
  }
  throw datamin::InvalidArgument("program spec must start with builtin:, table: or exec:, got '" +
                                 spec + "'");
}

/// `builtin:<name>` for a named pre-processor, otherwise a mapping file.
datamin::MinimiserTable load_preprocessor(const std::string& spec, const InputDomain& domain) {
  if (spec.starts_with("builtin:")) {
    auto fn = datamin::preprocessors::by_name(spec.substr(8));
    if (!fn)
      throw datamin::InvalidArgument("unknown pre-processor '" + spec.substr(8) +
                                     "' (two-case, three-band, identity)");
    return datamin::tabulate_preprocessor(domain, *fn, budget_or(1'000'000));
  }
  std::ifstream is(spec);
  if (!is) throw datamin::Error("cannot open '" + spec + "'");
  return datamin::MinimiserTable(datamin::io::parse_mappings(is));
}

json input_json(const InputEvent& in) {
  json a = json::array();
  for (const auto& v : in.coords()) a.push_back(v.text());
  return a;
}

json witness_json(const std::optional<datamin::Witness>& w, const Trace& t) {
  if (!w) return nullptr;
  json j = {{"index_a", w->index_a},
            {"index_b", w->index_b},
            {"input_a", input_json(t[w->index_a].input)},
            {"input_b", input_json(t[w->index_b].input)},
            {"output", t[w->index_a].output.text()}};
  if (w->differing_source) j["differing_source"] = *w->differing_source;
  return j;
}

void print_witness(std::ostream& os, const std::optional<datamin::Witness>& w, const Trace& t) {
  if (!w) return;
  const auto& a = t[w->index_a];
  const auto& b = t[w->index_b];
  os << "witness: positions " << w->index_a << " and " << w->index_b << ", inputs "
     << to_string(a.input) << " and " << to_string(b.input) << " both yield " << a.output.text();
  if (w->differing_source) os << ", differing source " << *w->differing_source;
  os << '\n';
}

std::shared_ptr<const InputDomain> maybe_domain(const std::string& path) {
  if (path.empty()) return nullptr;
  return std::make_shared<const InputDomain>(datamin::io::load_domain(path));
}

// ---------------------------------------------------------------------------

struct CheckTraceArgs {
  std::string trace, mode = "mono", domain;
  bool json = false;
};

int run_check_trace(const CheckTraceArgs& a) {
  const Trace trace = datamin::io::load_trace(a.trace);
  datamin::MonitorConfig cfg{parse_mode(a.mode), maybe_domain(a.domain)};
  const auto result = datamin::monitor_eval(cfg, trace);
  if (a.json) {
    json prefixes = json::array();
    for (const auto& r : datamin::monitor_prefixes(cfg, trace)) prefixes.push_back(to_string(r.verdict));
    json out = {{"command", "check-trace"},
                {"mode", to_string(cfg.mode)},
                {"events", trace.size()},
                {"verdict", to_string(result.verdict)},
                {"witness", witness_json(result.witness, trace)},
                {"prefix_verdicts", prefixes}};
    std::cout << out.dump(2) << '\n';
  } else {
    std::cout << to_string(result.verdict) << '\n';
    print_witness(std::cout, result.witness, trace);
  }
  return exit_code(result.verdict);
}

struct MonitorArgs {
  ProgramFlags program;
  std::string mode = "mono", domain, inputs, pre;
  bool random = false, json = false;
  std::uint64_t seed = 0;
  std::uint64_t max_steps = 100'000;
};

int run_monitor(const MonitorArgs& a) {
  auto domain = maybe_domain(a.domain);
  if (a.random && !domain) throw datamin::InvalidArgument("--random needs --domain");
  if (a.random == !a.inputs.empty())
    throw datamin::InvalidArgument("exactly one of --inputs and --random is required");
  if (!a.pre.empty() && !domain) throw datamin::InvalidArgument("--pre needs --domain");

  auto program = make_program(a.program, domain ? std::optional(domain->arity()) : std::nullopt);
  if (!a.pre.empty())
    program = datamin::compose(std::move(program), load_preprocessor(a.pre, *domain));

  std::vector<InputEvent> inputs;
  if (!a.inputs.empty()) {
    std::ifstream is(a.inputs);
    if (!is) throw datamin::Error("cannot open '" + a.inputs + "'");
    inputs = datamin::io::parse_inputs(is);
  }
  std::mt19937_64 rng(a.seed);

  datamin::Monitor monitor(datamin::MonitorConfig{parse_mode(a.mode), domain});
  Trace observed;
  datamin::MonitorResult r;
  std::uint64_t step = 0;
  for (; step < a.max_steps; ++step) {
    InputEvent in;
    if (a.random) {
      in = domain->at(datamin::detail::bounded(rng, domain->size()));
    } else {
      if (step >= inputs.size()) break;
      in = inputs[step];
    }
    const Event e = program->observe(in);
    observed = std::move(observed).append(e);
    r = monitor.step(e);
    if (a.json) {
      json line = {{"step", step + 1},
                   {"in", input_json(in)},
                   {"observed", input_json(e.input)},
                   {"out", e.output.text()},
                   {"verdict", to_string(r.verdict)}};
      std::cout << line.dump() << '\n';
    } else {
      std::cout << "step " << step + 1 << ": " << to_string(in);
      if (e.input != in) std::cout << " -> " << to_string(e.input);
      std::cout << " => " << e.output.text() << "  " << to_string(r.verdict) << '\n';
    }
    if (conclusive(r.verdict)) {
      ++step;
      break;
    }
  }
  if (a.json) {
    json summary = {{"verdict", to_string(r.verdict)},
                    {"steps", step},
                    {"witness", witness_json(r.witness, observed)}};
    std::cout << summary.dump() << '\n';
  } else {
    std::cout << to_string(r.verdict) << " after " << step << " step" << (step == 1 ? "" : "s")
              << '\n';
    print_witness(std::cout, r.witness, observed);
  }
  return exit_code(r.verdict);
}

struct TestArgs {
  ProgramFlags program;
  std::string mode = "mono", domain, strategy = "rand", pre;
  std::uint64_t seed = 0;
  bool json = false, probe_twice = false;
};

int run_test_cmd(const TestArgs& a) {
  const InputDomain domain = datamin::io::load_domain(a.domain);
  auto program = make_program(a.program, domain.arity());
  if (!a.pre.empty()) program = datamin::compose(std::move(program), load_preprocessor(a.pre, domain));

  datamin::TestOptions opts;
  opts.mode = parse_mode(a.mode);
  if (a.strategy == "rand")
    opts.strategy = datamin::Strategy::kRandomPermutation;
  else if (a.strategy == "lex")
    opts.strategy = datamin::Strategy::kLexicographic;
  else
    throw datamin::InvalidArgument("strategy must be rand or lex, got '" + a.strategy + "'");
  opts.seed = a.seed;
  opts.probe_twice = a.probe_twice;

  const auto report = datamin::run_test(*program, domain, opts);
  if (a.json) {
    json out = {{"command", "test"},
                {"mode", to_string(opts.mode)},
                {"verdict", to_string(report.verdict)},
                {"steps", report.steps},
                {"domain_size", domain.size()},
                {"strategy", to_string(report.strategy)},
                {"seed", report.seed ? json(*report.seed) : json(nullptr)},
                {"witness", witness_json(report.witness, report.trace)}};
    std::cout << out.dump(2) << '\n';
  } else {
    std::cout << to_string(report.verdict) << '\n'
              << "steps: " << report.steps << " of " << domain.size() << '\n'
              << "strategy: " << to_string(report.strategy);
    if (report.seed) std::cout << " (seed " << *report.seed << ")";
    std::cout << '\n';
    print_witness(std::cout, report.witness, report.trace);
  }
  return exit_code(report.verdict);
}

/// Members rendered as maximal runs of consecutive domain positions.
std::string describe_members(const InputDomain& domain, const std::vector<InputEvent>& members) {
  std::string out;
  std::size_t runs = 0;
  for (std::size_t k = 0; k < members.size();) {
    std::size_t end = k;
    auto pos = *domain.index_of(members[k]);
    while (end + 1 < members.size() && *domain.index_of(members[end + 1]) == pos + (end + 1 - k))
      ++end;
    if (runs++ == 8) {
      out += ", ...";
      break;
    }
    if (!out.empty()) out += ", ";
    out += members[k][0].text();
    if (end > k) out += ".." + members[end][0].text();
    k = end + 1;
  }
  return "{" + out + "}";
}

struct SynthArgs {
  ProgramFlags program;
  std::string domain, out, rep = "least";
  std::uint64_t seed = 0;
  bool json = false;
};

int run_synth(const SynthArgs& a) {
  const InputDomain domain = datamin::io::load_domain(a.domain);
  auto program = make_program(a.program, domain.arity());
  datamin::SynthOptions opts;
  opts.rep = datamin::RepChoice::parse(a.rep);
  opts.visit_seed = a.seed;
  opts.budget = budget_or(opts.budget);

  const auto t0 = std::chrono::steady_clock::now();
  const auto s = datamin::synthesize(*program, domain, opts);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::ofstream os(a.out);
  if (!os) throw datamin::Error("cannot write '" + a.out + "'");
  for (const auto& m : s.table.to_mappings()) os << datamin::io::serialize_mapping(m) << '\n';
  os.close();
  if (!os) throw datamin::Error("failed writing '" + a.out + "'");

  const std::size_t n = s.partition.classes.size();
  if (a.json) {
    json classes = json::array();
    for (const auto& c : s.partition.classes)
      classes.push_back({{"output", c.output.text()},
                         {"size", c.members.size()},
                         {"representative", input_json(s.table.apply(c.members.front()))}});
    json out = {{"command", "synth-min"},
                {"partitions", n},
                {"classes", classes},
                {"seconds", secs},
                {"out", a.out}};
    std::cout << out.dump(2) << '\n';
  } else {
    std::cout << n << " partition" << (n == 1 ? "" : "s") << '\n';
    for (const auto& c : s.partition.classes)
      std::cout << "  " << c.output.text() << ": " << describe_members(domain, c.members) << " -> "
                << s.table.apply(c.members.front())[0].text() << '\n';
    std::cout << "time: " << std::fixed << std::setprecision(4) << secs << " s\n";
  }
  return 0;
}

struct CheckPreArgs {
  ProgramFlags program;
  std::string domain, pre;
  bool json = false;
};

int run_check_pre(const CheckPreArgs& a) {
  const InputDomain domain = datamin::io::load_domain(a.domain);
  auto program = make_program(a.program, domain.arity());
  const auto table = load_preprocessor(a.pre, domain);
  const auto report = datamin::validate_preprocessor(*program, domain, table);
  if (a.json) {
    json failures = json::array();
    for (const auto& f : report.failures)
      failures.push_back({{"kind", to_string(f.kind)},
                          {"input", input_json(f.input)},
                          {"other", f.other ? input_json(*f.other) : json(nullptr)}});
    json out = {{"command", "check-pre"},
                {"is_preprocessor", report.is_preprocessor},
                {"is_minimiser", report.is_minimiser},
                {"failure_count", report.failure_count},
                {"failures", failures}};
    std::cout << out.dump(2) << '\n';
  } else {
    std::cout << "is_preprocessor: " << (report.is_preprocessor ? "true" : "false") << '\n'
              << "is_minimiser: " << (report.is_minimiser ? "true" : "false") << '\n';
    for (const auto& f : report.failures) {
      std::cout << "  " << to_string(f.kind) << ": " << to_string(f.input);
      if (f.other) std::cout << " / " << to_string(*f.other);
      std::cout << '\n';
    }
    if (report.failure_count > report.failures.size())
      std::cout << "  (" << report.failure_count - report.failures.size() << " more)\n";
  }
  return report.is_minimiser ? 0 : 1;
}

struct OracleArgs {
  std::string table, notion = "mono";
  bool json = false;
};

int run_oracle(const OracleArgs& a) {
  const auto table = datamin::FunctionTable::from_trace(datamin::io::load_trace(a.table));
  bool minimal;
  json witness = nullptr;
  std::string text;
  if (a.notion == "mono" || a.notion == "sdist") {
    const auto r = a.notion == "mono" ? datamin::oracle_monolithic_minimal(table)
                                      : datamin::oracle_strong_dist_minimal(table);
    minimal = r.minimal;
    if (r.witness) {
      witness = {{"input_a", input_json(r.witness->a)}, {"input_b", input_json(r.witness->b)}};
      text = "witness: " + to_string(r.witness->a) + " and " + to_string(r.witness->b) +
             " both yield " + table(r.witness->a).text();
    }
  } else if (a.notion == "dist") {
    const auto r = datamin::oracle_dist_minimal(table, budget_or(10'000'000));
    minimal = r.minimal;
    if (r.witness) {
      witness = {{"source", r.witness->source}, {"u", r.witness->u.text()}, {"v", r.witness->v.text()}};
      text = "witness: source " + std::to_string(r.witness->source) + " never separates " +
             r.witness->u.text() + " from " + r.witness->v.text();
    }
  } else {
    throw datamin::InvalidArgument("notion must be mono, sdist or dist, got '" + a.notion + "'");
  }
  if (a.json) {
    json out = {{"command", "oracle"},
                {"notion", a.notion},
                {"minimal", minimal},
                {"witness", witness}};
    std::cout << out.dump(2) << '\n';
  } else {
    std::cout << (minimal ? "minimal" : "not minimal") << '\n';
    if (!text.empty()) std::cout << text << '\n';
  }
  return minimal ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Runtime monitoring and testing of data-minimisation properties", "datamin"};
  app.require_subcommand(1);

  CheckTraceArgs ct;
  auto* c_ct = app.add_subcommand("check-trace", "Decide a recorded trace");
  c_ct->add_option("--trace", ct.trace, "JSONL trace")->required();
  c_ct->add_option("--mode", ct.mode, "mono or sdist");
  c_ct->add_option("--domain", ct.domain, "input domain (enables TRUE)");
  c_ct->add_flag("--json", ct.json, "machine-readable report");

  MonitorArgs mo;
  auto* c_mo = app.add_subcommand("monitor", "Monitor a program online");
  add_program_flags(c_mo, mo.program);
  c_mo->add_option("--mode", mo.mode, "mono or sdist");
  c_mo->add_option("--domain", mo.domain, "input domain");
  c_mo->add_option("--inputs", mo.inputs, "JSONL inputs to replay");
  c_mo->add_flag("--random", mo.random, "sample inputs uniformly from the domain");
  c_mo->add_option("--seed", mo.seed, "sampling seed");
  c_mo->add_option("--max-steps", mo.max_steps, "stop with UNKNOWN after this many events");
  c_mo->add_option("--pre", mo.pre, "pre-processor: mapping file or builtin:<name>");
  c_mo->add_flag("--json", mo.json, "JSON lines output");

  TestArgs te;
  auto* c_te = app.add_subcommand("test", "Drive a program over its whole domain");
  add_program_flags(c_te, te.program);
  c_te->add_option("--domain", te.domain, "input domain the monitor sees")->required();
  c_te->add_option("--mode", te.mode, "mono or sdist");
  c_te->add_option("--strategy", te.strategy, "rand or lex");
  c_te->add_option("--seed", te.seed, "permutation seed");
  c_te->add_option("--pre", te.pre, "pre-processor: mapping file or builtin:<name>");
  c_te->add_flag("--probe-twice", te.probe_twice, "query every input twice and compare");
  c_te->add_flag("--json", te.json, "machine-readable report");

  SynthArgs sy;
  auto* c_sy = app.add_subcommand("synth-min", "Synthesise a minimiser by output partitioning");
  add_program_flags(c_sy, sy.program);
  c_sy->add_option("--domain", sy.domain, "single-source input domain")->required();
  c_sy->add_option("--out", sy.out, "mapping file to write")->required();
  c_sy->add_option("--rep", sy.rep, "least, first or rand:SEED");
  c_sy->add_option("--seed", sy.seed, "visitation seed for --rep first");
  c_sy->add_flag("--json", sy.json, "machine-readable report");

  CheckPreArgs cp;
  auto* c_cp = app.add_subcommand("check-pre", "Validate a pre-processor");
  add_program_flags(c_cp, cp.program);
  c_cp->add_option("--domain", cp.domain, "input domain")->required();
  c_cp->add_option("--pre", cp.pre, "mapping file or builtin:<name>")->required();
  c_cp->add_flag("--json", cp.json, "machine-readable report");

  OracleArgs orc;
  auto* c_or = app.add_subcommand("oracle", "Exhaustive minimality check of a full table");
  c_or->add_option("--table", orc.table, "JSONL function table")->required();
  c_or->add_option("--notion", orc.notion, "mono, sdist or dist");
  c_or->add_flag("--json", orc.json, "machine-readable report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (*c_ct) return run_check_trace(ct);
    if (*c_mo) return run_monitor(mo);
    if (*c_te) return run_test_cmd(te);
    if (*c_sy) return run_synth(sy);
    if (*c_cp) return run_check_pre(cp);
    if (*c_or) return run_oracle(orc);
  } catch (const datamin::ProgramFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    if (!e.stderr_excerpt().empty()) std::cerr << "program stderr:\n" << e.stderr_excerpt() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
