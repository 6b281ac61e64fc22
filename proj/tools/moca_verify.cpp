#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "moca/explorer.hpp"
#include "moca/parser.hpp"
#include "moca/report.hpp"
#include "moca/transform.hpp"

namespace {

using moca::ExecState;
using moca::Machine;

enum Exit { kOk = 0, kFound = 1, kUsage = 2, kBudget = 3 };

struct Config {
  std::string mode;
  std::string input;
  bool json = false;
  long max_seqs = 1'000'000;
  int max_depth = 10'000;
  int max_events = 12;
  int jobs = 1;
  bool emit_transformed = false;
  std::string dump_relations;
  bool dump_trace = false;
  std::string replay;
  bool no_early_write = false;
  bool no_expect = false;
  bool dot = false;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

void dump_relations(const Machine& m, const std::vector<int>& schedule, const std::string& prefix) {
  ExecState s = moca::run_sequence(m, schedule);
  auto rel = moca::compute_relations(s.seq, m.units().objects);
  write_file(prefix + ".json", moca::relations_json(m.program(), s.seq, rel).dump(2) + "\n");
  write_file(prefix + ".dot", moca::relations_dot(m.program(), s.seq, rel));
}

int replay(const Config& c, const Machine& m) {
  auto schedule = moca::parse_schedule(m, slurp(c.replay));
  ExecState s = moca::run_sequence(m, schedule);
  auto rel = moca::compute_relations(s.seq, m.units().objects);
  auto verdict = moca::check_moca(s.seq, rel);
  auto asserts = moca::check_asserts(m.program(), s);
  auto races = moca::detect_na_races(s.seq, rel);
  bool terminal = m.terminal(s);
  if (c.json) {
    moca::Json j;
    j["schema_version"] = moca::kReportSchemaVersion;
    j["terminal"] = terminal;
    j["coherent"] = verdict.ok();
    j["failed_rules"] = moca::Json::array();
    for (const auto& [rule, w] : verdict.failures) j["failed_rules"].push_back(rule);
    j["violations"] = moca::Json::array();
    for (int a : asserts.violated) j["violations"].push_back(m.program().asserts[static_cast<std::size_t>(a)].text);
    j["na_races"] = moca::Json::array();
    for (auto [a, b] : races)
      j["na_races"].push_back({moca::event_name(m.program(), s.seq, a), moca::event_name(m.program(), s.seq, b)});
    j["trace"] = moca::dump_trace(m, schedule);
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << moca::dump_trace(m, schedule);
    std::cout << (terminal ? "terminal" : "not terminal") << ", " << (verdict.ok() ? "coherent" : "incoherent");
    for (const auto& [rule, w] : verdict.failures) std::cout << ' ' << rule;
    std::cout << '\n';
    for (int a : asserts.violated)
      std::cout << "violation: assert never " << m.program().asserts[static_cast<std::size_t>(a)].text << '\n';
    for (auto [a, b] : races)
      std::cout << "na race: " << moca::event_name(m.program(), s.seq, a) << " ~ "
                << moca::event_name(m.program(), s.seq, b) << '\n';
  }
  if (!c.dump_relations.empty()) dump_relations(m, schedule, c.dump_relations);
  if (!verdict.ok() || !asserts.violated.empty() || !races.empty()) return kFound;
  return kOk;
}

int verify(const Config& c, const moca::Program& p) {
  moca::Machine m(c.no_early_write ? p : moca::early_write_transform(p));
  if (!c.replay.empty()) return replay(c, m);
  moca::ExploreOptions opts;
  opts.max_sequences = c.max_seqs;
  opts.max_depth = c.max_depth;
  auto r = moca::explore(m, opts);
  bool mismatch = !c.no_expect && p.expected_traces && r.complete && *p.expected_traces != r.distinct_traces;
  if (mismatch)
    r.diagnostics.push_back("expected " + std::to_string(*p.expected_traces) + " traces, found " +
                            std::to_string(r.distinct_traces));
  if (c.json)
    std::cout << moca::report_json(m, r).dump(2) << '\n';
  else
    std::cout << moca::report_text(m, r);
  if (c.dump_trace) {
    for (const auto& t : r.traces) {
      std::cout << "trace " << moca::detail::hex_id(t.id) << '\n' << moca::dump_trace(m, t.schedule);
    }
  }
  if (!c.dump_relations.empty() && !r.traces.empty()) {
    const auto& witness = !r.violations.empty() ? r.violations.front().schedule : r.traces.front().schedule;
    dump_relations(m, witness, c.dump_relations);
  }
  if (!r.complete) return kBudget;
  if (!r.violations.empty() || !r.na_races.empty() || mismatch || r.incoherent_sequences > 0) return kFound;
  return kOk;
}

int enumerate(const Config& c, const moca::Program& p) {
  moca::Machine m(c.no_early_write ? p : moca::early_write_transform(p));
  auto e = moca::enumerate_all(m, c.max_events);
  if (c.json) {
    moca::Json j;
    j["schema_version"] = moca::kReportSchemaVersion;
    j["program"] = p.name;
    j["interleavings"] = e.interleavings;
    j["coherent_sequences"] = e.sequences.size();
    j["distinct_traces"] = e.ids.size();
    j["trace_ids"] = moca::Json::array();
    for (auto id : e.ids) j["trace_ids"].push_back(moca::detail::hex_id(id));
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "program " << p.name << "\ninterleavings " << e.interleavings << "\ncoherent_sequences "
              << e.sequences.size() << "\ndistinct_traces " << e.ids.size() << '\n';
  }
  bool mismatch = !c.no_expect && p.expected_traces && *p.expected_traces != static_cast<long>(e.ids.size());
  return mismatch ? kFound : kOk;
}

int transform(const Config& c, const moca::Program& p) {
  auto t = moca::early_write_transform(p);
  auto v = moca::check_spr(p, t);
  if (c.emit_transformed) std::cout << moca::print_program(t);
  if (c.json) {
    moca::Json j;
    j["schema_version"] = moca::kReportSchemaVersion;
    j["spr1"] = v.spr1;
    j["spr2"] = v.spr2;
    j["spr3"] = v.spr3;
    j["notes"] = v.notes;
    std::cout << j.dump(2) << '\n';
  } else if (!c.emit_transformed) {
    std::cout << "spr1 " << (v.spr1 ? "ok" : "fail") << "\nspr2 " << (v.spr2 ? "ok" : "fail") << "\nspr3 "
              << (v.spr3 ? "ok" : "fail") << '\n';
    for (const auto& n : v.notes) std::cout << "  " << n << '\n';
  }
  return v.ok() ? kOk : kFound;
}

int relations(const Config& c, const moca::Program& p) {
  moca::Machine m(c.no_early_write ? p : moca::early_write_transform(p));
  std::vector<int> schedule;
  if (!c.replay.empty()) {
    schedule = moca::parse_schedule(m, slurp(c.replay));
  } else {
    auto r = moca::explore(m);
    if (r.traces.empty()) throw std::runtime_error("no maximal sequence to show");
    schedule = r.traces.front().schedule;
  }
  ExecState s = moca::run_sequence(m, schedule);
  auto rel = moca::compute_relations(s.seq, m.units().objects);
  if (c.dot)
    std::cout << moca::relations_dot(m.program(), s.seq, rel);
  else
    std::cout << moca::relations_json(m.program(), s.seq, rel).dump(2) << '\n';
  if (!c.dump_relations.empty()) dump_relations(m, schedule, c.dump_relations);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stateless model checker for C11 litmus programs under multi-copy atomicity"};
  Config c;
  app.add_option("mode", c.mode, "verify | enumerate | transform | relations")
      ->required()
      ->check(CLI::IsMember({"verify", "enumerate", "transform", "relations"}));
  app.add_option("file", c.input, "litmus program")->required();
  app.add_flag("--json", c.json, "machine-readable output");
  app.add_option("--max-seqs", c.max_seqs, "maximal sequences before giving up")->check(CLI::PositiveNumber);
  app.add_option("--max-depth", c.max_depth, "sequence length before giving up")->check(CLI::PositiveNumber);
  app.add_option("--max-events", c.max_events, "enumerate: refuse programs above this many events");
  app.add_flag("--emit-transformed", c.emit_transformed, "transform: print the transformed program");
  app.add_option("--dump-relations", c.dump_relations, "write PREFIX.json and PREFIX.dot for the witness");
  app.add_flag("--dot", c.dot, "relations: print DOT instead of JSON");
  app.add_flag("--dump-trace", c.dump_trace, "print a step-by-step replay of every distinct trace");
  app.add_option("--replay", c.replay, "replay a schedule file instead of exploring");
  app.add_option("--jobs", c.jobs, "worker count (the search runs on one worker)")->check(CLI::PositiveNumber);
  app.add_flag("--no-early-write", c.no_early_write, "skip the early-write transformation");
  app.add_flag("--no-expect", c.no_expect, "do not enforce `expect traces`");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }
  try {
    moca::Program p = moca::parse_program(slurp(c.input));
    if (c.mode == "verify") return verify(c, p);
    if (c.mode == "enumerate") return enumerate(c, p);
    if (c.mode == "transform") return transform(c, p);
    return relations(c, p);
  } catch (const moca::ParseError& e) {
    for (const auto& d : e.diagnostics())
      std::cerr << c.input << ':' << d.line << ':' << d.column << ": " << d.message << '\n';
    return kUsage;
  } catch (const moca::ReplayError& e) {
    std::cerr << "replay: " << e.what() << '\n';
    return kUsage;
  } catch (const moca::EnumerationRefused& e) {
    std::cerr << "enumerate: " << e.what() << '\n';
    return kBudget;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
}
