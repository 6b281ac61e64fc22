#include <gtest/gtest.h>

#include <set>

#include "moca/explorer.hpp"
#include "moca/parser.hpp"
#include "moca/transform.hpp"
#include "support.hpp"

using namespace moca;

namespace {

std::set<std::uint64_t> trace_ids(const ExplorationReport& r) {
  std::set<std::uint64_t> out;
  for (const auto& t : r.traces) out.insert(t.id);
  return out;
}

long local(const Program& p, const TraceSummary& t, const std::string& thread, const std::string& name) {
  for (std::size_t i = 0; i < p.threads.size(); ++i) {
    if (p.threads[i].name != thread) continue;
    const auto& ls = p.threads[i].locals;
    auto it = std::find(ls.begin(), ls.end(), name);
    if (it == ls.end()) break;
    auto v = t.locals[i][static_cast<std::size_t>(it - ls.begin())];
    return v ? *v : -1;
  }
  ADD_FAILURE() << "no local " << thread << "." << name;
  return -1;
}

}  // namespace

struct TraceCount {
  const char* program;
  long traces;
};

class CorpusTraces : public ::testing::TestWithParam<TraceCount> {};

TEST_P(CorpusTraces, MatchesExpected) {
  auto r = explore(fixtures::corpus(GetParam().program));
  EXPECT_TRUE(r.complete);
  EXPECT_EQ(r.distinct_traces, GetParam().traces);
  EXPECT_EQ(r.blocked_sequences, 0);
  EXPECT_EQ(r.incoherent_sequences, 0);
  EXPECT_LE(r.distinct_traces, r.sequences_explored);
}

INSTANTIATE_TEST_SUITE_P(Litmus, CorpusTraces,
                         ::testing::Values(TraceCount{"wrc+addrs", 7}, TraceCount{"iriw+addrs", 15},
                                           TraceCount{"ww+rr", 15}, TraceCount{"corr", 3}, TraceCount{"mp", 3},
                                           TraceCount{"simple-sw", 3}),
                         [](const auto& info) {
                           std::string s = info.param.program;
                           for (char& ch : s)
                             if (!std::isalnum(static_cast<unsigned char>(ch))) ch = '_';
                           return s;
                         });

TEST(Explore, IriwNeverDisagreesOnOrder) {
  Program p = fixtures::corpus("iriw+addrs");
  auto r = explore(p);
  EXPECT_TRUE(r.violations.empty());
  Program t = early_write_transform(p);
  for (const auto& tr : r.traces) {
    bool a0 = local(t, tr, "T2", "a") == 0 && local(t, tr, "T2", "r1") == 1;
    bool b0 = local(t, tr, "T4", "b") == 0 && local(t, tr, "T4", "r3") == 1;
    EXPECT_FALSE(a0 && b0);
  }
}

TEST(Explore, SingleThreadHasOneTrace) {
  auto r = explore(parse_program(
      "program one\ninit x = 0, y = 0\nthread T1:\n  store(x, 1, rlx)\n  a = load(x, acq)\n  store(y, a, rel)\n"));
  EXPECT_EQ(r.sequences_explored, 1);
  EXPECT_EQ(r.distinct_traces, 1);
}

TEST(Explore, WwRrExploresAtLeastAsManySequencesAsTraces) {
  auto r = explore(fixtures::corpus("ww+rr"));
  EXPECT_GE(r.sequences_explored, 15);
  EXPECT_EQ(r.distinct_traces, 15);
}

TEST(Explore, BudgetYieldsIncompleteReport) {
  ExploreOptions o;
  o.max_sequences = 2;
  auto r = explore(fixtures::corpus("ww+rr"), o);
  EXPECT_FALSE(r.complete);
  EXPECT_FALSE(r.stop_reason.empty());
  EXPECT_LE(r.sequences_explored, 2);
}

TEST(Explore, Deterministic) {
  auto a = explore(fixtures::corpus("iriw+addrs"));
  auto b = explore(fixtures::corpus("iriw+addrs"));
  ASSERT_EQ(a.traces.size(), b.traces.size());
  for (std::size_t i = 0; i < a.traces.size(); ++i) {
    EXPECT_EQ(a.traces[i].id, b.traces[i].id);
    EXPECT_EQ(a.traces[i].schedule, b.traces[i].schedule);
  }
  EXPECT_EQ(a.sequences_explored, b.sequences_explored);
}

TEST(TraceId, IndependentShadowsCommute) {
  Machine m(parse_program("program ind\ninit x = 0, y = 0\nthread T1:\n  store(x, 1, rlx)\n  store(y, 1, rlx)\n"));
  auto a = fixtures::run(m, "T1 T1 T1/x T1/y");
  auto b = fixtures::run(m, "T1 T1 T1/y T1/x");
  auto ra = compute_relations(a.seq, m.units().objects);
  auto rb = compute_relations(b.seq, m.units().objects);
  EXPECT_EQ(canonical_trace_id(a.seq, ra), canonical_trace_id(b.seq, rb));
}

TEST(TraceId, DifferentRfDiffers) {
  Machine m(fixtures::corpus("mp"));
  auto a = fixtures::run(m, "T1 T1 T1/data T1/flag T2 T2");
  auto b = fixtures::run(m, "T2 T2 T1 T1 T1/data T1/flag");
  auto ra = compute_relations(a.seq, m.units().objects);
  auto rb = compute_relations(b.seq, m.units().objects);
  EXPECT_NE(canonical_trace_id(a.seq, ra), canonical_trace_id(b.seq, rb));
  auto c = fixtures::run(m, "T1 T1 T1/data T1/flag T2 T2");
  EXPECT_EQ(canonical_trace_id(a.seq, ra), canonical_trace_id(c.seq, compute_relations(c.seq, m.units().objects)));
}

TEST(NaRaces, SimpleSwHasTwoRacySequences) {
  auto r = explore(fixtures::corpus("simple-sw"));
  EXPECT_EQ(r.sequences_explored, 3);
  EXPECT_EQ(r.racy_sequence_count, 2);
  EXPECT_FALSE(r.na_races.empty());
}

TEST(NaRaces, AllScHasNone) {
  auto r = explore(fixtures::corpus("sc-sb"));
  EXPECT_EQ(r.racy_sequence_count, 0);
  EXPECT_TRUE(r.na_races.empty());
}

TEST(NaRaces, UnsynchronisedStoresRace) {
  Machine m(parse_program("program r\ninit x = 0\nthread T1:\n  store(x, 1, na)\nthread T2:\n  store(x, 2, na)\n"));
  auto s = fixtures::run(m, "T1 T1/x T2 T2/x");
  auto rel = compute_relations(s.seq, m.units().objects);
  auto races = detect_na_races(s.seq, rel);
  ASSERT_EQ(races.size(), 1u);
  EXPECT_EQ(races[0], std::make_pair(fixtures::pos_of(s.seq, 0, 0), fixtures::pos_of(s.seq, 1, 0)));
}

TEST(Asserts, VacuousPredicateIsViolated) {
  auto r = explore(parse_program("program v\ninit x = 0\nthread T1:\n  a = load(x, rlx)\nassert never (x >= 0)\n"));
  EXPECT_EQ(r.violations.size(), 1u);
}

TEST(Asserts, MessagePassingHolds) { EXPECT_TRUE(explore(fixtures::corpus("mp")).violations.empty()); }

TEST(Asserts, WitnessReplays) {
  Program p = fixtures::corpus("luc10");
  auto r = explore(p);
  ASSERT_FALSE(r.violations.empty());
  Machine m(early_write_transform(p));
  for (const auto& v : r.violations) {
    auto s = run_sequence(m, v.schedule);
    EXPECT_TRUE(m.terminal(s));
    auto out = check_asserts(m.program(), s);
    EXPECT_NE(std::find(out.violated.begin(), out.violated.end(), v.assert_index), out.violated.end());
  }
}

TEST(Asserts, RaceWitnessReplays) {
  Program p = fixtures::corpus("simple-sw");
  auto r = explore(p);
  Machine m(early_write_transform(p));
  for (const auto& x : r.na_races) {
    auto s = run_sequence(m, x.schedule);
    EXPECT_FALSE(detect_na_races(s.seq, compute_relations(s.seq, m.units().objects)).empty());
  }
}

TEST(Enumerate, SingleWriteHasOneInterleaving) {
  auto e = enumerate_all(parse_program("program w\ninit x = 0\nthread T1:\n  store(x, 1, rlx)\n"));
  EXPECT_EQ(e.interleavings, 1);
  EXPECT_EQ(e.ids.size(), 1u);
}

TEST(Enumerate, WwRrHasFifteenTraces) { EXPECT_EQ(enumerate_all(fixtures::corpus("ww+rr")).ids.size(), 15u); }

TEST(Enumerate, MatchesExplorerOnMp) {
  Program p = fixtures::corpus("mp");
  EXPECT_EQ(enumerate_all(p).ids, trace_ids(explore(p)));
}

TEST(Enumerate, RefusesLargePrograms) {
  EnumerateOptions o;
  o.max_events = 3;
  EXPECT_THROW(enumerate_all(fixtures::corpus("iriw+addrs"), o), EnumerationRefused);
}
