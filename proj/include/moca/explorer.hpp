#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "moca/coherence.hpp"
#include "moca/engine.hpp"
#include "moca/relations.hpp"
#include "moca/transform.hpp"

namespace moca {

// ---------------------------------------------------------------------------
// dependence between events

inline bool sc_point(const Event& e) {
  if (e.ord != MemoryOrder::sc || e.is_init()) return false;
  return e.is_shadow() || e.act != Act::write;
}

/// Whether swapping two adjacent events of different units can change the
/// outcome: same-object store updates, a store update against a read of
/// that object (an owner's read only when others write it too), a write
/// issue against a store update of that object when the issuing thread also
/// reads it, a shadow-write against its owner's rmw statements (a failed cas
/// included), and any two sc points.
inline bool events_conflict(const UnitMap& u, const Event& a, const Event& b) {
  if (a.thr == b.thr || a.is_init() || b.is_init()) return false;
  if (sc_point(a) && sc_point(b)) return true;
  if (a.obj < 0 || a.obj != b.obj) return false;
  bool ua = a.is_shadow() || a.act == Act::rmw;
  bool ub = b.is_shadow() || b.act == Act::rmw;
  if (ua && ub) return true;
  if (a.is_shadow() && b.drains && u.owner(a.thr) == b.thr) return true;
  if (b.is_shadow() && a.drains && u.owner(b.thr) == a.thr) return true;
  if (ua && b.is_read()) return u.owner(a.thr) != b.thr || u.reads_own(b.thr, b.obj);
  if (ub && a.is_read()) return u.owner(b.thr) != a.thr || u.reads_own(a.thr, a.obj);
  if (a.act == Act::write && ub) return u.reads_own(a.thr, a.obj);
  if (b.act == Act::write && ua) return u.reads_own(b.thr, b.obj);
  return false;
}

/// Causal order used by the search: unit order, write issue before its
/// shadow-write, conflicting pairs in sequence order, and the visibility
/// edges that shmo1 demands. Rows are transitively closed.
class CausalOrder {
 public:
  /// Appends seq[i]; returns the earlier events racing with it.
  std::vector<int> append(const UnitMap& units, const Sequence& seq, const RelationSet& rel, int i) {
    const SeqEvent& se = seq[static_cast<std::size_t>(i)];
    while (static_cast<int>(pred_.size()) < i) pred_.emplace_back();
    Bits direct;
    std::vector<int> conflicting;
    if (se.ev.is_init()) {
      pred_.emplace_back();
      return {};
    }
    if (auto it = last_.find(se.ev.thr); it != last_.end()) direct.set(static_cast<std::size_t>(it->second));
    last_[se.ev.thr] = i;
    if (se.ev.is_shadow()) direct.set(static_cast<std::size_t>(se.prw));
    for (int k = 0; k < i; ++k) {
      if (events_conflict(units, seq[static_cast<std::size_t>(k)].ev, se.ev)) {
        direct.set(static_cast<std::size_t>(k));
        conflicting.push_back(k);
      }
    }
    int visible_for = se.ev.is_shadow() ? se.prw : (se.ev.act == Act::write ? -1 : i);
    if (visible_for >= 0) {
      for (auto [w, via] : detail::shmo1_sources(seq, rel, visible_for)) {
        (void)via;
        int s = seq[static_cast<std::size_t>(w)].shw;
        if (s >= 0 && s < i) direct.set(static_cast<std::size_t>(s));
      }
    }
    Bits reach;
    direct.for_each([&](std::size_t d) { reach |= pred_[d]; });
    Bits all = reach;
    all |= direct;
    pred_.push_back(std::move(all));
    std::vector<int> races;
    for (int k : conflicting)
      if (!reach.test(static_cast<std::size_t>(k))) races.push_back(k);
    return races;
  }

  bool before(int a, int b) const { return pred_[static_cast<std::size_t>(b)].test(static_cast<std::size_t>(a)); }

 private:
  std::vector<Bits> pred_;
  std::map<int, int> last_;
};

// ---------------------------------------------------------------------------
// traces, races, assertions

namespace detail {

struct Fnv1a {
  std::uint64_t h = 1469598103934665603ull;
  void add(std::int64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= static_cast<std::uint64_t>(v >> (8 * b)) & 0xffu;
      h *= 1099511628211ull;
    }
  }
};

inline std::pair<int, int> canonical(const Sequence& seq, int pos) {
  const Event& e = seq[static_cast<std::size_t>(pos)].ev;
  return {e.thr, e.idx};  // init writes: (-1, object id)
}

}  // namespace detail

/// Hash of rf, mo and hb over events named by (thread, per-thread index).
inline std::uint64_t canonical_trace_id(const Sequence& seq, const RelationSet& rel) {
  using Name = std::pair<int, int>;
  detail::Fnv1a h;
  std::vector<std::pair<Name, Name>> rf;
  std::vector<int> prog;
  for (int k = 0; k < static_cast<int>(seq.size()); ++k) {
    const SeqEvent& se = seq[static_cast<std::size_t>(k)];
    if (se.ev.is_init() || se.ev.is_shadow()) continue;
    prog.push_back(k);
    if (se.ev.is_read()) rf.emplace_back(detail::canonical(seq, k), detail::canonical(seq, se.rf));
  }
  std::sort(rf.begin(), rf.end());
  h.add(1);
  for (auto& [r, w] : rf) {
    h.add(r.first), h.add(r.second), h.add(w.first), h.add(w.second);
  }
  h.add(2);
  for (int o = 0; o < rel.num_objects(); ++o) {
    h.add(-2);
    for (int w : rel.mo(o)) {
      auto n = detail::canonical(seq, w);
      h.add(n.first), h.add(n.second);
    }
  }
  h.add(3);
  std::vector<std::pair<Name, Name>> hb;
  for (int b : prog)
    for (int a : prog)
      if (rel.hb(a, b)) hb.emplace_back(detail::canonical(seq, a), detail::canonical(seq, b));
  std::sort(hb.begin(), hb.end());
  for (auto& [a, b] : hb) {
    h.add(a.first), h.add(a.second), h.add(b.first), h.add(b.second);
  }
  return h.h;
}

/// Pairs of non-atomic accesses to one object from different threads, at
/// least one a write, ordered by mhb in neither direction.
inline std::vector<std::pair<int, int>> detect_na_races(const Sequence& seq, const RelationSet& rel) {
  std::vector<std::pair<int, int>> out;
  auto na_access = [&](int k) {
    const SeqEvent& se = seq[static_cast<std::size_t>(k)];
    return !se.ev.is_init() && !se.ev.is_shadow() && se.ev.obj >= 0 && se.ev.ord == MemoryOrder::na;
  };
  for (int b = 0; b < static_cast<int>(seq.size()); ++b) {
    if (!na_access(b)) continue;
    const SeqEvent& eb = seq[static_cast<std::size_t>(b)];
    for (int a = 0; a < b; ++a) {
      if (!na_access(a)) continue;
      const SeqEvent& ea = seq[static_cast<std::size_t>(a)];
      if (ea.ev.obj != eb.ev.obj || ea.owner == eb.owner) continue;
      if (!ea.ev.is_write() && !eb.ev.is_write()) continue;
      if (rel.mhb(a, b) || rel.mhb(b, a)) continue;
      out.emplace_back(a, b);
    }
  }
  return out;
}

struct AssertOutcome {
  std::vector<int> violated;  // assertion indices whose predicate holds
  std::vector<std::string> diagnostics;
};

/// Evaluates every `assert never` predicate on a final state.
inline AssertOutcome check_asserts(const Program& p, const ExecState& final) {
  AssertOutcome out;
  ExprEnv env;
  env.shared = [&](const Expr& e) { return final.shr[static_cast<std::size_t>(e.slot)]; };
  env.thread_local_ref = [&](const Expr& e) -> Value {
    const auto& v = final.lcl[static_cast<std::size_t>(e.thread_index)][static_cast<std::size_t>(e.slot)];
    if (!v) throw EvalError(e.thread + "." + e.name + " is undefined on this path");
    return *v;
  };
  for (std::size_t a = 0; a < p.asserts.size(); ++a) {
    try {
      if (evaluate(*p.asserts[a].predicate, env) != 0) out.violated.push_back(static_cast<int>(a));
    } catch (const EvalError& e) {
      out.diagnostics.push_back("assert at line " + std::to_string(p.asserts[a].line) + ": " + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// exploration

struct ExploreOptions {
  long max_sequences = 1'000'000;
  int max_depth = 10'000;
  bool early_write = true;
  bool verify_sequences = true;  // run check_moca on every maximal sequence
};

struct TraceSummary {
  std::uint64_t id = 0;
  std::vector<int> schedule;
  std::vector<Value> shared;
  std::vector<std::vector<std::optional<Value>>> locals;
  std::vector<std::pair<std::string, std::string>> rf;  // (read, source)
  bool racy = false;
  std::vector<int> violated;
};

struct AssertViolation {
  int assert_index = 0;
  std::string text;
  std::uint64_t trace = 0;
  std::vector<int> schedule;
};

struct NaRace {
  std::string first, second, object;
  std::vector<int> schedule;
};

struct ExplorationReport {
  std::string program;
  long sequences_explored = 0;
  long blocked_sequences = 0;
  long distinct_traces = 0;
  long racy_sequence_count = 0;
  long incoherent_sequences = 0;
  std::vector<AssertViolation> violations;
  std::vector<NaRace> na_races;
  std::vector<TraceSummary> traces;
  std::map<std::string, long> prunes;
  std::vector<std::string> diagnostics;
  bool complete = true;
  std::string stop_reason;
};

/// Called for each maximal sequence reached by the search.
using SequenceObserver = std::function<void(const Machine&, const ExecState&, const RelationSet&)>;

namespace detail {

struct Snapshot {
  ExecState st;
  RelationSet rel;
  CoherenceTracker coh;
  CausalOrder causal;
};

struct Node {
  Snapshot snap;
  std::vector<int> explorable;
  std::map<int, Snapshot> children;
  std::set<int> backtrack, done, sleep;
};

inline std::vector<std::pair<std::string, std::string>> rf_names(const Program& p, const Sequence& seq) {
  std::vector<std::pair<std::string, std::string>> out;
  for (int k = 0; k < static_cast<int>(seq.size()); ++k) {
    const SeqEvent& se = seq[static_cast<std::size_t>(k)];
    if (!se.ev.is_shadow() && se.ev.is_read()) out.emplace_back(event_name(p, seq, k), event_name(p, seq, se.rf));
  }
  return out;
}

class Explorer {
 public:
  Explorer(const Machine& m, const ExploreOptions& o, SequenceObserver obs)
      : m_(m), opts_(o), observer_(std::move(obs)) {}

  ExplorationReport run() {
    report_.program = m_.program().name;
    Snapshot root;
    root.st = m_.initial();
    root.rel = RelationSet(m_.units().objects);
    for (int i = 0; i < root.st.init_count; ++i) {
      root.rel.append(root.st.seq, i);
      root.causal.append(m_.units(), root.st.seq, root.rel, i);
    }
    init_count_ = root.st.init_count;
    if (!push(std::move(root), {})) return finish();
    while (!stack_.empty()) {
      if (report_.sequences_explored >= opts_.max_sequences) {
        report_.complete = false;
        report_.stop_reason = "sequence budget exhausted";
        break;
      }
      Node& node = stack_.back();
      int p = -1;
      for (int u : node.backtrack)
        if (!node.done.count(u) && !node.sleep.count(u)) {
          p = u;
          break;
        }
      if (p < 0) {
        stack_.pop_back();
        continue;
      }
      node.done.insert(p);
      Snapshot child = node.children.at(p);
      int i = static_cast<int>(child.st.seq.size()) - 1;
      auto races = child.causal.append(m_.units(), child.st.seq, child.rel, i);
      std::set<int> child_sleep;
      for (int q : node.sleep)
        if (independent_at(node, q, p)) child_sleep.insert(q);
      node.sleep.insert(p);
      for (int k : races) add_backtrack(child, k, i);
      if (static_cast<int>(stack_.size()) >= opts_.max_depth) {
        report_.complete = false;
        report_.stop_reason = "depth budget exhausted";
        continue;
      }
      push(std::move(child), std::move(child_sleep));
    }
    return finish();
  }

 private:
  // Expands a state; returns false when it is a leaf (recorded or blocked).
  bool push(Snapshot snap, std::set<int> sleep) {
    Node node;
    for (int u : m_.enabled(snap.st)) {
      Snapshot c = snap;
      try {
        m_.step(c.st, u);
      } catch (const EvalError& e) {
        note("evaluation error in " + m_.unit_token(u) + ": " + e.what());
        continue;
      }
      int i = static_cast<int>(c.st.seq.size()) - 1;
      c.rel.append(c.st.seq, i);
      if (auto f = c.coh.check(c.st.seq, c.rel, i)) {
        ++report_.prunes[f->rule];
        continue;
      }
      node.explorable.push_back(u);
      node.children.emplace(u, std::move(c));
    }
    if (node.explorable.empty()) {
      if (m_.terminal(snap.st))
        record(snap);
      else
        ++report_.blocked_sequences;
      return false;
    }
    auto first = std::find_if(node.explorable.begin(), node.explorable.end(),
                              [&](int u) { return !sleep.count(u); });
    if (first == node.explorable.end()) return false;  // every continuation is asleep
    node.backtrack.insert(*first);
    node.sleep = std::move(sleep);
    node.snap = std::move(snap);
    stack_.push_back(std::move(node));
    return true;
  }

  // Whether the next events of units a and b commute at this node, including
  // their effect on each other's coherence checks.
  bool independent_at(const Node& node, int a, int b) const {
    auto ca = node.children.find(a), cb = node.children.find(b);
    if (ca == node.children.end() || cb == node.children.end()) return false;
    const SeqEvent& ea = ca->second.st.seq.back();
    const SeqEvent& eb = cb->second.st.seq.back();
    if (ea.ev.thr == eb.ev.thr || events_conflict(m_.units(), ea.ev, eb.ev)) return false;
    if (ea.ev.is_shadow() == eb.ev.is_shadow()) return !ea.ev.is_shadow() || ea.owner == eb.owner;
    const Snapshot& other = ea.ev.is_shadow() ? cb->second : ca->second;
    const SeqEvent& shadow = ea.ev.is_shadow() ? ea : eb;
    const SeqEvent& x = other.st.seq.back();
    if (x.owner == shadow.owner || x.ev.act == Act::write) return true;
    int i = static_cast<int>(other.st.seq.size()) - 1;
    for (auto [w, via] : detail::shmo1_sources(other.st.seq, other.rel, i)) {
      (void)via;
      if (w == shadow.prw) return false;
    }
    return true;
  }

  void add_backtrack(const Snapshot& cur, int k, int i) {
    int depth = k - init_count_;
    if (depth < 0 || depth >= static_cast<int>(stack_.size())) return;
    Node& target = stack_[static_cast<std::size_t>(depth)];
    // v = events after k not causally after it, then the racing event
    std::vector<int> v;
    for (int j = k + 1; j < i; ++j)
      if (!cur.causal.before(k, j)) v.push_back(j);
    v.push_back(i);
    std::vector<int> initials;
    std::set<int> seen_units;
    for (std::size_t a = 0; a < v.size(); ++a) {
      int unit = cur.st.seq[static_cast<std::size_t>(v[a])].ev.thr;
      if (seen_units.count(unit)) continue;
      seen_units.insert(unit);
      bool has_pred = false;
      for (std::size_t b = 0; b < a && !has_pred; ++b) has_pred = cur.causal.before(v[b], v[a]);
      if (!has_pred) initials.push_back(unit);
    }
    for (int u : initials)
      if (target.backtrack.count(u)) return;
    std::sort(initials.begin(), initials.end());
    for (int u : initials) {
      if (std::find(target.explorable.begin(), target.explorable.end(), u) != target.explorable.end()) {
        target.backtrack.insert(u);
        return;
      }
    }
    for (int u : target.explorable) target.backtrack.insert(u);
  }

  void record(const Snapshot& snap) {
    ++report_.sequences_explored;
    const Sequence& seq = snap.st.seq;
    if (opts_.verify_sequences && !check_moca(seq, snap.rel).ok()) ++report_.incoherent_sequences;
    std::uint64_t id = canonical_trace_id(seq, snap.rel);
    auto races = detect_na_races(seq, snap.rel);
    auto asserts = check_asserts(m_.program(), snap.st);
    for (auto& d : asserts.diagnostics) note(d);
    if (!races.empty()) ++report_.racy_sequence_count;
    const Program& p = m_.program();
    for (auto [a, b] : races) {
      std::string x = event_name(p, seq, a), y = event_name(p, seq, b);
      if (x > y) std::swap(x, y);
      if (race_keys_.insert(x + "|" + y).second) {
        report_.na_races.push_back(NaRace{x, y, p.objects[static_cast<std::size_t>(seq[static_cast<std::size_t>(a)].ev.obj)].name,
                                          snap.st.schedule});
      }
    }
    if (seen_.insert(id).second) {
      TraceSummary t;
      t.id = id;
      t.schedule = snap.st.schedule;
      t.shared = snap.st.shr;
      t.locals = snap.st.lcl;
      t.rf = rf_names(p, seq);
      t.racy = !races.empty();
      t.violated = asserts.violated;
      for (int a : asserts.violated)
        report_.violations.push_back(AssertViolation{a, p.asserts[static_cast<std::size_t>(a)].text, id, snap.st.schedule});
      report_.traces.push_back(std::move(t));
    }
    if (observer_) observer_(m_, snap.st, snap.rel);
  }

  void note(const std::string& d) {
    if (std::find(report_.diagnostics.begin(), report_.diagnostics.end(), d) == report_.diagnostics.end())
      report_.diagnostics.push_back(d);
  }

  ExplorationReport finish() {
    report_.distinct_traces = static_cast<long>(seen_.size());
    return std::move(report_);
  }

  const Machine& m_;
  ExploreOptions opts_;
  SequenceObserver observer_;
  std::vector<Node> stack_;
  int init_count_ = 0;
  std::set<std::uint64_t> seen_;
  std::set<std::string> race_keys_;
  ExplorationReport report_;
};

}  // namespace detail

/// Source-DPOR search over program and shadow threads. Explores the
/// early-write transformed program unless disabled in `opts`.
inline ExplorationReport explore(const Program& p, const ExploreOptions& opts = {},
                                 SequenceObserver observer = {}) {
  Machine m(opts.early_write ? early_write_transform(p) : p);
  return detail::Explorer(m, opts, std::move(observer)).run();
}

inline ExplorationReport explore(const Machine& m, const ExploreOptions& opts = {},
                                 SequenceObserver observer = {}) {
  return detail::Explorer(m, opts, std::move(observer)).run();
}

// ---------------------------------------------------------------------------
// brute force

class EnumerationRefused : public std::runtime_error {
 public:
  EnumerationRefused(int events, int cap)
      : std::runtime_error("program has up to " + std::to_string(events) +
                           " schedulable events, above the enumeration cap of " + std::to_string(cap)),
        events_(events) {}
  int events() const { return events_; }

 private:
  int events_;
};

struct EnumerateOptions {
  int max_events = 12;
  bool early_write = true;
};

struct EnumerationResult {
  long interleavings = 0;  // maximal interleavings visited
  std::vector<std::pair<std::vector<int>, std::uint64_t>> sequences;  // coherent ones
  std::set<std::uint64_t> ids;
};

/// Every interleaving of program and shadow events, kept when the complete
/// sequence satisfies check_moca.
inline EnumerationResult enumerate_all(const Machine& m, int cap = 12) {
  int events = m.max_events();
  if (events > cap) throw EnumerationRefused(events, cap);
  EnumerationResult out;
  std::vector<ExecState> stack{m.initial()};
  std::vector<std::vector<int>> todo{m.enabled(stack.back())};
  while (!stack.empty()) {
    if (todo.back().empty()) {
      if (m.terminal(stack.back())) {
        ++out.interleavings;
        const ExecState& s = stack.back();
        RelationSet rel = compute_relations(s.seq, m.units().objects);
        if (check_moca(s.seq, rel).ok()) {
          std::uint64_t id = canonical_trace_id(s.seq, rel);
          out.ids.insert(id);
          out.sequences.emplace_back(s.schedule, id);
        }
      }
      stack.pop_back();
      todo.pop_back();
      continue;
    }
    int u = todo.back().back();
    todo.back().pop_back();
    ExecState next = m.stepped(stack.back(), u);
    auto en = m.enabled(next);
    std::reverse(en.begin(), en.end());
    stack.push_back(std::move(next));
    todo.push_back(std::move(en));
    if (todo.back().empty() && !m.terminal(stack.back())) {
      // stuck states cannot arise: rmws wait only on their own shadow queue
      throw ContractViolation("enumeration reached a stuck state");
    }
  }
  return out;
}

inline EnumerationResult enumerate_all(const Program& p, const EnumerateOptions& opts = {}) {
  Machine m(opts.early_write ? early_write_transform(p) : p);
  return enumerate_all(m, opts.max_events);
}

}  // namespace moca
