#pragma once

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "moca/relations.hpp"

namespace moca {

struct RuleFailure {
  std::string rule;
  std::vector<int> witness;  // sequence positions
};

/// Per-rule outcome; a rule absent from `failures` passed.
struct CoherenceVerdict {
  std::vector<std::string> rules;
  std::map<std::string, std::vector<int>> failures;

  bool ok() const { return failures.empty(); }
  bool passed(const std::string& rule) const { return !failures.count(rule); }
  void fail(const std::string& rule, std::vector<int> witness) {
    failures.emplace(rule, std::move(witness));
  }
};

inline const std::vector<std::string>& moca_rules() {
  static const std::vector<std::string> r = {"shco", "shmo", "shmo1", "shmo2", "shmo3", "shrmo", "shto"};
  return r;
}

inline const std::vector<std::string>& c11_rules() {
  static const std::vector<std::string> r = {"mo1", "mo2", "mo3", "mo4", "to", "co"};
  return r;
}

namespace detail {

inline constexpr int kNever = std::numeric_limits<int>::max();

/// Shadow position of `w` as known at position `now`; kNever if not yet.
inline int shadow_at(const Sequence& seq, int w, int now) {
  int s = seq[static_cast<std::size_t>(w)].shw;
  return (s >= 0 && s <= now) ? s : kNever;
}

/// Writes that shmo1 requires to be visible before event e: mhb-earlier
/// writes and sources of mhb-earlier reads, from threads other than e's.
inline std::vector<std::pair<int, int>> shmo1_sources(const Sequence& seq, const RelationSet& rel,
                                                      int e) {
  std::vector<std::pair<int, int>> out;  // (write, via read or -1)
  const SeqEvent& ev = seq[static_cast<std::size_t>(e)];
  rel.mhb_pred(e).for_each([&](std::size_t k) {
    const SeqEvent& x = seq[k];
    if (x.ev.is_init() || x.ev.is_shadow()) return;
    if (x.ev.is_write() && x.owner != ev.owner) out.emplace_back(static_cast<int>(k), -1);
    if (x.ev.is_read()) {
      const SeqEvent& w = seq[static_cast<std::size_t>(x.rf)];
      if (!w.ev.is_init() && w.owner != ev.owner)
        out.emplace_back(x.rf, static_cast<int>(k));
    }
  });
  return out;
}

}  // namespace detail

/// Exploration-time checking of the shadow coherence rules. Each call
/// inspects only rule instances completed by the newly appended event;
/// constraints between two not-yet-visible writes are kept until one of
/// them becomes visible.
class CoherenceTracker {
 public:
  /// Checks seq[i] (already appended to `rel`). Returns the first violated
  /// rule, if any.
  std::optional<RuleFailure> check(const Sequence& seq, const RelationSet& rel, int i) {
    const SeqEvent& se = seq[static_cast<std::size_t>(i)];
    if (se.ev.is_init()) return std::nullopt;
    if (se.ev.is_shadow()) return on_visible(seq, rel, se.prw, i);

    if (se.ev.is_read()) {
      int w = se.rf;
      const SeqEvent& src = seq[static_cast<std::size_t>(w)];
      if (!(src.owner == se.owner || detail::shadow_at(seq, w, i - 1) != detail::kNever) || rel.hb(i, w))
        return RuleFailure{"shco", {w, i}};
    }
    for (auto [w, via] : detail::shmo1_sources(seq, rel, i)) {
      std::vector<int> wit = via < 0 ? std::vector<int>{w, i} : std::vector<int>{w, via, i};
      if (se.ev.act == Act::write) {
        if (auto f = require(seq, w, i, i, "shmo1", wit)) return f;
      } else if (detail::shadow_at(seq, w, i - 1) == detail::kNever) {
        return RuleFailure{"shmo1", wit};
      }
    }
    if (se.ev.is_read()) {
      int w2 = se.rf;
      const Bits& before = rel.hb_pred(i);
      std::optional<RuleFailure> f;
      before.for_each([&](std::size_t k) {
        if (f) return;
        const SeqEvent& x = seq[k];
        if (x.ev.obj != se.ev.obj || x.ev.is_shadow()) return;
        if (x.ev.is_read() && !x.ev.is_init() && x.rf != w2)
          f = require(seq, x.rf, w2, i, "shmo2", {static_cast<int>(k), i});
        if (!f && x.ev.is_write() && static_cast<int>(k) != w2)
          f = require(seq, static_cast<int>(k), w2, i, "shmo3", {static_cast<int>(k), w2, i});
      });
      if (f) return f;
    }
    if (se.ev.act == Act::rmw && rel.mo_rank(i) != rel.mo_rank(se.rf) + 1)
      return RuleFailure{"shrmo", {se.rf, i}};
    if (se.ev.ord == MemoryOrder::sc) {
      // sc writes hb-before an sc point must enter to before it
      std::optional<RuleFailure> f;
      rel.hb_pred(i).for_each([&](std::size_t k) {
        const SeqEvent& w = seq[k];
        if (f || w.ev.is_init() || w.ev.act != Act::write || w.ev.ord != MemoryOrder::sc) return;
        int wk = static_cast<int>(k);
        if (se.ev.act == Act::write)
          f = require(seq, wk, i, i, "shto", {wk, i});
        else if (detail::shadow_at(seq, wk, i - 1) == detail::kNever)
          f = RuleFailure{"shto", {wk, i}};
      });
      if (f) return f;
    }
    return std::nullopt;
  }

  std::size_t deferred() const { return pending_.size(); }

 private:
  struct Constraint {
    int first, second;  // shw(first) must precede shw(second)
    std::string rule;
    std::vector<int> witness;
  };

  std::optional<RuleFailure> require(const Sequence& seq, int a, int b, int now, const char* rule,
                                     std::vector<int> witness) {
    int sa = detail::shadow_at(seq, a, now), sb = detail::shadow_at(seq, b, now);
    if (sb == detail::kNever) {
      if (sa == detail::kNever) pending_.push_back(Constraint{a, b, rule, std::move(witness)});
      return std::nullopt;
    }
    if (sa < sb) return std::nullopt;
    return RuleFailure{rule, std::move(witness)};
  }

  std::optional<RuleFailure> on_visible(const Sequence& seq, const RelationSet& rel, int w, int i) {
    std::optional<RuleFailure> fail;
    std::vector<Constraint> keep;
    for (auto& c : pending_) {
      if (c.second == w) {
        if (!fail) fail = RuleFailure{c.rule, c.witness};
      } else if (c.first != w) {
        keep.push_back(std::move(c));
      }
    }
    pending_ = std::move(keep);
    if (fail) return fail;
    const SeqEvent& src = seq[static_cast<std::size_t>(w)];
    if (src.ev.ord == MemoryOrder::sc) {
      for (int y : rel.to()) {
        if (y != w && rel.hb(w, y)) return RuleFailure{"shto", {w, y, i}};
      }
    }
    return std::nullopt;
  }

  std::vector<Constraint> pending_;
};

/// The shadow coherence rules evaluated over a whole sequence. Positions of
/// shadow-writes that never happened count as later than everything.
inline CoherenceVerdict check_moca(const Sequence& seq, const RelationSet& rel) {
  using detail::kNever;
  CoherenceVerdict v;
  v.rules = moca_rules();
  const int n = static_cast<int>(seq.size());
  auto vis = [&](int w) {
    int s = seq[static_cast<std::size_t>(w)].shw;
    return s >= 0 ? s : kNever;
  };
  auto before = [](int a, int b) { return a < b || (a == kNever && b == kNever); };

  for (int e = 0; e < n; ++e) {
    const SeqEvent& se = seq[static_cast<std::size_t>(e)];
    if (se.ev.is_init()) continue;
    if (se.ev.is_shadow()) {
      // shmo: visibility order of store updates is the modification order
      for (int f = e + 1; f < n; ++f) {
        const SeqEvent& sf = seq[static_cast<std::size_t>(f)];
        if (sf.ev.obj == se.ev.obj && sf.ev.is_store_update() && !rel.mo_before(se.prw, sf.prw))
          v.fail("shmo", {e, f});
      }
      continue;
    }
    if (se.ev.is_read()) {
      int w = se.rf;
      const SeqEvent& src = seq[static_cast<std::size_t>(w)];
      if (!(src.owner == se.owner || vis(w) < e) || rel.hb(e, w)) v.fail("shco", {w, e});
    }
    int key = se.ev.is_write() ? vis(e) : e;
    for (auto [w, via] : detail::shmo1_sources(seq, rel, e)) {
      if (!before(vis(w), key))
        v.fail("shmo1", via < 0 ? std::vector<int>{w, e} : std::vector<int>{w, via, e});
    }
    if (se.ev.is_read()) {
      int w2 = se.rf;
      rel.hb_pred(e).for_each([&](std::size_t k) {
        const SeqEvent& x = seq[k];
        if (x.ev.obj != se.ev.obj || x.ev.is_shadow()) return;
        if (x.ev.is_read() && !x.ev.is_init() && x.rf != w2 && !before(vis(x.rf), vis(w2)))
          v.fail("shmo2", {static_cast<int>(k), e});
        if (x.ev.is_write() && static_cast<int>(k) != w2 && !before(vis(static_cast<int>(k)), vis(w2)))
          v.fail("shmo3", {static_cast<int>(k), w2, e});
      });
    }
    if (se.ev.act == Act::rmw && rel.mo_rank(e) != rel.mo_rank(se.rf) + 1) v.fail("shrmo", {se.rf, e});
  }
  const auto& to = rel.to();
  for (std::size_t a = 0; a < to.size(); ++a) {
    for (std::size_t b = a + 1; b < to.size(); ++b) {
      bool same_obj = seq[static_cast<std::size_t>(to[a])].ev.obj == seq[static_cast<std::size_t>(to[b])].ev.obj;
      if (rel.hb(to[b], to[a]) || (same_obj && seq[static_cast<std::size_t>(to[a])].ev.is_write() &&
                                   seq[static_cast<std::size_t>(to[b])].ev.is_write() &&
                                   rel.mo_before(to[b], to[a])))
        v.fail("shto", {to[a], to[b]});
    }
  }
  return v;
}

/// C11 coherence (mo1-mo4, to, co) over program events, using the shadow
/// model's hb as the happens-before relation.
inline CoherenceVerdict check_c11_oracle(const Sequence& seq, const RelationSet& rel) {
  CoherenceVerdict v;
  v.rules = c11_rules();
  const int n = static_cast<int>(seq.size());
  auto program = [&](int k) { return !seq[static_cast<std::size_t>(k)].ev.is_shadow(); };
  auto is_w = [&](int k) { return program(k) && seq[static_cast<std::size_t>(k)].ev.is_write(); };
  auto is_r = [&](int k) { return program(k) && seq[static_cast<std::size_t>(k)].ev.is_read(); };
  auto obj = [&](int k) { return seq[static_cast<std::size_t>(k)].ev.obj; };
  auto rf = [&](int k) { return seq[static_cast<std::size_t>(k)].rf; };

  for (int b = 0; b < n; ++b) {
    if (!program(b)) continue;
    rel.hb_pred(b).for_each([&](std::size_t ak) {
      int a = static_cast<int>(ak);
      if (!program(a) || obj(a) < 0 || obj(a) != obj(b)) return;
      if (is_w(a) && is_w(b) && !rel.mo_before(a, b)) v.fail("mo1", {a, b});
      if (is_r(a) && is_r(b) && rf(a) != rf(b) && !rel.mo_before(rf(a), rf(b))) v.fail("mo2", {a, b});
      if (is_r(a) && is_w(b) && a != b && !rel.mo_before(rf(a), b)) v.fail("mo3", {a, b});
      if (is_w(a) && is_r(b) && rf(b) != a && !rel.mo_before(a, rf(b))) v.fail("mo4", {a, b});
    });
    if (is_r(b)) {
      int w = rf(b);
      if (w < 0 || w >= b || !is_w(w) || rel.hb(b, w)) v.fail("co", {w, b});
    }
  }
  const auto& to = rel.to();
  for (std::size_t a = 0; a < to.size(); ++a)
    for (std::size_t b = a + 1; b < to.size(); ++b) {
      int x = to[a], y = to[b];
      if (rel.hb(y, x) || (is_w(x) && is_w(y) && obj(x) == obj(y) && rel.mo_before(y, x)))
        v.fail("to", {x, y});
    }
  return v;
}

}  // namespace moca
