#pragma once

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "moca/analysis.hpp"
#include "moca/program.hpp"

namespace moca {

namespace detail {

inline std::set<int> used_slots(const Stmt& s) {
  std::vector<int> v;
  if (s.value) collect_locals(*s.value, v);
  if (s.expected) collect_locals(*s.expected, v);
  return {v.begin(), v.end()};
}

// Whether write `w` may move above its immediate predecessor `s`.
inline bool can_hoist_over(const Stmt& s, const Stmt& w) {
  if (s.kind == StmtKind::branch || s.may_write()) return false;
  if (s.accesses_shared() && s.object_id == w.object_id) return false;
  if (imposes_noup(s)) return false;
  if (s.kind == StmtKind::fence && is_release_class(s.order)) return false;
  auto w_uses = used_slots(w);
  auto s_uses = used_slots(s);
  if (s.local_slot >= 0 && w_uses.count(s.local_slot)) return false;  // RAW
  if (w.local_slot >= 0 && (s_uses.count(w.local_slot) || s.local_slot == w.local_slot))
    return false;  // WAR, WAW
  return true;
}

inline void hoist_block(std::vector<Stmt>& body) {
  for (auto& s : body) {
    if (s.kind == StmtKind::branch) {
      hoist_block(s.then_body);
      hoist_block(s.else_body);
    }
  }
  for (std::size_t j = 0; j < body.size(); ++j) {
    if (!body[j].may_write()) continue;
    std::size_t k = j;
    while (k > 0 && can_hoist_over(body[k - 1], body[j])) --k;
    if (k == j) continue;
    Stmt w = std::move(body[j]);
    body.erase(body.begin() + static_cast<std::ptrdiff_t>(j));
    body.insert(body.begin() + static_cast<std::ptrdiff_t>(k), std::move(w));
  }
}

}  // namespace detail

/// Moves every store/rmw to the earliest position of its block that does
/// not cross a dependency, an acquire-class event, a release fence, another
/// write, a same-object access or a branch. Statement ids are kept.
inline Program early_write_transform(const Program& p) {
  Program out = p;
  for (auto& th : out.threads) detail::hoist_block(th.body);
  return out;
}

struct SprVerdict {
  bool spr1 = true;
  bool spr2 = true;
  bool spr3 = true;
  std::vector<std::string> notes;
  bool ok() const { return spr1 && spr2 && spr3; }
};

namespace detail {

struct SimOutcome {
  bool error = false;
  std::map<int, int> prev_write;                 // read stmt -> previous same-object write stmt
  std::map<int, Value> written;                  // write stmt -> value
  std::vector<std::optional<Value>> locals;
  std::map<int, std::vector<int>> access_order;  // object -> stmt ids
  std::vector<int> executed;

  bool same_semantics(const SimOutcome& o) const {
    return error == o.error && prev_write == o.prev_write && written == o.written &&
           locals == o.locals;
  }
};

class Simulator {
 public:
  Simulator(const Thread& th, const std::map<int, Value>& inputs)
      : inputs_(inputs) {
    out_.locals.resize(th.locals.size());
  }

  SimOutcome run(const std::vector<Stmt>& body) {
    try {
      exec(body);
    } catch (const EvalError&) {
      out_.error = true;
    }
    return out_;
  }

 private:
  Value eval(const Expr& e) {
    ExprEnv env;
    env.local = [&](const Expr& x) -> Value {
      const auto& v = out_.locals[static_cast<std::size_t>(x.slot)];
      if (!v) throw EvalError("unassigned local");
      return *v;
    };
    return evaluate(e, env);
  }

  Value input(int id) {
    auto it = inputs_.find(id);
    return it == inputs_.end() ? 0 : it->second;
  }

  void read(const Stmt& s) {
    auto it = last_write_.find(s.object_id);
    out_.prev_write[s.id] = it == last_write_.end() ? -1 : it->second;
  }

  void write(const Stmt& s, Value v) {
    out_.written[s.id] = v;
    last_write_[s.object_id] = s.id;
  }

  void exec(const std::vector<Stmt>& body) {
    for (const auto& s : body) {
      if (s.accesses_shared()) out_.access_order[s.object_id].push_back(s.id);
      if (s.is_event() || s.kind == StmtKind::assign) out_.executed.push_back(s.id);
      switch (s.kind) {
        case StmtKind::load:
          read(s);
          out_.locals[static_cast<std::size_t>(s.local_slot)] = input(s.id);
          break;
        case StmtKind::store:
          write(s, eval(*s.value));
          break;
        case StmtKind::fadd: {
          read(s);
          Value old = input(s.id);
          Value delta = eval(*s.value);
          out_.locals[static_cast<std::size_t>(s.local_slot)] = old;
          write(s, old + delta);
          break;
        }
        case StmtKind::cas: {
          read(s);
          Value old = input(s.id);
          Value expect = eval(*s.expected);
          Value desired = eval(*s.value);
          out_.locals[static_cast<std::size_t>(s.local_slot)] = old;
          if (old == expect) write(s, desired);
          break;
        }
        case StmtKind::assign:
          out_.locals[static_cast<std::size_t>(s.local_slot)] = eval(*s.value);
          break;
        case StmtKind::branch:
          exec(eval(*s.value) != 0 ? s.then_body : s.else_body);
          break;
        case StmtKind::fence:
          break;
      }
    }
  }

  const std::map<int, Value>& inputs_;
  std::map<int, int> last_write_;
  SimOutcome out_;
};

struct StmtSig {
  int id;
  StmtKind kind;
  int object;
  MemoryOrder order;
  auto operator<=>(const StmtSig&) const = default;
};

inline std::multiset<StmtSig> signature(const Thread& th) {
  std::multiset<StmtSig> out;
  for_each_stmt(th.body, [&](const Stmt& s) {
    out.insert(StmtSig{s.id, s.kind, s.object_id, s.order});
  });
  return out;
}

inline std::vector<int> read_ids(const Thread& th) {
  std::vector<int> ids;
  for_each_stmt(th.body, [&](const Stmt& s) {
    if (s.may_read()) ids.push_back(s.id);
  });
  return ids;
}

}  // namespace detail

/// Read values fed to each thread during the spr2/spr3 simulation.
inline constexpr Value kSprDomain[] = {0, 1, 2};
inline constexpr std::size_t kSprMaxValuations = 4096;

/// Compares `original` and `transformed` thread by thread: same statements
/// (spr1), same sequential semantics for every read valuation drawn from the
/// bounded domain (spr2), same per-object access order (spr3).
inline SprVerdict check_spr(const Program& original, const Program& transformed) {
  SprVerdict v;
  if (original.threads.size() != transformed.threads.size()) {
    v.spr1 = false;
    v.notes.push_back("spr1: thread count differs");
    return v;
  }
  for (std::size_t t = 0; t < original.threads.size(); ++t) {
    const Thread& a = original.threads[t];
    const Thread& b = transformed.threads[t];
    if (detail::signature(a) != detail::signature(b)) {
      v.spr1 = false;
      v.notes.push_back("spr1: statements of " + a.name + " differ");
      continue;
    }
    auto reads = detail::read_ids(a);
    // enumerate valuations, falling back to a fixed pseudo-random sample
    std::size_t total = 1;
    bool exhaustive = true;
    for (std::size_t i = 0; i < reads.size(); ++i) {
      total *= std::size(kSprDomain);
      if (total > kSprMaxValuations) {
        exhaustive = false;
        total = kSprMaxValuations;
        break;
      }
    }
    std::mt19937_64 rng(0x5eed + t);
    for (std::size_t n = 0; n < total; ++n) {
      std::map<int, Value> in;
      std::size_t code = n;
      for (int id : reads) {
        std::size_t digit = exhaustive ? code % std::size(kSprDomain) : rng() % std::size(kSprDomain);
        code /= std::size(kSprDomain);
        in[id] = kSprDomain[digit];
      }
      auto ra = detail::Simulator(a, in).run(a.body);
      auto rb = detail::Simulator(b, in).run(b.body);
      if (v.spr2 && !ra.same_semantics(rb)) {
        v.spr2 = false;
        v.notes.push_back("spr2: " + a.name + " differs under valuation #" + std::to_string(n));
      }
      if (v.spr3 && ra.access_order != rb.access_order) {
        v.spr3 = false;
        v.notes.push_back("spr3: per-object access order of " + a.name + " differs");
      }
    }
  }
  return v;
}

}  // namespace moca
