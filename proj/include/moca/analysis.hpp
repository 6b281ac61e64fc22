#pragma once

#include <set>
#include <vector>

#include "moca/event.hpp"
#include "moca/program.hpp"

namespace moca {

namespace detail {

inline bool uses_any(const ExprPtr& e, const std::set<int>& slots) {
  if (!e) return false;
  std::vector<int> used;
  collect_locals(*e, used);
  for (int s : used)
    if (slots.count(s)) return true;
  return false;
}

inline bool stmt_uses_any(const Stmt& s, const std::set<int>& slots) {
  return uses_any(s.value, slots) || uses_any(s.expected, slots);
}

// Preorder walk from the statement `from` to `to`, tracking locals whose
// value may derive from `from`. Returns 1 when `to` depends, 0 when it does
// not, -1 when `to` was not reached in this body.
inline int dep_walk(const std::vector<Stmt>& body, int from, int to, bool& started,
                    std::set<int>& tainted, bool ctrl) {
  for (const auto& s : body) {
    if (s.id == to) {
      if (!started) return 0;
      return (ctrl || stmt_uses_any(s, tainted)) ? 1 : 0;
    }
    if (s.id == from) {
      started = true;
      if (s.local_slot >= 0) tainted.insert(s.local_slot);
      continue;
    }
    if (s.kind == StmtKind::branch) {
      bool inner = ctrl || (started && uses_any(s.value, tainted));
      int r = dep_walk(s.then_body, from, to, started, tainted, inner);
      if (r >= 0) return r;
      r = dep_walk(s.else_body, from, to, started, tainted, inner);
      if (r >= 0) return r;
      continue;
    }
    if (started && s.local_slot >= 0 && (ctrl || stmt_uses_any(s, tainted)))
      tainted.insert(s.local_slot);
  }
  return -1;
}

}  // namespace detail

/// Whether statement `later` depends on statement `earlier` of the same
/// thread through locals (data) or through an enclosing branch condition
/// (control). Kills are ignored, so the answer errs towards true. Address
/// dependence does not arise: objects are named statically.
inline bool dep_stmt(const Thread& th, int earlier, int later) {
  if (earlier == later) return false;
  bool started = false;
  std::set<int> tainted;
  return detail::dep_walk(th.body, earlier, later, started, tainted, false) == 1;
}

/// Event-level form: both events must be program events of one thread.
inline bool dep(const Program& p, const Event& earlier, const Event& later) {
  if (earlier.thr != later.thr || earlier.thr < 0 || earlier.thr >= p.num_threads())
    throw ContractViolation("dep relates events of one program thread");
  if (earlier.stmt < 0 || later.stmt < 0) throw ContractViolation("dep needs program events");
  if (earlier.idx >= later.idx) return false;
  return dep_stmt(p.threads[static_cast<std::size_t>(earlier.thr)], earlier.stmt, later.stmt);
}

/// Acquire-class reads/rmws and fences forbid later events from moving up.
inline bool imposes_noup(const Stmt& s) {
  if (s.kind == StmtKind::fence) return is_acquire_class(s.order);
  return s.may_read() && is_acquire_class(s.order);
}

/// Release-class writes/rmws and fences forbid earlier events from moving down.
inline bool imposes_nodown(const Stmt& s) {
  if (s.kind == StmtKind::fence) return is_release_class(s.order);
  return s.may_write() && is_release_class(s.order);
}

inline bool noup(const Stmt& earlier, const Stmt& later) {
  return earlier.id != later.id && imposes_noup(earlier);
}

inline bool nodown(const Stmt& later, const Stmt& earlier) {
  return earlier.id != later.id && imposes_nodown(later);
}

}  // namespace moca
