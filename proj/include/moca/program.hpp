#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "moca/memory_order.hpp"

namespace moca {

using Value = std::int64_t;

/// Raised when a caller breaks a documented precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Raised when an expression cannot be evaluated (division by zero,
/// reference to an unassigned local, ...).
class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExprKind { constant, local, shared, thread_local_ref, unary, binary };

enum class Op {
  add, sub, mul, div, mod,
  eq, ne, lt, le, gt, ge,
  land, lor, lnot, neg
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Immutable expression tree. `local` refers to a slot of the enclosing
/// thread; `shared` and `thread_local_ref` only occur in assertions.
struct Expr {
  ExprKind kind = ExprKind::constant;
  Value value = 0;
  std::string name;    // local / object name
  std::string thread;  // owning thread for thread_local_ref
  int slot = -1;       // local slot or object id, resolved after parsing
  int thread_index = -1;
  Op op = Op::add;
  ExprPtr lhs;
  ExprPtr rhs;

  static ExprPtr constant(Value v) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::constant;
    e->value = v;
    return e;
  }
  static ExprPtr local(std::string n, int slot = -1) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::local;
    e->name = std::move(n);
    e->slot = slot;
    return e;
  }
  static ExprPtr unary(Op op, ExprPtr operand) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::unary;
    e->op = op;
    e->lhs = std::move(operand);
    return e;
  }
  static ExprPtr binary(Op op, ExprPtr l, ExprPtr r) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::binary;
    e->op = op;
    e->lhs = std::move(l);
    e->rhs = std::move(r);
    return e;
  }
};

/// Resolves leaves during evaluation. Each callback may throw EvalError.
struct ExprEnv {
  std::function<Value(const Expr&)> local;
  std::function<Value(const Expr&)> shared;
  std::function<Value(const Expr&)> thread_local_ref;
};

inline Value apply_op(Op op, Value a, Value b) {
  switch (op) {
    case Op::add: return a + b;
    case Op::sub: return a - b;
    case Op::mul: return a * b;
    case Op::div:
      if (b == 0) throw EvalError("division by zero");
      return a / b;
    case Op::mod:
      if (b == 0) throw EvalError("modulo by zero");
      return a % b;
    case Op::eq: return a == b;
    case Op::ne: return a != b;
    case Op::lt: return a < b;
    case Op::le: return a <= b;
    case Op::gt: return a > b;
    case Op::ge: return a >= b;
    case Op::land: return (a != 0) && (b != 0);
    case Op::lor: return (a != 0) || (b != 0);
    default: break;
  }
  throw EvalError("bad binary operator");
}

inline Value evaluate(const Expr& e, const ExprEnv& env) {
  switch (e.kind) {
    case ExprKind::constant:
      return e.value;
    case ExprKind::local:
      if (!env.local) throw EvalError("local '" + e.name + "' not available here");
      return env.local(e);
    case ExprKind::shared:
      if (!env.shared) throw EvalError("object '" + e.name + "' not available here");
      return env.shared(e);
    case ExprKind::thread_local_ref:
      if (!env.thread_local_ref)
        throw EvalError("'" + e.thread + "." + e.name + "' not available here");
      return env.thread_local_ref(e);
    case ExprKind::unary: {
      Value v = evaluate(*e.lhs, env);
      return e.op == Op::neg ? -v : static_cast<Value>(v == 0);
    }
    case ExprKind::binary: {
      // && and || short-circuit so guarded references stay legal.
      if (e.op == Op::land) {
        if (evaluate(*e.lhs, env) == 0) return 0;
        return evaluate(*e.rhs, env) != 0;
      }
      if (e.op == Op::lor) {
        if (evaluate(*e.lhs, env) != 0) return 1;
        return evaluate(*e.rhs, env) != 0;
      }
      return apply_op(e.op, evaluate(*e.lhs, env), evaluate(*e.rhs, env));
    }
  }
  throw EvalError("bad expression");
}

/// Collects the local slots an expression reads.
inline void collect_locals(const Expr& e, std::vector<int>& out) {
  if (e.kind == ExprKind::local) out.push_back(e.slot);
  if (e.lhs) collect_locals(*e.lhs, out);
  if (e.rhs) collect_locals(*e.rhs, out);
}

enum class StmtKind { load, store, fadd, cas, fence, assign, branch };

/// One statement of a thread body. Shared-memory statements (load, store,
/// fadd, cas, fence) each give rise to exactly one event when executed.
struct Stmt {
  StmtKind kind = StmtKind::assign;
  int id = -1;           // unique within the thread, stable under reordering
  int line = 0;
  std::string local;     // destination local (load, fadd, cas, assign)
  int local_slot = -1;
  std::string object;
  int object_id = -1;
  MemoryOrder order = MemoryOrder::na;
  ExprPtr value;         // store value, fadd delta, assign rhs, branch cond
  ExprPtr expected;      // cas only
  std::vector<Stmt> then_body;
  std::vector<Stmt> else_body;

  bool accesses_shared() const {
    return kind == StmtKind::load || kind == StmtKind::store ||
           kind == StmtKind::fadd || kind == StmtKind::cas;
  }
  bool is_event() const { return accesses_shared() || kind == StmtKind::fence; }
  bool may_write() const {
    return kind == StmtKind::store || kind == StmtKind::fadd || kind == StmtKind::cas;
  }
  bool may_read() const {
    return kind == StmtKind::load || kind == StmtKind::fadd || kind == StmtKind::cas;
  }
};

struct Thread {
  std::string name;
  std::vector<Stmt> body;
  std::vector<std::string> locals;  // slot -> name

  int slot_of(const std::string& local) const {
    for (std::size_t i = 0; i < locals.size(); ++i)
      if (locals[i] == local) return static_cast<int>(i);
    return -1;
  }
};

struct Assertion {
  ExprPtr predicate;
  std::string text;
  int line = 0;
};

struct SharedObject {
  std::string name;
  Value init = 0;
};

struct Program {
  std::string name;
  std::vector<SharedObject> objects;
  std::vector<Thread> threads;
  std::vector<Assertion> asserts;
  std::optional<long> expected_traces;

  int object_id(const std::string& n) const {
    for (std::size_t i = 0; i < objects.size(); ++i)
      if (objects[i].name == n) return static_cast<int>(i);
    return -1;
  }
  int thread_index(const std::string& n) const {
    for (std::size_t i = 0; i < threads.size(); ++i)
      if (threads[i].name == n) return static_cast<int>(i);
    return -1;
  }
  int num_threads() const { return static_cast<int>(threads.size()); }
  int num_objects() const { return static_cast<int>(objects.size()); }
};

/// Calls `fn` on every statement of `body` in source order, descending into
/// branch bodies (then before else).
template <typename Fn>
void for_each_stmt(const std::vector<Stmt>& body, Fn&& fn) {
  for (const auto& s : body) {
    fn(s);
    if (s.kind == StmtKind::branch) {
      for_each_stmt(s.then_body, fn);
      for_each_stmt(s.else_body, fn);
    }
  }
}

inline const Stmt* find_stmt(const std::vector<Stmt>& body, int id) {
  const Stmt* found = nullptr;
  for_each_stmt(body, [&](const Stmt& s) {
    if (s.id == id) found = &s;
  });
  return found;
}

}  // namespace moca
