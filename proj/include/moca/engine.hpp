#pragma once

#include <algorithm>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "moca/event.hpp"
#include "moca/program.hpp"

namespace moca {

/// Raised by run_sequence when a schedule picks a unit that is not enabled.
class ReplayError : public std::runtime_error {
 public:
  ReplayError(std::size_t step, const std::string& msg)
      : std::runtime_error("step " + std::to_string(step) + ": " + msg), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

struct ExecState {
  std::vector<Value> shr;
  std::vector<std::vector<std::optional<Value>>> lcl;
  std::vector<int> pc;
  std::vector<std::vector<int>> pending;  // per shadow unit, FIFO of write positions
  Sequence seq;                           // init writes occupy positions 0..|O|-1
  std::vector<int> next_idx;              // per unit
  std::vector<int> schedule;              // units chosen so far (init excluded)
  std::vector<int> last_update;           // per object, position of latest store update
  int init_count = 0;
};

/// Latest store update of `obj` among seq[0, upto).
inline int last_update_before(const Sequence& seq, int upto, int obj) {
  for (int k = upto - 1; k >= 0; --k) {
    const SeqEvent& se = seq[static_cast<std::size_t>(k)];
    if (se.ev.obj == obj && se.ev.is_store_update()) return k;
  }
  throw ContractViolation("no init write for object " + std::to_string(obj));
}

/// lw: the write whose shadow-write was the latest store update of `obj`.
inline int lw(const Sequence& seq, int obj) {
  int k = last_update_before(seq, static_cast<int>(seq.size()), obj);
  return seq[static_cast<std::size_t>(k)].prw;
}

/// Source of a read of `obj` by program thread `thread` executed right
/// after seq[0, upto). General case lw; a later same-thread write of the
/// object issued after that shadow-write takes precedence.
inline int resolve_rf(const Sequence& seq, int upto, int thread, int obj) {
  int upd = last_update_before(seq, upto, obj);
  for (int k = upto - 1; k > upd; --k) {
    const SeqEvent& se = seq[static_cast<std::size_t>(k)];
    if (se.ev.act == Act::write && se.ev.obj == obj && se.owner == thread) return k;
  }
  return seq[static_cast<std::size_t>(upd)].prw;
}

class Machine {
 public:
  enum class InstrKind { op, assign, branch_false, jump };
  struct Instr {
    InstrKind kind;
    const Stmt* stmt;
    int target;
  };

  explicit Machine(Program p) : prog_(std::make_shared<const Program>(std::move(p))) {
    units_.threads = prog_->num_threads();
    units_.objects = prog_->num_objects();
    // a thread can tell its own pending write from a foreign flush only if it
    // reads the object after writing it and some other thread writes it too
    const auto nt = static_cast<std::size_t>(units_.threads), no = static_cast<std::size_t>(units_.objects);
    std::vector<bool> read_after_write(nt * no), writes(nt * no);
    for (std::size_t t = 0; t < nt; ++t)
      for_each_stmt(prog_->threads[t].body, [&](const Stmt& st) {
        if (st.object_id < 0) return;
        std::size_t k = t * no + static_cast<std::size_t>(st.object_id);
        if (st.may_read() && writes[k]) read_after_write[k] = true;
        if (st.may_write()) writes[k] = true;
      });
    units_.self_read.assign(nt * no, false);
    for (std::size_t t = 0; t < nt; ++t)
      for (std::size_t o = 0; o < no; ++o) {
        bool foreign = false;
        for (std::size_t u = 0; u < nt; ++u) foreign = foreign || (u != t && writes[u * no + o]);
        units_.self_read[t * no + o] = read_after_write[t * no + o] && foreign;
      }
    for (const auto& th : prog_->threads) {
      std::vector<Instr> code;
      compile(th.body, code);
      code_.push_back(std::move(code));
    }
  }

  const Program& program() const { return *prog_; }
  const UnitMap& units() const { return units_; }
  const std::vector<Instr>& code(int thread) const {
    return code_[static_cast<std::size_t>(thread)];
  }

  ExecState initial() const {
    ExecState s;
    const Program& p = *prog_;
    for (int o = 0; o < p.num_objects(); ++o) {
      SeqEvent se;
      se.ev = Event{kInitThread, Act::write, o, MemoryOrder::na, o, -1};
      se.write_value = p.objects[static_cast<std::size_t>(o)].init;
      se.shw = o;
      se.prw = o;
      s.seq.push_back(se);
      s.shr.push_back(se.write_value);
      s.last_update.push_back(o);
    }
    s.init_count = p.num_objects();
    for (const auto& th : p.threads) s.lcl.emplace_back(th.locals.size());
    s.pc.assign(static_cast<std::size_t>(p.num_threads()), 0);
    s.pending.resize(static_cast<std::size_t>(units_.count() - units_.threads));
    s.next_idx.assign(static_cast<std::size_t>(units_.count()), 0);
    for (int t = 0; t < p.num_threads(); ++t) advance(s, t);
    return s;
  }

  bool is_enabled(const ExecState& s, int unit) const {
    if (unit < 0 || unit >= units_.count()) return false;
    if (units_.is_shadow(unit)) return !queue(s, unit).empty();
    const auto& c = code(unit);
    int pc = s.pc[static_cast<std::size_t>(unit)];
    if (pc >= static_cast<int>(c.size())) return false;
    const Stmt& st = *c[static_cast<std::size_t>(pc)].stmt;
    // rmws flush atomically, so same-thread issued writes of the object
    // must be visible first to keep the per-location FIFO intact.
    if (st.kind == StmtKind::fadd || st.kind == StmtKind::cas)
      return queue(s, units_.shadow_of(unit, st.object_id)).empty();
    return true;
  }

  std::vector<int> enabled(const ExecState& s) const {
    std::vector<int> out;
    for (int u = 0; u < units_.count(); ++u)
      if (is_enabled(s, u)) out.push_back(u);
    return out;
  }

  bool finished(const ExecState& s, int thread) const {
    return s.pc[static_cast<std::size_t>(thread)] >= static_cast<int>(code(thread).size());
  }

  bool terminal(const ExecState& s) const {
    for (int u = 0; u < units_.count(); ++u) {
      if (units_.is_shadow(u) ? !queue(s, u).empty() : !finished(s, u)) return false;
    }
    return true;
  }

  /// The event `unit` would execute next. For cas the act is predicted from
  /// the value it would read. Pre: the unit has a next event.
  Event next_event(const ExecState& s, int unit) const {
    if (units_.is_shadow(unit)) {
      const auto& q = queue(s, unit);
      if (q.empty()) throw ContractViolation("shadow unit has nothing pending");
      const SeqEvent& w = s.seq[static_cast<std::size_t>(q.front())];
      return Event{unit, Act::shadow_write, w.ev.obj, w.ev.ord,
                   s.next_idx[static_cast<std::size_t>(unit)], -1};
    }
    if (finished(s, unit)) throw ContractViolation("thread has finished");
    const Stmt& st = *code(unit)[static_cast<std::size_t>(s.pc[static_cast<std::size_t>(unit)])].stmt;
    Event e{unit, Act::fence, st.object_id, st.order, s.next_idx[static_cast<std::size_t>(unit)], st.id};
    switch (st.kind) {
      case StmtKind::load: e.act = Act::read; break;
      case StmtKind::store: e.act = Act::write; break;
      case StmtKind::fadd: e.act = Act::rmw, e.drains = true; break;
      case StmtKind::cas: {
        e.drains = true;
        int rf = resolve_rf(s.seq, static_cast<int>(s.seq.size()), unit, st.object_id);
        Value old = s.seq[static_cast<std::size_t>(rf)].write_value;
        e.act = old == eval(s, unit, *st.expected) ? Act::rmw : Act::read;
        break;
      }
      default: e.act = Act::fence; e.obj = -1; break;
    }
    return e;
  }

  /// Executes the next event of `unit` in place.
  void step(ExecState& s, int unit) const {
    if (!is_enabled(s, unit)) throw ContractViolation("unit " + unit_token(unit) + " is not enabled");
    int pos = static_cast<int>(s.seq.size());
    SeqEvent se;
    se.ev = next_event(s, unit);
    se.owner = units_.owner(unit);
    if (units_.is_shadow(unit)) {
      auto& q = s.pending[static_cast<std::size_t>(unit - units_.threads)];
      int w = q.front();
      q.erase(q.begin());
      SeqEvent& orig = s.seq[static_cast<std::size_t>(w)];
      orig.shw = pos;
      se.prw = w;
      se.write_value = orig.write_value;
      s.shr[static_cast<std::size_t>(se.ev.obj)] = se.write_value;
      s.last_update[static_cast<std::size_t>(se.ev.obj)] = pos;
    } else {
      const Stmt& st = *code(unit)[static_cast<std::size_t>(s.pc[static_cast<std::size_t>(unit)])].stmt;
      auto& locals = s.lcl[static_cast<std::size_t>(unit)];
      switch (st.kind) {
        case StmtKind::load:
          se.rf = resolve_rf(s.seq, pos, unit, st.object_id);
          se.read_value = s.seq[static_cast<std::size_t>(se.rf)].write_value;
          locals[static_cast<std::size_t>(st.local_slot)] = se.read_value;
          break;
        case StmtKind::store:
          se.write_value = eval(s, unit, *st.value);
          s.pending[static_cast<std::size_t>(units_.shadow_of(unit, st.object_id) - units_.threads)]
              .push_back(pos);
          break;
        case StmtKind::fadd:
        case StmtKind::cas: {
          se.rf = resolve_rf(s.seq, pos, unit, st.object_id);
          se.read_value = s.seq[static_cast<std::size_t>(se.rf)].write_value;
          Value next = 0;
          if (st.kind == StmtKind::fadd) {
            next = se.read_value + eval(s, unit, *st.value);
          } else if (se.ev.act == Act::rmw) {
            next = eval(s, unit, *st.value);
          }
          locals[static_cast<std::size_t>(st.local_slot)] = se.read_value;
          if (se.ev.act == Act::rmw) {
            se.write_value = next;
            se.shw = pos;
            se.prw = pos;
            s.shr[static_cast<std::size_t>(st.object_id)] = next;
            s.last_update[static_cast<std::size_t>(st.object_id)] = pos;
          }
          break;
        }
        default:
          break;
      }
      ++s.pc[static_cast<std::size_t>(unit)];
      advance(s, unit);
    }
    ++s.next_idx[static_cast<std::size_t>(unit)];
    s.schedule.push_back(unit);
    s.seq.push_back(se);
  }

  ExecState stepped(const ExecState& s, int unit) const {
    ExecState n = s;
    step(n, unit);
    return n;
  }

  std::string unit_token(int unit) const {
    const Program& p = *prog_;
    if (unit < 0) return "init";
    if (!units_.is_shadow(unit)) return p.threads[static_cast<std::size_t>(unit)].name;
    return p.threads[static_cast<std::size_t>(units_.owner(unit))].name + "/" +
           p.objects[static_cast<std::size_t>(units_.shadow_object(unit))].name;
  }

  std::optional<int> parse_unit_token(std::string_view tok) const {
    const Program& p = *prog_;
    auto slash = tok.find('/');
    int t = p.thread_index(std::string(tok.substr(0, slash)));
    if (t < 0) return std::nullopt;
    if (slash == std::string_view::npos) return t;
    int o = p.object_id(std::string(tok.substr(slash + 1)));
    if (o < 0) return std::nullopt;
    return units_.shadow_of(t, o);
  }

  /// Upper bound on schedulable events (program events plus shadow-writes)
  /// along any path.
  int max_events() const {
    int total = 0;
    for (const auto& th : prog_->threads) total += body_events(th.body);
    return total;
  }

  Value eval(const ExecState& s, int thread, const Expr& e) const {
    ExprEnv env;
    env.local = [&](const Expr& x) -> Value {
      const auto& v = s.lcl[static_cast<std::size_t>(thread)][static_cast<std::size_t>(x.slot)];
      if (!v) throw EvalError("local '" + x.name + "' read before assignment");
      return *v;
    };
    return evaluate(e, env);
  }

 private:
  const std::vector<int>& queue(const ExecState& s, int unit) const {
    return s.pending[static_cast<std::size_t>(unit - units_.threads)];
  }

  static int body_events(const std::vector<Stmt>& body) {
    int n = 0;
    for (const auto& st : body) {
      if (st.kind == StmtKind::branch)
        n += std::max(body_events(st.then_body), body_events(st.else_body));
      else if (st.kind == StmtKind::store)
        n += 2;
      else if (st.is_event())
        n += 1;
    }
    return n;
  }

  static void compile(const std::vector<Stmt>& body, std::vector<Instr>& out) {
    for (const auto& st : body) {
      if (st.kind == StmtKind::branch) {
        std::size_t br = out.size();
        out.push_back(Instr{InstrKind::branch_false, &st, -1});
        compile(st.then_body, out);
        if (st.else_body.empty()) {
          out[br].target = static_cast<int>(out.size());
        } else {
          std::size_t jmp = out.size();
          out.push_back(Instr{InstrKind::jump, &st, -1});
          out[br].target = static_cast<int>(out.size());
          compile(st.else_body, out);
          out[jmp].target = static_cast<int>(out.size());
        }
      } else {
        out.push_back(Instr{st.is_event() ? InstrKind::op : InstrKind::assign, &st, -1});
      }
    }
  }

  // Runs thread-local instructions until the next shared event or the end.
  void advance(ExecState& s, int t) const {
    const auto& c = code(t);
    int& pc = s.pc[static_cast<std::size_t>(t)];
    while (pc < static_cast<int>(c.size())) {
      const Instr& in = c[static_cast<std::size_t>(pc)];
      if (in.kind == InstrKind::op) return;
      if (in.kind == InstrKind::assign) {
        s.lcl[static_cast<std::size_t>(t)][static_cast<std::size_t>(in.stmt->local_slot)] =
            eval(s, t, *in.stmt->value);
        ++pc;
      } else if (in.kind == InstrKind::branch_false) {
        pc = eval(s, t, *in.stmt->value) != 0 ? pc + 1 : in.target;
      } else {
        pc = in.target;
      }
    }
  }

  std::shared_ptr<const Program> prog_;
  UnitMap units_;
  std::vector<std::vector<Instr>> code_;
};

/// Replays `schedule` from the initial state.
inline ExecState run_sequence(const Machine& m, const std::vector<int>& schedule) {
  ExecState s = m.initial();
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!m.is_enabled(s, schedule[i]))
      throw ReplayError(i, "unit " + m.unit_token(schedule[i]) + " is not enabled");
    m.step(s, schedule[i]);
  }
  return s;
}

inline std::vector<int> parse_schedule(const Machine& m, std::string_view text) {
  std::vector<int> out;
  std::string tok;
  auto flush = [&] {
    if (tok.empty()) return;
    auto u = m.parse_unit_token(tok);
    if (!u) throw ReplayError(out.size(), "unknown unit '" + tok + "'");
    out.push_back(*u);
    tok.clear();
  };
  for (char c : text) {
    if (c == ' ' || c == '\n' || c == '\t' || c == ',' || c == '\r')
      flush();
    else
      tok.push_back(c);
  }
  flush();
  return out;
}

inline std::vector<std::string> schedule_tokens(const Machine& m, const std::vector<int>& schedule) {
  std::vector<std::string> out;
  out.reserve(schedule.size());
  for (int u : schedule) out.push_back(m.unit_token(u));
  return out;
}

/// shr equals the value of the latest store update of each object.
inline bool store_consistent(const ExecState& s) {
  for (std::size_t o = 0; o < s.shr.size(); ++o) {
    int k = last_update_before(s.seq, static_cast<int>(s.seq.size()), static_cast<int>(o));
    if (s.seq[static_cast<std::size_t>(k)].write_value != s.shr[o]) return false;
    if (k != s.last_update[o]) return false;
  }
  return true;
}

inline std::string describe_event(const Program& p, const Sequence& seq, int pos) {
  const SeqEvent& se = seq[static_cast<std::size_t>(pos)];
  std::ostringstream os;
  os << event_name(p, seq, pos) << ' ' << to_string(se.ev.act);
  if (se.ev.obj >= 0) os << ' ' << p.objects[static_cast<std::size_t>(se.ev.obj)].name;
  os << ' ' << to_string(se.ev.ord);
  if (se.ev.is_read()) os << " <- " << event_name(p, seq, se.rf) << " (" << se.read_value << ')';
  if (se.ev.is_write() || se.ev.is_shadow()) os << " := " << se.write_value;
  return os.str();
}

/// Per-step shared-store snapshots of a replayed schedule.
inline std::string dump_trace(const Machine& m, const std::vector<int>& schedule) {
  const Program& p = m.program();
  ExecState s = m.initial();
  std::ostringstream os;
  auto snapshot = [&] {
    for (std::size_t o = 0; o < s.shr.size(); ++o)
      os << (o ? " " : "") << p.objects[o].name << '=' << s.shr[o];
  };
  os << "init | ";
  snapshot();
  os << '\n';
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    m.step(s, schedule[i]);
    os << i << ' ' << m.unit_token(schedule[i]) << ": "
       << describe_event(p, s.seq, static_cast<int>(s.seq.size()) - 1) << " | ";
    snapshot();
    os << '\n';
  }
  return os.str();
}

}  // namespace moca
