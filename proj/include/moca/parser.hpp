#pragma once

// Litmus DSL front end: parse_program() builds a validated Program and
// print_program() renders one back to source form.
//
//   program NAME
//   init x = 0, y
//   thread T1:
//     store(x, 1, rlx)
//     r0 = load(y, acq)
//     if (r0 == 1):
//       store(y, 2, rel)
//     else:
//       fence(sc)
//   assert never (T1.r0 == 0 && x == 1)
//   expect traces = 4

#include <cctype>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "moca/program.hpp"

namespace moca {

struct Diagnostic {
  int line = 0;
  int column = 0;
  std::string message;
};

class ParseError : public std::runtime_error {
 public:
  explicit ParseError(std::vector<Diagnostic> diags)
      : std::runtime_error(render(diags)), diagnostics_(std::move(diags)) {}

  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  static std::string render(const std::vector<Diagnostic>& diags) {
    std::ostringstream os;
    for (std::size_t i = 0; i < diags.size(); ++i) {
      if (i) os << '\n';
      os << diags[i].line << ':' << diags[i].column << ": " << diags[i].message;
    }
    return os.str();
  }
  std::vector<Diagnostic> diagnostics_;
};

namespace detail {

struct SyntaxError {
  int column;
  std::string message;
};

enum class TokKind { ident, number, punct, end };

struct Token {
  TokKind kind = TokKind::end;
  std::string text;
  Value number = 0;
  int column = 0;
};

inline std::vector<Token> tokenize(std::string_view src, int base_column) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    Token t;
    t.column = base_column + static_cast<int>(i);
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
        ++j;
      t.kind = TokKind::ident;
      t.text = std::string(src.substr(i, j - i));
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = TokKind::number;
      t.text = std::string(src.substr(i, j - i));
      try {
        t.number = std::stoll(t.text);
      } catch (const std::exception&) {
        throw SyntaxError{t.column, "integer literal out of range"};
      }
      i = j;
    } else {
      static const char* two[] = {"==", "!=", "<=", ">=", "&&", "||"};
      t.kind = TokKind::punct;
      bool matched = false;
      for (const char* op : two) {
        if (src.substr(i, 2) == op) {
          t.text = op;
          i += 2;
          matched = true;
          break;
        }
      }
      if (!matched) {
        if (std::string_view("()+-*/%<>!,=:.").find(c) == std::string_view::npos)
          throw SyntaxError{t.column, std::string("unexpected character '") + c + "'"};
        t.text = std::string(1, c);
        ++i;
      }
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = TokKind::end;
  end.column = base_column + static_cast<int>(src.size());
  out.push_back(end);
  return out;
}

/// Recursive-descent cursor over one line's tokens.
class Cursor {
 public:
  explicit Cursor(std::vector<Token> toks) : toks_(std::move(toks)) {}

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool at_end() const { return peek().kind == TokKind::end; }
  bool is_punct(std::string_view p, std::size_t ahead = 0) const {
    return peek(ahead).kind == TokKind::punct && peek(ahead).text == p;
  }
  bool is_ident(std::string_view w, std::size_t ahead = 0) const {
    return peek(ahead).kind == TokKind::ident && peek(ahead).text == w;
  }
  void expect_punct(std::string_view p) {
    if (!is_punct(p))
      throw SyntaxError{peek().column, "expected '" + std::string(p) + "'" + found()};
    next();
  }
  std::string expect_ident(std::string_view what) {
    if (peek().kind != TokKind::ident)
      throw SyntaxError{peek().column, "expected " + std::string(what) + found()};
    return next().text;
  }
  void expect_end() {
    if (!at_end()) throw SyntaxError{peek().column, "unexpected trailing input" + found()};
  }
  std::string found() const {
    if (at_end()) return ", found end of line";
    return ", found '" + peek().text + "'";
  }

  // expression grammar, lowest precedence first
  ExprPtr expression(bool allow_dotted) { return binary_level(0, allow_dotted); }

 private:
  static int precedence(const Token& t) {
    if (t.kind != TokKind::punct) return -1;
    const std::string& s = t.text;
    if (s == "||") return 0;
    if (s == "&&") return 1;
    if (s == "==" || s == "!=") return 2;
    if (s == "<" || s == "<=" || s == ">" || s == ">=") return 3;
    if (s == "+" || s == "-") return 4;
    if (s == "*" || s == "/" || s == "%") return 5;
    return -1;
  }
  static Op to_op(const std::string& s) {
    static const std::map<std::string, Op> ops = {
        {"||", Op::lor}, {"&&", Op::land}, {"==", Op::eq}, {"!=", Op::ne},
        {"<", Op::lt},   {"<=", Op::le},   {">", Op::gt},  {">=", Op::ge},
        {"+", Op::add},  {"-", Op::sub},   {"*", Op::mul}, {"/", Op::div},
        {"%", Op::mod}};
    return ops.at(s);
  }

  ExprPtr binary_level(int min_prec, bool dotted) {
    ExprPtr lhs = unary(dotted);
    while (true) {
      int prec = precedence(peek());
      if (prec < min_prec || prec < 0) return lhs;
      Op op = to_op(next().text);
      ExprPtr rhs = binary_level(prec + 1, dotted);
      lhs = Expr::binary(op, lhs, rhs);
    }
  }

  ExprPtr unary(bool dotted) {
    if (is_punct("!")) {
      next();
      return Expr::unary(Op::lnot, unary(dotted));
    }
    if (is_punct("-")) {
      next();
      if (peek().kind == TokKind::number) return Expr::constant(-next().number);
      return Expr::unary(Op::neg, unary(dotted));
    }
    return primary(dotted);
  }

  ExprPtr primary(bool dotted) {
    const Token& t = peek();
    if (t.kind == TokKind::number) return Expr::constant(next().number);
    if (is_punct("(")) {
      next();
      ExprPtr e = expression(dotted);
      expect_punct(")");
      return e;
    }
    if (t.kind == TokKind::ident) {
      int col = t.column;
      std::string name = next().text;
      if (is_punct(".")) {
        if (!dotted) throw SyntaxError{peek().column, "qualified names are only allowed in assertions"};
        next();
        std::string local = expect_ident("local name after '.'");
        auto e = std::make_shared<Expr>();
        e->kind = ExprKind::thread_local_ref;
        e->thread = name;
        e->name = local;
        return e;
      }
      if (is_punct("(")) throw SyntaxError{col, "calls are not allowed inside expressions"};
      return Expr::local(name);
    }
    throw SyntaxError{t.column, "expected expression" + found()};
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

struct RawLine {
  int number;
  int indent;
  std::string text;  // comment stripped, indentation removed
};

struct Frame {
  std::vector<Stmt>* body;
  int indent;  // indentation of statements in this body, -1 until known
  Stmt* owner; // branch statement owning this body (nullptr for thread root)
  bool in_else;
};

inline bool is_loop_keyword(const std::string& w) {
  return w == "while" || w == "for" || w == "loop" || w == "do" || w == "goto" ||
         w == "repeat";
}

inline bool is_keyword(const std::string& w) {
  return w == "load" || w == "store" || w == "fadd" || w == "cas" || w == "fence" ||
         w == "if" || w == "else" || is_loop_keyword(w);
}

class Parser {
 public:
  explicit Parser(std::string_view text) { split_lines(text); }

  Program run() {
    std::size_t i = 0;
    while (i < lines_.size()) {
      const RawLine& ln = lines_[i];
      if (ln.indent != 0) {
        diag(ln.number, ln.indent + 1, "unexpected indentation at top level");
        ++i;
        continue;
      }
      try {
        Cursor cur(tokenize(ln.text, ln.indent + 1));
        if (cur.is_ident("program")) {
          cur.next();
          program_.name = cur.expect_ident("program name");
          while (cur.is_punct("+") || cur.is_punct("-") || cur.peek().kind == TokKind::ident ||
                 cur.peek().kind == TokKind::number) {
            // litmus names such as WRC+addrs or Z6+poxxs
            program_.name += cur.next().text;
          }
          cur.expect_end();
          ++i;
        } else if (cur.is_ident("init")) {
          cur.next();
          parse_init(cur, ln.number);
          ++i;
        } else if (cur.is_ident("thread")) {
          cur.next();
          Thread th;
          th.name = cur.expect_ident("thread name");
          cur.expect_punct(":");
          cur.expect_end();
          if (program_.thread_index(th.name) >= 0)
            diag(ln.number, 1, "duplicate thread '" + th.name + "'");
          program_.threads.push_back(std::move(th));
          i = parse_thread_body(i + 1, program_.threads.back());
        } else if (cur.is_ident("assert")) {
          cur.next();
          if (!cur.is_ident("never"))
            throw SyntaxError{cur.peek().column, "expected 'never'" + cur.found()};
          cur.next();
          Assertion a;
          a.line = ln.number;
          a.text = ln.text.substr(ln.text.find("never") + 5);
          a.text.erase(0, a.text.find_first_not_of(' '));
          a.predicate = cur.expression(true);
          cur.expect_end();
          program_.asserts.push_back(std::move(a));
          ++i;
        } else if (cur.is_ident("expect")) {
          cur.next();
          if (!cur.is_ident("traces"))
            throw SyntaxError{cur.peek().column, "expected 'traces'" + cur.found()};
          cur.next();
          cur.expect_punct("=");
          if (cur.peek().kind != TokKind::number)
            throw SyntaxError{cur.peek().column, "expected trace count" + cur.found()};
          program_.expected_traces = static_cast<long>(cur.next().number);
          cur.expect_end();
          ++i;
        } else if (cur.peek().kind == TokKind::ident && is_loop_keyword(cur.peek().text)) {
          throw SyntaxError{cur.peek().column, "loop constructs are not supported"};
        } else {
          throw SyntaxError{cur.peek().column, "expected program, init, thread, assert or expect" + cur.found()};
        }
      } catch (const SyntaxError& e) {
        diag(ln.number, e.column, e.message);
        ++i;
      }
    }
    if (diags_.empty()) validate();
    if (!diags_.empty()) throw ParseError(diags_);
    return std::move(program_);
  }

 private:
  void diag(int line, int col, std::string msg) {
    diags_.push_back(Diagnostic{line, col, std::move(msg)});
  }

  void split_lines(std::string_view text) {
    int number = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      std::string line(text.substr(start, end - start));
      ++number;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
        line.pop_back();
      std::size_t indent = 0;
      while (indent < line.size() && (line[indent] == ' ' || line[indent] == '\t')) {
        if (line[indent] == '\t')
          diag(number, static_cast<int>(indent) + 1, "tabs are not allowed for indentation");
        ++indent;
      }
      if (indent < line.size())
        lines_.push_back(RawLine{number, static_cast<int>(indent), line.substr(indent)});
      if (end == text.size()) break;
      start = end + 1;
    }
  }

  void parse_init(Cursor& cur, int line) {
    while (true) {
      int col = cur.peek().column;
      std::string name = cur.expect_ident("object name");
      Value v = 0;
      if (cur.is_punct("=")) {
        cur.next();
        bool neg = false;
        if (cur.is_punct("-")) {
          cur.next();
          neg = true;
        }
        if (cur.peek().kind != TokKind::number)
          throw SyntaxError{cur.peek().column, "expected integer initial value" + cur.found()};
        v = cur.next().number;
        if (neg) v = -v;
      }
      if (program_.object_id(name) >= 0)
        diag(line, col, "object '" + name + "' initialised twice");
      else
        program_.objects.push_back(SharedObject{name, v});
      if (cur.at_end()) break;
      cur.expect_punct(",");
    }
  }

  // Parses the indented block following `thread X:`; returns the index of
  // the first line not belonging to the thread.
  std::size_t parse_thread_body(std::size_t i, Thread& th) {
    std::vector<Frame> stack;
    stack.push_back(Frame{&th.body, -1, nullptr, false});
    while (i < lines_.size() && lines_[i].indent > 0) {
      const RawLine& ln = lines_[i];
      // close frames whose indentation is deeper than this line
      while (stack.size() > 1 && stack.back().indent != -1 && ln.indent < stack.back().indent)
        stack.pop_back();
      Frame& top = stack.back();
      if (top.indent == -1) {
        int parent = stack.size() > 1 ? stack[stack.size() - 2].indent : 0;
        if (ln.indent <= parent) {
          diag(ln.number, ln.indent + 1, "expected an indented block");
          if (stack.size() > 1) {
            stack.pop_back();
            continue;
          }
        }
        top.indent = ln.indent;
      } else if (ln.indent > top.indent) {
        diag(ln.number, ln.indent + 1, "unexpected indentation");
        ++i;
        continue;
      }
      try {
        Cursor cur(tokenize(ln.text, ln.indent + 1));
        if (cur.is_ident("else")) {
          cur.next();
          cur.expect_punct(":");
          cur.expect_end();
          Stmt* last = top.body->empty() ? nullptr : &top.body->back();
          if (!last || last->kind != StmtKind::branch || !last->else_body.empty() ||
              else_seen_.count(last))
            throw SyntaxError{ln.indent + 1, "'else' without matching 'if'"};
          else_seen_.insert(last);
          stack.push_back(Frame{&last->else_body, -1, last, true});
        } else {
          Stmt s = parse_stmt(cur, ln.number);
          s.line = ln.number;
          top.body->push_back(std::move(s));
          if (top.body->back().kind == StmtKind::branch)
            stack.push_back(Frame{&top.body->back().then_body, -1, &top.body->back(), false});
        }
      } catch (const SyntaxError& e) {
        diag(ln.number, e.column, e.message);
      }
      ++i;
    }
    for (const auto& f : stack) {
      if (f.owner && f.indent == -1) diag(f.owner->line, 1, "empty block");
    }
    return i;
  }

  MemoryOrder parse_order_tok(Cursor& cur) {
    int col = cur.peek().column;
    std::string word = cur.expect_ident("memory order");
    auto m = parse_order(word);
    if (!m) throw SyntaxError{col, "unknown memory order '" + word + "'"};
    return *m;
  }

  void parse_object(Cursor& cur, Stmt& s) {
    s.object = cur.expect_ident("object name");
  }

  Stmt parse_stmt(Cursor& cur, int line) {
    Stmt s;
    s.line = line;
    const Token& first = cur.peek();
    if (first.kind == TokKind::ident && is_loop_keyword(first.text))
      throw SyntaxError{first.column, "loop constructs are not supported"};
    if (cur.is_ident("if")) {
      cur.next();
      s.kind = StmtKind::branch;
      s.value = cur.expression(false);
      cur.expect_punct(":");
      cur.expect_end();
      return s;
    }
    if (cur.is_ident("store")) {
      cur.next();
      s.kind = StmtKind::store;
      cur.expect_punct("(");
      parse_object(cur, s);
      cur.expect_punct(",");
      s.value = cur.expression(false);
      cur.expect_punct(",");
      s.order = parse_order_tok(cur);
      cur.expect_punct(")");
      cur.expect_end();
      return s;
    }
    if (cur.is_ident("fence")) {
      cur.next();
      s.kind = StmtKind::fence;
      cur.expect_punct("(");
      s.order = parse_order_tok(cur);
      cur.expect_punct(")");
      cur.expect_end();
      if (s.order == MemoryOrder::na || s.order == MemoryOrder::rlx)
        throw SyntaxError{first.column, "fence order must be acq, rel, acq_rel or sc"};
      return s;
    }
    if (first.kind == TokKind::ident && cur.is_punct("=", 1)) {
      if (is_keyword(first.text))
        throw SyntaxError{first.column, "'" + first.text + "' cannot be used as a local name"};
      s.local = cur.next().text;
      cur.next();  // '='
      if (cur.is_ident("load") && cur.is_punct("(", 1)) {
        cur.next();
        s.kind = StmtKind::load;
        cur.expect_punct("(");
        parse_object(cur, s);
        cur.expect_punct(",");
        s.order = parse_order_tok(cur);
        cur.expect_punct(")");
      } else if (cur.is_ident("fadd") && cur.is_punct("(", 1)) {
        cur.next();
        s.kind = StmtKind::fadd;
        cur.expect_punct("(");
        parse_object(cur, s);
        cur.expect_punct(",");
        s.value = cur.expression(false);
        cur.expect_punct(",");
        s.order = parse_order_tok(cur);
        cur.expect_punct(")");
      } else if (cur.is_ident("cas") && cur.is_punct("(", 1)) {
        cur.next();
        s.kind = StmtKind::cas;
        cur.expect_punct("(");
        parse_object(cur, s);
        cur.expect_punct(",");
        s.expected = cur.expression(false);
        cur.expect_punct(",");
        s.value = cur.expression(false);
        cur.expect_punct(",");
        s.order = parse_order_tok(cur);
        cur.expect_punct(")");
      } else {
        s.kind = StmtKind::assign;
        s.value = cur.expression(false);
      }
      cur.expect_end();
      return s;
    }
    if (cur.is_ident("load") || cur.is_ident("fadd") || cur.is_ident("cas"))
      throw SyntaxError{first.column, "'" + first.text + "' result must be bound to a local"};
    throw SyntaxError{first.column, "expected statement" + cur.found()};
  }

  // ---- validation ---------------------------------------------------------

  void validate() {
    for (auto& th : program_.threads) {
      int next_id = 0;
      std::set<std::string> assigned;
      validate_body(th, th.body, assigned, next_id);
    }
    for (auto& a : program_.asserts) a.predicate = resolve_assert(a.predicate, a.line);
  }

  ExprPtr resolve_local(const ExprPtr& e, Thread& th, const std::set<std::string>& assigned,
                        int line) {
    if (!e) return e;
    auto copy = std::make_shared<Expr>(*e);
    if (copy->kind == ExprKind::local) {
      if (!assigned.count(copy->name)) {
        diag(line, 1, "local '" + copy->name + "' used before assignment in thread " + th.name);
      }
      copy->slot = th.slot_of(copy->name);
      if (copy->slot < 0) {
        th.locals.push_back(copy->name);
        copy->slot = static_cast<int>(th.locals.size()) - 1;
      }
    }
    copy->lhs = resolve_local(copy->lhs, th, assigned, line);
    copy->rhs = resolve_local(copy->rhs, th, assigned, line);
    return copy;
  }

  int define_local(Thread& th, const std::string& name) {
    int slot = th.slot_of(name);
    if (slot >= 0) return slot;
    th.locals.push_back(name);
    return static_cast<int>(th.locals.size()) - 1;
  }

  void validate_body(Thread& th, std::vector<Stmt>& body, std::set<std::string>& assigned,
                     int& next_id) {
    for (auto& s : body) {
      s.id = next_id++;
      if (s.accesses_shared()) {
        s.object_id = program_.object_id(s.object);
        if (s.object_id < 0)
          diag(s.line, 1, "undeclared object '" + s.object + "' (add it to an init line)");
      }
      s.value = resolve_local(s.value, th, assigned, s.line);
      s.expected = resolve_local(s.expected, th, assigned, s.line);
      if (s.kind == StmtKind::branch) {
        std::set<std::string> then_set = assigned;
        std::set<std::string> else_set = assigned;
        validate_body(th, s.then_body, then_set, next_id);
        validate_body(th, s.else_body, else_set, next_id);
        std::set<std::string> both;
        for (const auto& n : then_set)
          if (else_set.count(n)) both.insert(n);
        assigned = std::move(both);
        continue;
      }
      if (!s.local.empty()) {
        s.local_slot = define_local(th, s.local);
        assigned.insert(s.local);
      }
    }
  }

  ExprPtr resolve_assert(const ExprPtr& e, int line) {
    if (!e) return e;
    auto copy = std::make_shared<Expr>(*e);
    if (copy->kind == ExprKind::local) {
      copy->kind = ExprKind::shared;
      copy->slot = program_.object_id(copy->name);
      if (copy->slot < 0) diag(line, 1, "undeclared object '" + copy->name + "' in assertion");
    } else if (copy->kind == ExprKind::thread_local_ref) {
      copy->thread_index = program_.thread_index(copy->thread);
      if (copy->thread_index < 0) {
        diag(line, 1, "unknown thread '" + copy->thread + "' in assertion");
      } else {
        copy->slot = program_.threads[copy->thread_index].slot_of(copy->name);
        if (copy->slot < 0)
          diag(line, 1, "thread " + copy->thread + " has no local '" + copy->name + "'");
      }
    }
    copy->lhs = resolve_assert(copy->lhs, line);
    copy->rhs = resolve_assert(copy->rhs, line);
    return copy;
  }

  std::vector<RawLine> lines_;
  std::vector<Diagnostic> diags_;
  std::set<const Stmt*> else_seen_;
  Program program_;
};

inline int op_precedence(Op op) {
  switch (op) {
    case Op::lor: return 0;
    case Op::land: return 1;
    case Op::eq: case Op::ne: return 2;
    case Op::lt: case Op::le: case Op::gt: case Op::ge: return 3;
    case Op::add: case Op::sub: return 4;
    case Op::mul: case Op::div: case Op::mod: return 5;
    default: return 6;
  }
}

inline const char* op_text(Op op) {
  switch (op) {
    case Op::add: return "+";
    case Op::sub: return "-";
    case Op::mul: return "*";
    case Op::div: return "/";
    case Op::mod: return "%";
    case Op::eq: return "==";
    case Op::ne: return "!=";
    case Op::lt: return "<";
    case Op::le: return "<=";
    case Op::gt: return ">";
    case Op::ge: return ">=";
    case Op::land: return "&&";
    case Op::lor: return "||";
    case Op::lnot: return "!";
    case Op::neg: return "-";
  }
  return "?";
}

}  // namespace detail

/// Parses and validates litmus DSL source. Throws ParseError carrying every
/// diagnostic found (line/column positions are 1-based).
inline Program parse_program(std::string_view text) {
  return detail::Parser(text).run();
}

inline std::string print_expr(const Expr& e) {
  switch (e.kind) {
    case ExprKind::constant:
      return std::to_string(e.value);
    case ExprKind::local:
    case ExprKind::shared:
      return e.name;
    case ExprKind::thread_local_ref:
      return e.thread + "." + e.name;
    case ExprKind::unary: {
      std::string inner = print_expr(*e.lhs);
      if (e.lhs->kind == ExprKind::binary) inner = "(" + inner + ")";
      return std::string(detail::op_text(e.op)) + inner;
    }
    case ExprKind::binary: {
      int prec = detail::op_precedence(e.op);
      std::string l = print_expr(*e.lhs);
      std::string r = print_expr(*e.rhs);
      if (e.lhs->kind == ExprKind::binary && detail::op_precedence(e.lhs->op) < prec)
        l = "(" + l + ")";
      if (e.rhs->kind == ExprKind::binary && detail::op_precedence(e.rhs->op) <= prec)
        r = "(" + r + ")";
      return l + " " + detail::op_text(e.op) + " " + r;
    }
  }
  return "?";
}

namespace detail {

inline void print_body(std::ostream& os, const std::vector<Stmt>& body, int depth) {
  std::string pad(static_cast<std::size_t>(2 * depth), ' ');
  for (const auto& s : body) {
    os << pad;
    switch (s.kind) {
      case StmtKind::load:
        os << s.local << " = load(" << s.object << ", " << to_string(s.order) << ")\n";
        break;
      case StmtKind::store:
        os << "store(" << s.object << ", " << print_expr(*s.value) << ", "
           << to_string(s.order) << ")\n";
        break;
      case StmtKind::fadd:
        os << s.local << " = fadd(" << s.object << ", " << print_expr(*s.value) << ", "
           << to_string(s.order) << ")\n";
        break;
      case StmtKind::cas:
        os << s.local << " = cas(" << s.object << ", " << print_expr(*s.expected) << ", "
           << print_expr(*s.value) << ", " << to_string(s.order) << ")\n";
        break;
      case StmtKind::fence:
        os << "fence(" << to_string(s.order) << ")\n";
        break;
      case StmtKind::assign:
        os << s.local << " = " << print_expr(*s.value) << "\n";
        break;
      case StmtKind::branch:
        os << "if (" << print_expr(*s.value) << "):\n";
        print_body(os, s.then_body, depth + 1);
        if (!s.else_body.empty()) {
          os << pad << "else:\n";
          print_body(os, s.else_body, depth + 1);
        }
        break;
    }
  }
}

}  // namespace detail

/// Renders a Program back to DSL source; parse_program(print_program(p))
/// yields a structurally identical program.
inline std::string print_program(const Program& p) {
  std::ostringstream os;
  os << "program " << (p.name.empty() ? "unnamed" : p.name) << "\n";
  if (!p.objects.empty()) {
    os << "init ";
    for (std::size_t i = 0; i < p.objects.size(); ++i) {
      if (i) os << ", ";
      os << p.objects[i].name << " = " << p.objects[i].init;
    }
    os << "\n";
  }
  for (const auto& th : p.threads) {
    os << "thread " << th.name << ":\n";
    detail::print_body(os, th.body, 1);
  }
  for (const auto& a : p.asserts) os << "assert never (" << print_expr(*a.predicate) << ")\n";
  if (p.expected_traces) os << "expect traces = " << *p.expected_traces << "\n";
  return os.str();
}

}  // namespace moca
