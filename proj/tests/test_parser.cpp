#include <gtest/gtest.h>

#include "moca/memory_order.hpp"
#include "moca/parser.hpp"
#include "support.hpp"

using namespace moca;

namespace {

const char* kIriw = R"(program IRIW
init x = 0, y = 0
thread T1:
  store(x, 1, rlx)
thread T2:
  r1 = load(x, acq)
  a = load(y, rlx)
thread T3:
  store(y, 1, rlx)
thread T4:
  r3 = load(y, acq)
  b = load(x, rlx)
assert never (T2.a == 0 && T4.b == 0)
expect traces = 15
)";

bool same_expr(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return a->kind == b->kind && a->value == b->value && a->name == b->name && a->thread == b->thread &&
         a->slot == b->slot && a->op == b->op && same_expr(a->lhs, b->lhs) && same_expr(a->rhs, b->rhs);
}

bool same_body(const std::vector<Stmt>& a, const std::vector<Stmt>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Stmt &x = a[i], &y = b[i];
    if (x.kind != y.kind || x.id != y.id || x.local != y.local || x.object != y.object || x.order != y.order)
      return false;
    if (!same_expr(x.value, y.value) || !same_expr(x.expected, y.expected)) return false;
    if (!same_body(x.then_body, y.then_body) || !same_body(x.else_body, y.else_body)) return false;
  }
  return true;
}

bool same_program(const Program& a, const Program& b) {
  if (a.name != b.name || a.objects.size() != b.objects.size() || a.threads.size() != b.threads.size() ||
      a.asserts.size() != b.asserts.size() || a.expected_traces != b.expected_traces)
    return false;
  for (std::size_t o = 0; o < a.objects.size(); ++o)
    if (a.objects[o].name != b.objects[o].name || a.objects[o].init != b.objects[o].init) return false;
  for (std::size_t t = 0; t < a.threads.size(); ++t)
    if (a.threads[t].name != b.threads[t].name || !same_body(a.threads[t].body, b.threads[t].body)) return false;
  for (std::size_t k = 0; k < a.asserts.size(); ++k)
    if (!same_expr(a.asserts[k].predicate, b.asserts[k].predicate)) return false;
  return true;
}

}  // namespace

TEST(MemoryOrder, LatticeIsExactlyTheDocumentedOne) {
  using M = MemoryOrder;
  for (M m : kAllOrders) {
    EXPECT_TRUE(order_leq(M::na, m));
    EXPECT_TRUE(order_leq(m, M::sc));
    EXPECT_TRUE(order_leq(m, m));
    EXPECT_FALSE(order_lt(m, m));
  }
  EXPECT_FALSE(order_leq(M::acq, M::rel));
  EXPECT_FALSE(order_leq(M::rel, M::acq));
  EXPECT_TRUE(order_leq(M::rlx, M::acq));
  EXPECT_TRUE(order_leq(M::rel, M::acq_rel));
  EXPECT_FALSE(order_leq(M::acq_rel, M::rel));
  for (M a : kAllOrders)
    for (M b : kAllOrders)
      for (M c : kAllOrders)
        if (order_leq(a, b) && order_leq(b, c)) {
          EXPECT_TRUE(order_leq(a, c));
        }
}

TEST(MemoryOrder, FiltersAgreeWithOrder) {
  for (MemoryOrder m : kAllOrders) {
    EXPECT_EQ(is_acquire_class(m), at_least(m, MemoryOrder::acq));
    EXPECT_EQ(is_release_class(m), at_least(m, MemoryOrder::rel));
    EXPECT_EQ(parse_order(to_string(m)), m);
  }
  EXPECT_FALSE(parse_order("relaxed").has_value());
}

TEST(Parser, IriwHasFourThreadsTwoObjects) {
  Program p = parse_program(kIriw);
  EXPECT_EQ(p.name, "IRIW");
  EXPECT_EQ(p.num_threads(), 4);
  EXPECT_EQ(p.num_objects(), 2);
  ASSERT_EQ(p.asserts.size(), 1u);
  EXPECT_EQ(p.expected_traces, 15);
  EXPECT_EQ(p.threads[1].body[0].kind, StmtKind::load);
  EXPECT_EQ(p.threads[1].body[0].order, MemoryOrder::acq);
}

TEST(Parser, InitOnlyProgramHasNoThreads) {
  Program p = parse_program("program empty\ninit x = 3, y\n");
  EXPECT_EQ(p.num_threads(), 0);
  ASSERT_EQ(p.num_objects(), 2);
  EXPECT_EQ(p.objects[0].init, 3);
  EXPECT_EQ(p.objects[1].init, 0);
}

TEST(Parser, LoopIsRejected) {
  const char* src = "program loop\ninit x = 0\nthread T1:\n  while (1):\n    store(x, 1, rlx)\n";
  try {
    parse_program(src);
    FAIL() << "loop accepted";
  } catch (const ParseError& e) {
    ASSERT_FALSE(e.diagnostics().empty());
    EXPECT_EQ(e.diagnostics().front().line, 4);
    EXPECT_NE(e.diagnostics().front().message.find("loop"), std::string::npos);
  }
}

TEST(Parser, RejectsUndeclaredObjectsAndLocals) {
  EXPECT_THROW(parse_program("program p\ninit x = 0\nthread T1:\n  store(y, 1, rlx)\n"), ParseError);
  EXPECT_THROW(parse_program("program p\ninit x = 0\nthread T1:\n  store(x, r, rlx)\n"), ParseError);
  EXPECT_THROW(parse_program("program p\ninit x = 0\nthread T1:\n  store(x, 1, relaxed)\n"), ParseError);
  EXPECT_THROW(parse_program("program p\ninit x = 0\nthread T1:\n  r = load(x, rlx)\n  if (x == 1):\n    r = 2\n"),
               ParseError);
}

TEST(Parser, LocalDefinedOnOneBranchOnlyIsUnassigned) {
  const char* src =
      "program p\ninit x = 0\nthread T1:\n  r = load(x, rlx)\n  if (r == 1):\n    s = 1\n  store(x, s, rlx)\n";
  EXPECT_THROW(parse_program(src), ParseError);
}

TEST(Parser, ElseAndNestedBlocks) {
  const char* src = R"(program p
init x = 0, y = 0
thread T1:
  r = load(x, rlx)
  if (r == 1):
    if (r != 2):
      store(y, 1, rel)
  else:
    store(y, 2, rlx)
  fence(sc)
)";
  Program p = parse_program(src);
  const auto& body = p.threads[0].body;
  ASSERT_EQ(body.size(), 3u);
  EXPECT_EQ(body[1].kind, StmtKind::branch);
  ASSERT_EQ(body[1].then_body.size(), 1u);
  EXPECT_EQ(body[1].then_body[0].kind, StmtKind::branch);
  ASSERT_EQ(body[1].else_body.size(), 1u);
  EXPECT_EQ(body[2].kind, StmtKind::fence);
}

TEST(Parser, CommentsAndRmwForms) {
  const char* src = R"(# header
program p  # trailing
init x = 0
thread T1:
  a = fadd(x, 2, acq_rel)
  b = cas(x, 2, 5, sc)   # comment
)";
  Program p = parse_program(src);
  EXPECT_EQ(p.threads[0].body[0].kind, StmtKind::fadd);
  EXPECT_EQ(p.threads[0].body[1].kind, StmtKind::cas);
  EXPECT_EQ(p.threads[0].body[1].order, MemoryOrder::sc);
}

TEST(Parser, RoundTripIriw) {
  Program p = parse_program(kIriw);
  EXPECT_TRUE(same_program(p, parse_program(print_program(p))));
}

TEST(Parser, RoundTripCorpus) {
  for (const auto& f : fixtures::corpus_files()) {
    Program p = parse_program(fixtures::read_file(f));
    std::string text = print_program(p);
    EXPECT_TRUE(same_program(p, parse_program(text))) << f << "\n" << text;
    EXPECT_EQ(text, print_program(parse_program(text))) << f;
  }
}

TEST(Parser, ExpressionPrecedence) {
  Program p = parse_program("program p\ninit x = 0\nthread T1:\n  r = 1 + 2 * 3 - (4 - 1)\n  store(x, r, rlx)\n");
  ExprEnv env;
  EXPECT_EQ(evaluate(*p.threads[0].body[0].value, env), 4);
  EXPECT_EQ(print_expr(*p.threads[0].body[0].value), "1 + 2 * 3 - (4 - 1)");
}
