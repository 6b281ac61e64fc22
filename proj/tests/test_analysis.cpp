#include <gtest/gtest.h>

#include "moca/analysis.hpp"
#include "moca/parser.hpp"

using namespace moca;

namespace {

Program one_thread(const std::string& body) {
  return parse_program("program p\ninit x = 0, y = 0\nthread T1:\n" + body + "thread T2:\n  fence(sc)\n");
}

Event ev(const Program& p, int thread, int stmt, int idx) {
  Event e;
  e.thr = thread;
  e.stmt = stmt;
  e.idx = idx;
  const Stmt* s = find_stmt(p.threads[static_cast<std::size_t>(thread)].body, stmt);
  if (s) {
    e.obj = s->object_id;
    e.ord = s->order;
    e.act = s->kind == StmtKind::load ? Act::read : s->kind == StmtKind::store ? Act::write : Act::fence;
  }
  return e;
}

}  // namespace

TEST(Dep, ControlDependenceThroughBranch) {
  Program p = one_thread("  r1 = load(x, rlx)\n  if (r1 == 1):\n    store(y, 1, rlx)\n");
  // ids in preorder: 0 load, 1 branch, 2 store
  EXPECT_TRUE(dep(p, ev(p, 0, 0, 0), ev(p, 0, 2, 1)));
}

TEST(Dep, IndependentStores) {
  Program p = one_thread("  store(x, 1, rlx)\n  store(y, 1, rlx)\n");
  EXPECT_FALSE(dep(p, ev(p, 0, 0, 0), ev(p, 0, 1, 1)));
}

TEST(Dep, DataDependenceThroughLocalChain) {
  Program p = one_thread("  r1 = load(x, rlx)\n  r2 = r1 + 1\n  store(y, r2, rlx)\n");
  EXPECT_TRUE(dep(p, ev(p, 0, 0, 0), ev(p, 0, 2, 1)));
}

TEST(Dep, BranchOnUnrelatedLocalIsNoDependence) {
  Program p = one_thread("  r1 = load(x, rlx)\n  r2 = 3\n  if (r2 == 3):\n    store(y, 1, rlx)\n");
  EXPECT_FALSE(dep(p, ev(p, 0, 0, 0), ev(p, 0, 3, 1)));
}

TEST(Dep, IrreflexiveAndForwardOnly) {
  Program p = one_thread("  r1 = load(x, rlx)\n  store(y, r1, rlx)\n");
  EXPECT_FALSE(dep(p, ev(p, 0, 0, 0), ev(p, 0, 0, 0)));
  EXPECT_FALSE(dep(p, ev(p, 0, 1, 1), ev(p, 0, 0, 0)));
  EXPECT_TRUE(dep(p, ev(p, 0, 0, 0), ev(p, 0, 1, 1)));
}

TEST(Dep, CrossThreadIsAContractViolation) {
  Program p = one_thread("  store(x, 1, rlx)\n");
  EXPECT_THROW(dep(p, ev(p, 0, 0, 0), ev(p, 1, 0, 0)), ContractViolation);
}

TEST(Dep, NoupAndNodown) {
  Program p = one_thread(
      "  a = load(x, acq)\n  b = load(x, rlx)\n  store(y, 1, rel)\n  fence(acq)\n  fence(rel)\n  c = fadd(x, 1, "
      "sc)\n");
  const auto& b = p.threads[0].body;
  EXPECT_TRUE(imposes_noup(b[0]));
  EXPECT_FALSE(imposes_noup(b[1]));
  EXPECT_FALSE(imposes_noup(b[2]));
  EXPECT_TRUE(imposes_nodown(b[2]));
  EXPECT_TRUE(imposes_noup(b[3]));
  EXPECT_FALSE(imposes_nodown(b[3]));
  EXPECT_TRUE(imposes_nodown(b[4]));
  EXPECT_TRUE(imposes_noup(b[5]));
  EXPECT_TRUE(imposes_nodown(b[5]));
  EXPECT_TRUE(noup(b[0], b[2]));
  EXPECT_FALSE(noup(b[0], b[0]));
  EXPECT_TRUE(nodown(b[2], b[1]));
}
