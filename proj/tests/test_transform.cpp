#include <gtest/gtest.h>

#include "moca/parser.hpp"
#include "moca/transform.hpp"
#include "support.hpp"

using namespace moca;

namespace {

Program prog(const std::string& t1) {
  return parse_program("program p\ninit x = 0, y = 0, z = 0\nthread T1:\n" + t1);
}

std::string body_text(const Program& p) {
  std::string text = print_program(p);
  return text.substr(text.find("thread T1:"));
}

}  // namespace

TEST(EarlyWrite, HoistsStoreAboveUnrelatedLoad) {
  Program p = prog("  r1 = load(x, rlx)\n  store(y, 1, rlx)\n");
  EXPECT_EQ(body_text(early_write_transform(p)), "thread T1:\n  store(y, 1, rlx)\n  r1 = load(x, rlx)\n");
}

TEST(EarlyWrite, AcquireLoadBlocks) {
  Program p = prog("  r1 = load(x, acq)\n  store(y, 1, rlx)\n");
  EXPECT_EQ(body_text(early_write_transform(p)), body_text(p));
}

TEST(EarlyWrite, DataDependenceBlocks) {
  Program p = prog("  r1 = load(x, rlx)\n  store(y, r1, rlx)\n");
  EXPECT_EQ(body_text(early_write_transform(p)), body_text(p));
}

TEST(EarlyWrite, SameObjectBlocks) {
  Program p = prog("  r1 = load(y, rlx)\n  store(y, 1, rlx)\n");
  EXPECT_EQ(body_text(early_write_transform(p)), body_text(p));
}

TEST(EarlyWrite, AcquireFenceBlocks) {
  Program p = prog("  r1 = load(x, rlx)\n  fence(acq)\n  store(y, 1, rlx)\n");
  EXPECT_EQ(body_text(early_write_transform(p)), body_text(p));
}

TEST(EarlyWrite, WritesKeepTheirRelativeOrder) {
  Program p = prog("  r1 = load(x, rlx)\n  store(y, 1, rlx)\n  store(z, 1, rlx)\n");
  EXPECT_EQ(body_text(early_write_transform(p)),
            "thread T1:\n  store(y, 1, rlx)\n  store(z, 1, rlx)\n  r1 = load(x, rlx)\n");
}

TEST(EarlyWrite, StaysInsideItsBlock) {
  Program p = prog("  r1 = load(x, rlx)\n  if (r1 == 1):\n    r2 = load(z, rlx)\n    store(y, 1, rlx)\n");
  EXPECT_EQ(body_text(early_write_transform(p)),
            "thread T1:\n  r1 = load(x, rlx)\n  if (r1 == 1):\n    store(y, 1, rlx)\n    r2 = load(z, rlx)\n");
}

TEST(EarlyWrite, Idempotent) {
  for (const auto& f : fixtures::corpus_files()) {
    Program p = parse_program(fixtures::read_file(f));
    Program once = early_write_transform(p);
    EXPECT_EQ(print_program(once), print_program(early_write_transform(once))) << f;
  }
}

TEST(EarlyWrite, KeepsStatementIds) {
  Program p = prog("  r1 = load(x, rlx)\n  store(y, 1, rlx)\n");
  Program t = early_write_transform(p);
  EXPECT_EQ(t.threads[0].body[0].id, p.threads[0].body[1].id);
  EXPECT_EQ(t.threads[0].body[1].id, p.threads[0].body[0].id);
}

TEST(Spr, IdentityPasses) {
  Program p = prog("  r1 = load(x, rlx)\n  store(y, r1 + 1, rlx)\n  store(x, 2, rel)\n");
  EXPECT_TRUE(check_spr(p, p).ok());
}

TEST(Spr, HoistPasses) {
  Program p = prog("  r1 = load(x, rlx)\n  store(y, 1, rlx)\n");
  auto v = check_spr(p, early_write_transform(p));
  EXPECT_TRUE(v.spr1 && v.spr2 && v.spr3);
}

TEST(Spr, SwappedSameObjectStoresFailSpr3) {
  Program p = prog("  store(x, 1, rlx)\n  store(x, 2, rlx)\n");
  Program q = p;
  std::swap(q.threads[0].body[0], q.threads[0].body[1]);
  auto v = check_spr(p, q);
  EXPECT_TRUE(v.spr1);
  EXPECT_FALSE(v.spr3);
}

TEST(Spr, HoistOverDependenceFailsSpr2) {
  Program p = prog("  r1 = load(x, rlx)\n  store(y, r1, rlx)\n");
  Program q = p;
  std::swap(q.threads[0].body[0], q.threads[0].body[1]);
  EXPECT_FALSE(check_spr(p, q).spr2);
}

TEST(Spr, DroppedStatementFailsSpr1) {
  Program p = prog("  r1 = load(x, rlx)\n  store(y, 1, rlx)\n");
  Program q = p;
  q.threads[0].body.pop_back();
  EXPECT_FALSE(check_spr(p, q).spr1);
}

TEST(Spr, WholeCorpusPasses) {
  for (const auto& f : fixtures::corpus_files()) {
    Program p = parse_program(fixtures::read_file(f));
    auto v = check_spr(p, early_write_transform(p));
    EXPECT_TRUE(v.ok()) << f << ": " << (v.notes.empty() ? "" : v.notes.front());
  }
}
