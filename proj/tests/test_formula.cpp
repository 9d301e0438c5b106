// SPDX-License-Identifier: MIT
#include <gtest/gtest.h>

#include <random>

#include "tpt/formula.hpp"
#include "tpt/learn.hpp"

using namespace tpt;

namespace {

Tree T(const char* s) { return parse_tree(s); }

Tree random_formula(std::mt19937_64& rng, int depth, bool nary) {
  static const char* vars[] = {"A", "B", "C", "D1"};
  int pick = depth == 0 ? static_cast<int>(rng() % 2) : static_cast<int>(rng() % 7);
  if (pick == 0) return Tree(vars[rng() % 4]);
  if (pick == 1) return Tree(rng() % 5 ? vars[rng() % 4] : (rng() % 2 ? "true" : "false"));
  if (pick == 2) return Tree("not", {random_formula(rng, depth - 1, nary)});
  static const char* ops[] = {"and", "or", "imp", "iff"};
  std::string op = ops[pick - 3];
  int n = nary && (op == "and" || op == "or") ? 2 + static_cast<int>(rng() % 2) : 2;
  std::vector<Tree> kids;
  for (int i = 0; i < n; ++i) {
    Tree c = random_formula(rng, depth - 1, nary);
    // nested chains of the same operator would be merged by the parser
    if (nary && c.label() == op) c = Tree("not", {c});
    kids.push_back(c);
  }
  return Tree(op, std::move(kids));
}

}  // namespace

TEST(Formula, ParsesFigureFormulas) {
  EXPECT_EQ(parse_formula("E -> (!A & !C)"), T("imp(E,and(not(A),not(C)))"));
  EXPECT_EQ(parse_formula("(B -> D) & A"), T("and(imp(B,D),A)"));
  EXPECT_EQ(parse_formula("A"), T("A"));
}

TEST(Formula, PrecedenceAndAssociativity) {
  EXPECT_EQ(parse_formula("A | B & C"), T("or(A,and(B,C))"));
  EXPECT_EQ(parse_formula("!A & B"), T("and(not(A),B)"));
  EXPECT_EQ(parse_formula("A -> B -> C"), T("imp(A,imp(B,C))"));
  EXPECT_EQ(parse_formula("A & B & C"), T("and(and(A,B),C)"));
  EXPECT_EQ(parse_formula("A <-> B -> C | D"), T("iff(A,imp(B,or(C,D)))"));
  EXPECT_EQ(parse_formula("!!A"), T("not(not(A))"));
  EXPECT_EQ(parse_formula("1 & 0 | true -> false"), T("imp(or(and(true,false),true),false)"));
  EXPECT_EQ(parse_formula("A & B & C", {true}), T("and(A,B,C)"));
  EXPECT_EQ(parse_formula("A & (B & C)", {true}), T("and(A,and(B,C))"));
}

TEST(Formula, SyntaxErrors) {
  EXPECT_THROW(parse_formula("A <-> B <-> C"), FormulaError);
  EXPECT_THROW(parse_formula("(A & B"), FormulaError);
  EXPECT_THROW(parse_formula("A &"), FormulaError);
  EXPECT_THROW(parse_formula(""), FormulaError);
  EXPECT_THROW(parse_formula("a & B"), FormulaError);
  EXPECT_THROW(parse_formula("A # B"), FormulaError);
  EXPECT_THROW(parse_formula("A B"), FormulaError);
  try {
    parse_formula("A & )");
    FAIL();
  } catch (const FormulaError& e) {
    EXPECT_EQ(e.column(), 4u);
  }
}

TEST(Formula, PrintParseRoundTrip) {
  std::mt19937_64 rng(5);
  for (bool nary : {false, true}) {
    for (int i = 0; i < 500; ++i) {
      Tree t = random_formula(rng, 4, nary);
      ASSERT_TRUE(is_formula_tree(t));
      std::string text = print_formula(t);
      ASSERT_EQ(parse_formula(text, {nary}), t) << text;
    }
  }
  EXPECT_EQ(print_formula(T("imp(imp(A,B),C)")), "(A -> B) -> C");
  EXPECT_EQ(print_formula(T("and(A,and(B,C))")), "A & (B & C)");
  EXPECT_EQ(print_formula(T("not(iff(A,B))")), "!(A <-> B)");
  EXPECT_FALSE(is_formula_tree(T("not(A,B)")));
  EXPECT_FALSE(is_formula_tree(T("imp(A)")));
  EXPECT_THROW(print_formula(T("f(A)")), std::invalid_argument);
}

TEST(Unify, TargetFirstNaming) {
  auto a = unify_variables({parse_formula("B -> D"), parse_formula("D -> B")});
  auto b = unify_variables({parse_formula("E -> F"), parse_formula("F -> E")});
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.first, T("imp(P2,P1)"));
  EXPECT_EQ(a.second, T("imp(P1,P2)"));
  auto plain = unify_variables({parse_formula("true & false"), parse_formula("false")});
  EXPECT_EQ(plain.first, parse_formula("true & false"));
  auto fresh = unify_variables({parse_formula("Q & Z & R"), parse_formula("R")});
  EXPECT_EQ(fresh.first, T("and(and(P2,P3),P1)"));
}

TEST(Dataset, ParsesAndReportsLines) {
  auto pairs = parse_dataset("# header\n\nA & B ::: !(A <-> B)\n  C ::: C\n");
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_EQ(pairs[1].first, T("C"));
  try {
    parse_dataset("A ::: A\nA & ::: B\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
  EXPECT_THROW(parse_dataset("A -> B\n"), ParseError);
}

TEST(Dataset, EitherOrNeedsFourRules) {
  IngestOptions io;
  io.rules = 6;
  auto inst = ingest_dataset(either_or_dataset(), io);
  EXPECT_EQ(inst.pairs.size(), 19u);
  LearnConfig cfg;
  cfg.incremental = true;
  auto res = learn(inst, cfg);
  ASSERT_EQ(res.status, LearnStatus::Found);
  EXPECT_EQ(res.rules_used, 4);
  for (const auto& [t, ts] : inst.pairs) EXPECT_TRUE(explains_in_steps(res.rules, t, ts, 1));
  inst.rules = 3;
  EXPECT_EQ(learn(inst).status, LearnStatus::NoSolution);
}

TEST(Dataset, ImplicationSwapCluster) {
  auto inst = ingest_dataset("E -> (!A & !C) ::: (!A & !C) -> E\nB -> D ::: D -> B\n");
  auto res = learn(inst);
  ASSERT_EQ(res.status, LearnStatus::Found);
  ASSERT_EQ(res.rules.rules.size(), 1u);
  EXPECT_TRUE(explains(res.rules.rules[0], parse_formula("(A | B) -> C"), parse_formula("C -> (A | B)")));
}
