// SPDX-License-Identifier: MIT
#include <gtest/gtest.h>

#include <random>

#include "tpt/sat.hpp"

using namespace tpt;

namespace {

struct MaskClause {
  std::uint64_t pos = 0, neg = 0;
};

std::vector<MaskClause> masks(const CnfFormula& f) {
  std::vector<MaskClause> out;
  for (std::size_t i = 0; i < f.num_clauses(); ++i) {
    MaskClause m;
    for (int l : f.clause(i)) (l > 0 ? m.pos : m.neg) |= 1ull << (std::abs(l) - 1);
    out.push_back(m);
  }
  return out;
}

bool brute_sat(const CnfFormula& f) {
  auto ms = masks(f);
  const std::uint64_t n = 1ull << f.num_vars();
  for (std::uint64_t a = 0; a < n; ++a) {
    bool ok = true;
    for (const auto& m : ms)
      if (!((a & m.pos) | (~a & m.neg))) {
        ok = false;
        break;
      }
    if (ok) return true;
  }
  return false;
}

// Plain recursive splitting without learning, used as an independent oracle.
bool dpll(std::vector<std::vector<int>> cls, int nvars) {
  for (;;) {
    int unit = 0;
    for (const auto& c : cls) {
      if (c.empty()) return false;
      if (c.size() == 1) unit = c[0];
    }
    if (cls.empty()) return true;
    if (!unit) break;
    std::vector<std::vector<int>> next;
    for (const auto& c : cls) {
      if (std::find(c.begin(), c.end(), unit) != c.end()) continue;
      std::vector<int> d;
      for (int l : c)
        if (l != -unit) d.push_back(l);
      next.push_back(d);
    }
    cls = std::move(next);
  }
  int v = std::abs(cls[0][0]);
  for (int l : {v, -v}) {
    auto c2 = cls;
    c2.push_back({l});
    if (dpll(c2, nvars)) return true;
  }
  return false;
}

CnfFormula random_3cnf(std::mt19937_64& rng, int n, double ratio) {
  CnfFormula f;
  f.ensure_vars(n);
  int m = static_cast<int>(ratio * n + 0.5);
  std::uniform_int_distribution<int> var(1, n), sign(0, 1);
  for (int i = 0; i < m; ++i) {
    std::vector<int> c;
    for (int k = 0; k < 3; ++k) c.push_back(sign(rng) ? var(rng) : -var(rng));
    f.add_clause(c);
  }
  return f;
}

}  // namespace

TEST(Cnf, ClauseNormalisation) {
  CnfFormula f;
  f.ensure_vars(3);
  EXPECT_TRUE(f.add_clause({-2, 1, 1}));
  ASSERT_EQ(f.num_clauses(), 1u);
  EXPECT_EQ(std::vector<int>(f.clause(0).begin(), f.clause(0).end()), (std::vector<int>{1, -2}));
  EXPECT_FALSE(f.add_clause({3, -3}));
  EXPECT_EQ(f.num_clauses(), 1u);
  EXPECT_THROW(f.add_clause({4}), std::invalid_argument);
  EXPECT_THROW(f.add_clause(std::span<const int>()), std::invalid_argument);
}

TEST(Cnf, ExactlyOneShapes) {
  CnfFormula f;
  f.ensure_vars(4);
  std::vector<int> one{1};
  add_exactly_one(f, one);
  EXPECT_EQ(f.num_clauses(), 1u);
  CnfFormula g;
  g.ensure_vars(2);
  std::vector<int> two{1, 2};
  add_exactly_one(g, two);
  EXPECT_EQ(export_dimacs(g), "p cnf 2 2\n1 2 0\n-1 -2 0\n");
  CnfFormula h;
  h.ensure_vars(4);
  std::vector<int> four{1, 2, 3, 4};
  add_exactly_one(h, four);
  EXPECT_EQ(h.num_clauses(), 7u);
  EXPECT_THROW(add_exactly_one(h, std::span<const int>()), std::invalid_argument);
}

TEST(Cnf, AtLeastKIsExact) {
  for (int n = 1; n <= 6; ++n) {
    for (int k = 0; k <= n; ++k) {
      CnfFormula base;
      base.ensure_vars(n);
      std::vector<int> vars;
      for (int i = 1; i <= n; ++i) vars.push_back(i);
      add_at_least_k(base, vars, k);
      if (k == 0) EXPECT_EQ(base.num_clauses(), 0u);
      if (k == n) EXPECT_EQ(base.num_clauses(), static_cast<std::size_t>(n));
      for (int a = 0; a < (1 << n); ++a) {
        CnfFormula f = base;
        for (int i = 0; i < n; ++i) f.add_clause({(a >> i & 1) ? i + 1 : -(i + 1)});
        bool want = __builtin_popcount(static_cast<unsigned>(a)) >= k;
        EXPECT_EQ(solve(f).sat(), want) << "n=" << n << " k=" << k << " a=" << a;
      }
    }
  }
  CnfFormula f;
  f.ensure_vars(2);
  std::vector<int> vars{1, 2};
  EXPECT_THROW(add_at_least_k(f, vars, 3), std::invalid_argument);
}

TEST(Solver, Trivial) {
  CnfFormula empty;
  auto r = solve(empty);
  EXPECT_TRUE(r.sat());
  EXPECT_EQ(r.model.size(), 1u);
  CnfFormula f;
  f.ensure_vars(1);
  f.add_clause({1});
  f.add_clause({-1});
  EXPECT_EQ(solve(f).status, SolveStatus::Unsat);
}

TEST(Solver, AgreesWithEnumeration) {
  std::mt19937_64 rng(2024);
  int sat = 0, unsat = 0;
  for (int i = 0; i < 500; ++i) {
    int n = 3 + i % 18;
    double ratio = i % 5 == 4 ? 6.0 : 3.0;
    CnfFormula f = random_3cnf(rng, n, ratio);
    auto r = solve(f);
    bool want = brute_sat(f);
    ASSERT_EQ(r.sat(), want) << export_dimacs(f);
    if (r.sat()) EXPECT_TRUE(satisfies(f, r.model));
    (want ? sat : unsat)++;
  }
  EXPECT_GT(sat, 50);
  EXPECT_GT(unsat, 50);
}

TEST(Solver, AgreesWithSplittingUpTo30Vars) {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 60; ++i) {
    int n = 21 + i % 10;
    CnfFormula f = random_3cnf(rng, n, i % 2 ? 4.3 : 3.0);
    std::vector<std::vector<int>> cls;
    for (std::size_t c = 0; c < f.num_clauses(); ++c) cls.emplace_back(f.clause(c).begin(), f.clause(c).end());
    EXPECT_EQ(solve(f).sat(), dpll(cls, n));
  }
}

TEST(Solver, PigeonholeUnsatAndBudget) {
  // 7 pigeons, 6 holes.
  const int P = 7, H = 6;
  CnfFormula f;
  f.ensure_vars(P * H);
  auto x = [&](int p, int h) { return p * H + h + 1; };
  for (int p = 0; p < P; ++p) {
    std::vector<int> c;
    for (int h = 0; h < H; ++h) c.push_back(x(p, h));
    f.add_clause(c);
  }
  for (int h = 0; h < H; ++h)
    for (int p = 0; p < P; ++p)
      for (int q = p + 1; q < P; ++q) f.add_clause({-x(p, h), -x(q, h)});
  EXPECT_EQ(solve(f).status, SolveStatus::Unsat);
  SolverOptions o;
  o.max_conflicts = 10;
  EXPECT_EQ(solve(f, o).status, SolveStatus::BudgetExceeded);
}

TEST(Dimacs, ExportExact) {
  CnfFormula f;
  f.ensure_vars(2);
  f.add_clause({1, -2});
  EXPECT_EQ(export_dimacs(f), "p cnf 2 1\n1 -2 0\n");
  CnfFormula g = parse_dimacs("c comment\np cnf 3 2\n1 -2 0\n3\n 2 0\n");
  EXPECT_EQ(g.num_vars(), 3);
  EXPECT_EQ(export_dimacs(g), "p cnf 3 2\n1 -2 0\n2 3 0\n");
  EXPECT_THROW(parse_dimacs("1 2 0\n"), std::invalid_argument);
  EXPECT_THROW(parse_dimacs("p cnf 2 1\n1 x 0\n"), std::invalid_argument);
}

TEST(Dimacs, ImportModel) {
  auto r = import_model("c hi\ns SATISFIABLE\nv 1 -2\nv 3 0\n", 3);
  ASSERT_TRUE(r.sat());
  EXPECT_TRUE(r.model[1]);
  EXPECT_FALSE(r.model[2]);
  EXPECT_TRUE(r.model[3]);
  EXPECT_EQ(import_model("s UNSATISFIABLE\n", 3).status, SolveStatus::Unsat);
  EXPECT_THROW(import_model("v 1 4 0\n", 3), std::invalid_argument);
  EXPECT_THROW(import_model("v 1 q 0\n", 3), std::invalid_argument);
  EXPECT_THROW(import_model("garbage\n", 3), std::invalid_argument);
}

TEST(Dimacs, ExternalCommandRoundTrip) {
  CnfFormula f;
  f.ensure_vars(2);
  f.add_clause({1, -2});
  f.add_clause({2});
  auto r = solve_external(f, "grep -q 'p cnf 2 2' {cnf} && printf 's SATISFIABLE\\nv 1 2 0\\n'");
  ASSERT_TRUE(r.sat());
  EXPECT_TRUE(satisfies(f, r.model));
  EXPECT_THROW(solve_external(f, "true {cnf}; printf 's SATISFIABLE\\nv -1 2 0\\n'"), std::runtime_error);
}

TEST(Registry, Bijection) {
  CnfFormula f;
  VarRegistry reg;
  int a = reg.get(f, "body", {0, 1, 2});
  int b = reg.get(f, "head", {0, 1, 2});
  int aux = f.new_var();
  EXPECT_EQ(reg.get(f, "body", {0, 1, 2}), a);
  EXPECT_NE(a, b);
  EXPECT_EQ(reg.find("head", {0, 1, 2}), b);
  EXPECT_FALSE(reg.find("map", {0}));
  EXPECT_EQ(reg.name(a)->to_string(), "body(0,1,2)");
  EXPECT_EQ(reg.name(aux), nullptr);
  EXPECT_EQ(f.num_vars(), 3);
  EXPECT_EQ(reg.size(), 2u);
}
