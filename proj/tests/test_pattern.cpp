// SPDX-License-Identifier: MIT
#include <gtest/gtest.h>

#include "test_util.hpp"
#include "tpt/pattern.hpp"

using namespace tpt;

TEST(ParsePattern, Fig1Body) {
  Pattern p = parse_pattern("?x1($Y1,$Y2)");
  EXPECT_EQ(p.label(), PatternLabel::node_var("x1"));
  EXPECT_EQ(p.child(0).label(), PatternLabel::tree_var("Y1"));
  EXPECT_EQ(p.child(1).label(), PatternLabel::tree_var("Y2"));
  EXPECT_EQ(serialize_pattern(p), "?x1($Y1,$Y2)");
}

TEST(ParsePattern, ConstantAndErrors) {
  Pattern p = parse_pattern("a");
  EXPECT_EQ(p.label(), PatternLabel::constant("a"));
  EXPECT_THROW(parse_pattern("$Y(a)"), ParseError);
  EXPECT_THROW(parse_pattern("?(a)"), ParseError);
  EXPECT_THROW(parse_pattern("@Z"), ParseError);
  EXPECT_NO_THROW(parse_pattern("a(@Z)", true));
  EXPECT_THROW(parse_pattern("a(@Z(b))", true), ParseError);
  EXPECT_EQ(serialize_pattern(parse_pattern(" ?x ( \"?\" , $T )")), "?x(\"?\",$T)");
}

TEST(MatchAt, Example21) {
  Tree t = parse_tree("a(b(d,e),c)");
  Pattern p = parse_pattern("?x1($Y1,$Y2)");
  auto m = match_at(p, t, {});
  ASSERT_TRUE(m);
  Binding b = binding_of(*m, p, t);
  EXPECT_EQ(b.nodes.at("x1"), "a");
  EXPECT_EQ(serialize_tree(b.trees.at("Y1")), "b(d,e)");
  EXPECT_EQ(serialize_tree(b.trees.at("Y2")), "c");
  EXPECT_EQ(m->map.size(), 3u);
  EXPECT_EQ(m->map[1], (std::pair<Position, Position>{{0}, {0}}));
}

TEST(MatchAt, Example22ChildCount) {
  EXPECT_FALSE(match_at(parse_pattern("?x1(?x2)"), parse_tree("a(b,c(d))"), {}));
}

TEST(MatchAt, TreeVarWildcard) {
  Tree t = parse_tree("a(b(d,e),c)");
  for (const auto& v : t.positions()) {
    Pattern p = parse_pattern("$Y");
    auto m = match_at(p, t, v);
    ASSERT_TRUE(m);
    EXPECT_EQ(binding_of(*m, p, t).trees.at("Y"), subtree(t, v));
  }
}

TEST(MatchAt, Consistency) {
  Pattern p = parse_pattern("f(?x,?x)");
  Binding b = binding_of(*match_at(p, parse_tree("f(c,c)"), {}), p, parse_tree("f(c,c)"));
  EXPECT_EQ(b.nodes.size(), 1u);
  EXPECT_EQ(b.nodes.at("x"), "c");
  EXPECT_FALSE(match_at(p, parse_tree("f(c,d)"), {}));
  Pattern q = parse_pattern("f($Y,$Y)");
  EXPECT_TRUE(match_at(q, parse_tree("f(g(a),g(a))"), {}));
  EXPECT_FALSE(match_at(q, parse_tree("f(g(a),g(b))"), {}));
  EXPECT_TRUE(binding_of(*match_at(parse_pattern("a(b)"), parse_tree("a(b)"), {}), parse_pattern("a(b)"),
                         parse_tree("a(b)"))
                  .empty());
}

TEST(AllMatches, Fig1SecondPair) {
  Tree t = parse_tree("and(imp(B,D),A)");
  auto ms = all_matches(parse_pattern("imp($Y1,$Y2)"), t);
  ASSERT_EQ(ms.size(), 1u);
  EXPECT_EQ(ms[0].root_image, (Position{0}));
}

TEST(AllMatches, SingleNodeVarMatchesLeaves) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    Tree t = testutil::random_tree(rng, 10, {"a", "b"});
    auto ps = t.positions();
    auto leaves = std::count_if(ps.begin(), ps.end(), [&](const Position& p) { return subtree(t, p).degree() == 0; });
    EXPECT_EQ(static_cast<long>(all_matches(parse_pattern("?x"), t).size()), leaves);
  }
  EXPECT_EQ(all_matches(parse_pattern("$Y"), parse_tree("a(b,c)")).size(), 3u);
}

namespace {

// Naive oracle: checks conditions 1-4 directly from the definitions.
bool naive_match(const Pattern& p, const Tree& t, const Position& v) {
  std::map<std::string, std::string> nodes;
  std::map<std::string, Tree> trees;
  for (const auto& w : p.positions()) {
    Position tw = concat(v, w);
    if (!t.contains(tw)) return false;
    const PatternNode* pn = p.find(w);
    if (pn->label.kind == PatternLabel::Kind::TreeVar) {
      Tree s = subtree(t, tw);
      auto it = trees.find(pn->label.name);
      if (it != trees.end() && !(it->second == s)) return false;
      trees.emplace(pn->label.name, s);
      continue;
    }
    if (pn->label.kind == PatternLabel::Kind::Const && pn->label.name != t.label_at(tw)) return false;
    if (pn->label.kind == PatternLabel::Kind::NodeVar) {
      auto it = nodes.find(pn->label.name);
      if (it != nodes.end() && it->second != t.label_at(tw)) return false;
      nodes.emplace(pn->label.name, t.label_at(tw));
    }
    if (static_cast<int>(pn->kids.size()) != subtree(t, tw).degree()) return false;
  }
  return true;
}

Pattern random_pattern(std::mt19937_64& rng, const Tree& shape) {
  std::uniform_int_distribution<int> kind(0, 5);
  std::uniform_int_distribution<int> name(0, 1);
  int k = kind(rng);
  if (k == 0) return Pattern(PatternLabel::tree_var("Y" + std::to_string(name(rng))));
  std::vector<Pattern> kids;
  for (const auto& c : shape.children()) kids.push_back(random_pattern(rng, c));
  if (k <= 2) return Pattern(PatternLabel::node_var("x" + std::to_string(name(rng))), std::move(kids));
  return Pattern(PatternLabel::constant(shape.label()), std::move(kids));
}

}  // namespace

TEST(AllMatches, AgreesWithNaiveOracle) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 500; ++i) {
    Tree t = testutil::random_tree(rng, 10, {"a", "b"}, 2);
    Tree shape = testutil::random_tree(rng, 4, {"a", "b"}, 2);
    Pattern p = random_pattern(rng, shape);
    std::vector<Position> want;
    for (const auto& v : t.positions())
      if (naive_match(p, t, v)) want.push_back(v);
    std::vector<Position> got;
    for (const auto& m : all_matches(p, t)) got.push_back(m.root_image);
    EXPECT_EQ(got, want) << serialize_pattern(p) << " on " << serialize_tree(t);
  }
}

TEST(MatchAt, Monotonicity) {
  // Replacing a constant or node-variable leaf by a fresh tree variable keeps a match.
  std::mt19937_64 rng(23);
  int checked = 0;
  for (int i = 0; i < 400; ++i) {
    Tree t = testutil::random_tree(rng, 8, {"a", "b"}, 2);
    for (const auto& v : t.positions()) {
      Tree s = subtree(t, v);
      Pattern p = random_pattern(rng, s);
      if (!match_at(p, t, v)) continue;
      for (const auto& w : p.positions()) {
        const PatternNode* n = p.find(w);
        if (!n->kids.empty() || n->label.kind == PatternLabel::Kind::TreeVar) continue;
        std::function<Pattern(const Pattern&, std::size_t)> rebuild = [&](const Pattern& q, std::size_t d) {
          if (d == w.size()) return Pattern(PatternLabel::tree_var("Fresh"));
          auto kids = q.children();
          kids[w[d]] = rebuild(kids[w[d]], d + 1);
          return Pattern(q.label(), kids);
        };
        EXPECT_TRUE(match_at(rebuild(p, 0), t, v));
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 100);
}
