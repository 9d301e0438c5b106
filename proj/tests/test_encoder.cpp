// SPDX-License-Identifier: MIT
#include <gtest/gtest.h>

#include <random>
#include <set>

#include "test_util.hpp"
#include "tpt/encoder.hpp"
#include "tpt/instance.hpp"

namespace tpt {
namespace {

Tree T(const char* s) { return parse_tree(s); }

LearningInstance make(std::vector<std::pair<Tree, Tree>> pairs, int r = 1, int s = 1, double q = 1.0) {
  LearningInstance inst;
  inst.pairs = std::move(pairs);
  inst.rules = r;
  inst.steps = s;
  inst.ratio = q;
  return inst;
}

struct Outcome {
  bool sat = false;
  Decoded decoded;
};

Outcome run(const LearningInstance& inst, const EncoderOptions& opts = {}) {
  Encoding e = encode(inst, opts);
  SolveResult r = solve(e.cnf);
  Outcome o;
  o.sat = r.sat();
  if (o.sat) o.decoded = decode(e, r.model);
  return o;
}

LearningInstance implication_swap() {
  return make({{T("and(imp(A,B),C)"), T("and(imp(B,A),C)")}, {T("imp(and(A,B),or(C,D))"), T("imp(or(C,D),and(A,B))")}});
}

LearningInstance vertex_cover_example() {
  auto pair = [](int i, int j) {
    std::string l = "l_" + std::to_string(i) + "_" + std::to_string(j);
    auto leaf = [&](int k) { return Tree(k == i || k == j ? l : "b"); };
    Tree src("b", {Tree("b", {leaf(1), leaf(2)}), Tree("b", {leaf(3), leaf(4)})});
    return std::pair<Tree, Tree>{src, Tree(l)};
  };
  return make({pair(1, 2), pair(1, 4), pair(2, 3), pair(2, 4), pair(3, 4)});
}

TEST(Skeleton, BinaryDepthTwo) {
  Skeleton s = make_skeleton(2, 2, 100);
  ASSERT_EQ(s.size(), 7);
  std::vector<std::string> got;
  for (const auto& p : s.pos) got.push_back(position_to_string(p));
  EXPECT_EQ(got, (std::vector<std::string>{"-", "0", "0.0", "0.1", "1", "1.0", "1.1"}));
  EXPECT_EQ(s.concat(s.index_of({1}), s.index_of({0})), s.index_of({1, 0}));
  EXPECT_EQ(s.concat(s.index_of({1, 0}), s.index_of({0})), -1);
  EXPECT_EQ(s.index_of({2}), -1);
  EXPECT_THROW(make_skeleton(2, 2, 6), EncodingTooLarge);
  EXPECT_EQ(make_skeleton(0, 0, 1).size(), 1);
}

TEST(Encoder, ImplicationSwap) {
  auto inst = implication_swap();
  Encoding e = encode(inst);
  SolveResult r = solve(e.cnf);
  ASSERT_TRUE(r.sat());
  Decoded d = decode(e, r.model);
  const auto& rho = d.rules.rules.at(0);
  ASSERT_EQ(rho.body.degree(), 2);
  EXPECT_EQ(rho.body.child(0).label(), PatternLabel::tree_var("Y1"));
  EXPECT_EQ(rho.body.child(1).label(), PatternLabel::tree_var("Y2"));
  EXPECT_EQ(rho.head.label(), rho.body.label());
  EXPECT_EQ(rho.head.child(0).label(), PatternLabel::tree_var("Y2"));
  EXPECT_EQ(rho.head.child(1).label(), PatternLabel::tree_var("Y1"));
  ASSERT_TRUE(d.traces[0] && d.traces[1]);
  EXPECT_EQ(position_to_string(d.traces[0]->steps.at(0).at), "0");
  EXPECT_EQ(position_to_string(d.traces[1]->steps.at(0).at), "-");
  EXPECT_TRUE(r.value(*e.map_var(0, 1, {0}, 0)));
  EXPECT_TRUE(r.value(*e.map_var(0, 1, {}, 1)));
}

TEST(Encoder, EnoughRulesAlwaysSat) {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 25; ++round) {
    std::vector<std::pair<Tree, Tree>> pairs;
    int n = 1 + round % 3;
    for (int i = 0; i < n; ++i)
      pairs.emplace_back(testutil::random_tree(rng, 5, {"a", "b", "c"}), testutil::random_tree(rng, 5, {"a", "b", "c"}));
    auto o = run(make(pairs, n));
    EXPECT_TRUE(o.sat) << round;
  }
}

TEST(Encoder, IdenticalPair) {
  auto o = run(make({{T("f(a,b)"), T("f(a,b)")}}));
  ASSERT_TRUE(o.sat);
  ASSERT_TRUE(o.decoded.traces[0]);
  EXPECT_TRUE(o.decoded.traces[0]->steps.empty());
  auto layered = run(make({{T("f(a,b)"), T("f(a,b)")}}, 1, 2));
  EXPECT_TRUE(layered.sat);
}

TEST(Encoder, DecodesVariableListing) {
  LearningInstance inst = make({{T("a(a(a,a),a(a,a))"), T("a(a(a,a),a(a,a))")}});
  EncoderOptions opts;
  opts.force_layered = true;
  Encoding e = encode(inst, opts);
  ASSERT_EQ(e.skel.size(), 7);
  std::vector<bool> model(e.cnf.num_vars() + 1, false);
  auto set_body = [&](const Position& w, int code) { model[*e.body_var(0, w, code)] = true; };
  auto set_head = [&](const Position& w, int code) { model[*e.head_var(0, w, code)] = true; };
  auto x = [&](const Position& u) { return e.node_var_code(e.skel.index_of(u)); };
  auto y = [&](const Position& u) { return e.tree_var_code(e.skel.index_of(u)); };
  const int unused = e.unused_code();
  // x1 at the root, x2 at 0, Y1 at 00, Y2 at 01, Y3 at 1
  set_body({}, x({}));
  set_body({0}, x({0}));
  set_body({1}, y({1}));
  set_body({0, 0}, y({0, 0}));
  set_body({0, 1}, y({0, 1}));
  set_body({1, 0}, unused);
  set_body({1, 1}, unused);
  set_head({}, x({0}));
  set_head({0}, x({}));
  set_head({1}, e.label_code("a"));
  set_head({0, 0}, y({0, 1}));
  set_head({0, 1}, y({0, 0}));
  set_head({1, 0}, y({1}));
  set_head({1, 1}, unused);
  RuleSet rules = decode_rules(e, model);
  ASSERT_EQ(rules.rules.size(), 1u);
  EXPECT_EQ(serialize_rule(rules.rules[0]), serialize_rule(parse_rule("rho1: ?x1(?x2($Y1,$Y2),$Y3) ~> ?x2(?x1($Y2,$Y1),a($Y3))")));
}

TEST(Encoder, VertexCoverTwoRules) {
  auto inst = vertex_cover_example();
  EXPECT_FALSE(run(inst).sat);
  inst.rules = 2;
  auto o = run(inst);
  ASSERT_TRUE(o.sat);
  std::set<std::string> heads_at;
  for (const auto& rho : o.decoded.rules.rules) {
    EXPECT_TRUE(rho.head.label().is_var());
    EXPECT_EQ(rho.head.degree(), 0);
    for (const auto& p : rho.body.positions())
      if (rho.body.find(p)->label == rho.head.label()) {
        heads_at.insert(position_to_string(p));
        break;
      }
  }
  EXPECT_EQ(heads_at.size(), 2u);
  std::set<std::string> allowed{"0.1", "1.1"};
  for (const auto& h : heads_at) EXPECT_TRUE(allowed.count(h)) << h;
}

TEST(Encoder, DirectAndLayeredAgree) {
  std::mt19937_64 rng(5);
  std::vector<std::string> labels{"a", "b"};
  int sat = 0;
  for (int round = 0; round < 60; ++round) {
    std::vector<std::pair<Tree, Tree>> pairs;
    int n = 1 + round % 3;
    for (int i = 0; i < n; ++i) {
      Tree t = testutil::random_tree(rng, 5, labels, 2);
      Tree ts = testutil::random_tree(rng, 4, labels, 2);
      if (rng() % 2) {
        auto ps = t.positions();
        Position v = ps[rng() % ps.size()];
        ts = plug(context(t, v), ts);
      }
      pairs.emplace_back(t, ts);
    }
    auto inst = make(pairs, 1 + static_cast<int>(rng() % 2));
    EncoderOptions layered;
    layered.force_layered = true;
    EncoderOptions sym;
    sym.symmetry_breaking = true;
    bool a = run(inst).sat, b = run(inst, layered).sat, c = run(inst, sym).sat;
    EXPECT_EQ(a, b) << round;
    EXPECT_EQ(a, c) << round;
    sat += a;
  }
  EXPECT_GT(sat, 5);
  EXPECT_LT(sat, 55);
}

TEST(Encoder, RatioAllowsNoise) {
  std::vector<std::pair<Tree, Tree>> pairs;
  for (int k = 0; k < 9; ++k) {
    std::string a = "a" + std::to_string(k), d = "d" + std::to_string(k);
    pairs.emplace_back(Tree("f", {Tree(a, {Tree("c")}), Tree(d)}), Tree("f", {Tree(d), Tree(a, {Tree("c")})}));
  }
  pairs.emplace_back(T("g(p,q,w)"), T("h(z)"));
  auto o = run(make(pairs, 1, 1, 0.9));
  ASSERT_TRUE(o.sat);
  int explained = 0;
  for (const auto& tr : o.decoded.traces) explained += tr.has_value();
  EXPECT_GE(explained, 9);
  EXPECT_FALSE(o.decoded.traces[9].has_value());
  EXPECT_FALSE(explains(o.decoded.rules.rules[0], pairs[9].first, pairs[9].second));
  EXPECT_FALSE(run(make(pairs, 1, 1, 1.0)).sat);
}

TEST(Encoder, TwoStepSwap) {
  auto inst = make({{T("a(b,a(c,b))"), T("a(a(b,c),b)")}}, 1, 2);
  auto o = run(inst);
  ASSERT_TRUE(o.sat);
  ASSERT_TRUE(o.decoded.traces[0]);
  EXPECT_LE(o.decoded.traces[0]->steps.size(), 2u);
  EXPECT_TRUE(verify_trace(o.decoded.rules, inst.pairs[0].first, inst.pairs[0].second, *o.decoded.traces[0], 2));
  // with constant-free swaps only, two steps are needed
  EncoderOptions opts;
  opts.max_tree_vars = 2;
  opts.max_node_vars = 1;
  inst.pairs.push_back({T("f(g,h)"), T("f(h,g)")});
  auto two = run(inst, opts);
  ASSERT_TRUE(two.sat);
  EXPECT_EQ(two.decoded.traces[0]->steps.size(), 2u);
  inst.steps = 1;
  EXPECT_FALSE(run(inst, opts).sat);
}

TEST(Encoder, MultiStepRatio) {
  auto inst = make({{T("a(b,a(c,b))"), T("a(a(b,c),b)")}, {T("g(p,q,w)"), T("h(z)")}, {T("a(b,c)"), T("a(c,b)")}}, 1, 2,
                   0.6);
  auto o = run(inst);
  ASSERT_TRUE(o.sat);
  EXPECT_FALSE(o.decoded.traces[1].has_value());
  inst.ratio = 1.0;
  EXPECT_FALSE(run(inst).sat);
}

TEST(Encoder, DimacsRoundTrip) {
  auto inst = implication_swap();
  Encoding e = encode(inst);
  CnfFormula back = parse_dimacs(export_dimacs(e.cnf));
  ASSERT_EQ(back.num_clauses(), e.cnf.num_clauses());
  SolveResult r = solve(back);
  ASSERT_TRUE(r.sat());
  std::string out = "s SATISFIABLE\nv";
  for (int v = 1; v <= back.num_vars(); ++v) out += " " + std::to_string(r.model[v] ? v : -v);
  out += " 0\n";
  SolveResult imported = import_model(out, back.num_vars());
  ASSERT_TRUE(imported.sat());
  Decoded d = decode(e, imported.model);
  EXPECT_EQ(d.rules.rules.size(), 1u);
}

TEST(Encoder, CorruptModelIsRejected) {
  auto inst = implication_swap();
  Encoding e = encode(inst);
  SolveResult r = solve(e.cnf);
  ASSERT_TRUE(r.sat());
  auto model = r.model;
  // move pair 1's application to the root
  model[*e.map_var(0, 1, {0}, 0)] = false;
  auto root = e.map_var(0, 1, {}, 0);
  if (root) {
    model[*root] = true;
    EXPECT_THROW(decode(e, model), DecodeError);
  }
  std::vector<bool> blank(e.cnf.num_vars() + 1, false);
  EXPECT_THROW(decode_rules(e, blank), DecodeError);
}

TEST(Encoder, SizeCap) {
  auto inst = make({{T("f(a,b,c,d)"), T("f(a(a(a(a))))")}});
  EncoderOptions opts;
  opts.max_skeleton = 20;
  EXPECT_THROW(encode(inst, opts), EncodingTooLarge);
}

TEST(Encoder, FixedPositions) {
  auto inst = implication_swap();
  EncoderOptions opts;
  opts.fixed_positions = std::vector<Position>{{0}, {}};
  EXPECT_TRUE(run(inst, opts).sat);
  opts.fixed_positions = std::vector<Position>{{}, {}};
  EXPECT_FALSE(run(inst, opts).sat);
}

TEST(Encoder, VariableLimits) {
  auto inst = implication_swap();
  EncoderOptions opts;
  opts.max_tree_vars = 1;
  EXPECT_FALSE(run(inst, opts).sat);
  opts.max_tree_vars = 2;
  opts.max_node_vars = 0;
  auto o = run(inst, opts);
  ASSERT_TRUE(o.sat);
  EXPECT_EQ(o.decoded.rules.rules[0].body.label(), PatternLabel::constant("imp"));
}

TEST(Encoder, PerPairAlphabet) {
  auto inst = make({{T("a(b,a(c,b))"), T("a(a(b,c),b)")}, {T("f(g,h)"), T("f(h,g)")}}, 1, 2);
  EncoderOptions opts;
  opts.per_pair_alphabet = true;
  EXPECT_TRUE(run(inst, opts).sat);
}

TEST(Instance, JsonRoundTrip) {
  auto inst = implication_swap();
  inst.steps = 2;
  inst.rules = 3;
  inst.ratio = 0.5;
  auto back = parse_instance(serialize_instance(inst));
  EXPECT_EQ(back.steps, 2);
  EXPECT_EQ(back.rules, 3);
  EXPECT_DOUBLE_EQ(back.ratio, 0.5);
  ASSERT_EQ(back.pairs.size(), 2u);
  EXPECT_EQ(back.pairs[1].second, inst.pairs[1].second);
  EXPECT_EQ(back.required_pairs(), 1);
  EXPECT_THROW(parse_instance("{\"pairs\": 3}"), std::invalid_argument);
  EXPECT_THROW(parse_instance("[1,"), std::invalid_argument);
  inst.ratio = 0.0;
  EXPECT_THROW(validate_instance(inst), std::invalid_argument);
}

}  // namespace
}  // namespace tpt
