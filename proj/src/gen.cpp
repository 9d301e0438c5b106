// SPDX-License-Identifier: MIT
#include "tpt/gen.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace tpt {

namespace {

int parse_int(std::string_view s) {
  std::size_t used = 0;
  int v = std::stoi(std::string(s), &used);
  if (used != s.size()) throw std::invalid_argument("bad integer '" + std::string(s) + "'");
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Full binary tree of depth l; leaf(i) gives the subtree at the i-th leaf (0-based).
Tree full_tree(int l, const std::function<Tree(int)>& leaf, const std::string& inner, int first = 0) {
  if (l == 0) return leaf(first);
  int half = 1 << (l - 1);
  return Tree(inner, {full_tree(l - 1, leaf, inner, first), full_tree(l - 1, leaf, inner, first + half)});
}

Pattern full_pattern(int l, const std::function<Pattern(int)>& leaf, int first = 0) {
  if (l == 0) return leaf(first);
  int half = 1 << (l - 1);
  return Pattern(PatternLabel::constant("b"), {full_pattern(l - 1, leaf, first), full_pattern(l - 1, leaf, first + half)});
}

std::string edge_label(int u, int v) { return "l_" + std::to_string(u) + "_" + std::to_string(v); }

std::pair<int, int> ordered(std::pair<int, int> e) {
  return e.first < e.second ? e : std::pair<int, int>{e.second, e.first};
}

LearningInstance vertex_cover_instance(const Graph& g, int k, bool binary) {
  validate_graph(g);
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  int l = leaf_depth(g.n);
  LearningInstance inst;
  inst.steps = 1;
  inst.rules = k;
  for (auto e : g.edges) {
    auto [u, v] = ordered(e);
    Tree mark = binary ? full_tree(l, [&](int i) { return Tree(i + 1 == u || i + 1 == v ? "a" : "b"); }, "b")
                       : Tree(edge_label(u, v));
    Tree src = full_tree(l, [&](int i) { return i + 1 == u || i + 1 == v ? mark : Tree("b"); }, "b");
    inst.pairs.emplace_back(src, mark);
  }
  return inst;
}

std::string var_label(char c, int var, int clause) {
  return std::string(1, c) + std::to_string(var) + "_" + std::to_string(clause);
}

}  // namespace

Graph parse_edges(std::string_view text, int n) {
  Graph g;
  int top = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find_first_of(",;", start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view item = trim(text.substr(start, end - start));
    if (!item.empty()) {
      std::size_t dash = item.find('-');
      if (dash == std::string_view::npos) throw std::invalid_argument("edge '" + std::string(item) + "' lacks '-'");
      int u = parse_int(trim(item.substr(0, dash)));
      int v = parse_int(trim(item.substr(dash + 1)));
      g.edges.emplace_back(u, v);
      top = std::max({top, u, v});
    }
    start = end + 1;
  }
  g.n = n > 0 ? n : top;
  validate_graph(g);
  return g;
}

void validate_graph(const Graph& g) {
  if (g.n < 1) throw std::invalid_argument("graph needs at least one vertex");
  std::set<std::pair<int, int>> seen;
  for (auto e : g.edges) {
    auto [u, v] = ordered(e);
    if (u < 1 || v > g.n) throw std::invalid_argument("vertex outside 1.." + std::to_string(g.n));
    if (u == v) throw std::invalid_argument("self-loop at " + std::to_string(u));
    if (!seen.insert({u, v}).second)
      throw std::invalid_argument("duplicate edge " + std::to_string(u) + "-" + std::to_string(v));
  }
}

bool has_vertex_cover(const Graph& g, int k) {
  if (g.n > 30) throw std::invalid_argument("vertex cover check limited to 30 vertices");
  for (std::uint32_t s = 0; s < (1u << g.n); ++s) {
    if (std::popcount(s) > k) continue;
    bool ok = std::all_of(g.edges.begin(), g.edges.end(), [&](auto e) {
      return ((s >> (e.first - 1)) & 1u) || ((s >> (e.second - 1)) & 1u);
    });
    if (ok) return true;
  }
  return false;
}

int leaf_depth(int n) {
  int l = 0;
  while ((1 << l) < n) ++l;
  return l;
}

LearningInstance gen_vertex_cover(const Graph& g, int k) { return vertex_cover_instance(g, k, false); }

LearningInstance gen_vertex_cover_binary(const Graph& g, int k) { return vertex_cover_instance(g, k, true); }

RuleSet vertex_cover_rules(const Graph& g, const std::vector<int>& cover, bool binary) {
  validate_graph(g);
  int l = leaf_depth(g.n);
  std::vector<Transformation> rules;
  for (int c : cover) {
    if (c < 1 || c > g.n) throw std::invalid_argument("cover vertex outside 1.." + std::to_string(g.n));
    auto var = [&](int i) {
      std::string idx = std::to_string(i);
      return binary ? PatternLabel::tree_var("Y" + idx) : PatternLabel::node_var("x" + idx);
    };
    Pattern body = full_pattern(l, [&](int i) {
      return i < g.n ? Pattern(var(i + 1)) : Pattern(PatternLabel::constant("b"));
    });
    rules.push_back(make_transformation("rho" + std::to_string(c), body, Pattern(var(c))));
  }
  return make_rule_set(std::move(rules));
}

Cnf3 parse_cnf3(std::string_view text) {
  Cnf3 f;
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<int> cur;
  bool header = false;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok) || tok == "c" || tok == "%") continue;
    if (tok == "p") {
      std::string fmt;
      int m = 0;
      if (!(ls >> fmt >> f.n >> m) || fmt != "cnf") throw std::invalid_argument("bad DIMACS header");
      header = true;
      continue;
    }
    if (!header) throw std::invalid_argument("clause before the DIMACS header");
    do {
      int lit = parse_int(tok);
      if (lit != 0) {
        cur.push_back(lit);
        continue;
      }
      if (cur.size() != 3) throw std::invalid_argument("clause with " + std::to_string(cur.size()) + " literals");
      f.clauses.push_back({Literal{std::abs(cur[0]), cur[0] > 0}, Literal{std::abs(cur[1]), cur[1] > 0},
                           Literal{std::abs(cur[2]), cur[2] > 0}});
      cur.clear();
    } while (ls >> tok);
  }
  if (!header) throw std::invalid_argument("missing DIMACS header");
  if (!cur.empty()) throw std::invalid_argument("unterminated clause");
  validate_cnf3(f);
  return f;
}

void validate_cnf3(const Cnf3& f) {
  if (f.n < 1) throw std::invalid_argument("formula needs at least one variable");
  for (const auto& c : f.clauses) {
    for (int i = 0; i < 3; ++i) {
      if (c[i].var < 1 || c[i].var > f.n) throw std::invalid_argument("variable outside 1.." + std::to_string(f.n));
      for (int j = 0; j < i; ++j)
        if (c[i].var == c[j].var)
          throw std::invalid_argument("variable " + std::to_string(c[i].var) + " repeated in a clause");
    }
  }
}

bool evaluate(const Cnf3& f, const std::vector<bool>& alpha) {
  return std::all_of(f.clauses.begin(), f.clauses.end(), [&](const auto& c) {
    return std::any_of(c.begin(), c.end(), [&](const Literal& l) { return alpha[l.var - 1] == l.positive; });
  });
}

bool is_satisfiable(const Cnf3& f) {
  if (f.n > 24) throw std::invalid_argument("satisfiability check limited to 24 variables");
  std::vector<bool> alpha(f.n);
  for (std::uint32_t s = 0; s < (1u << f.n); ++s) {
    for (int i = 0; i < f.n; ++i) alpha[i] = (s >> i) & 1u;
    if (evaluate(f, alpha)) return true;
  }
  return false;
}

LearningInstance gen_3sat(const Cnf3& f) {
  validate_cnf3(f);
  if (f.n < 4) throw std::invalid_argument("the construction needs at least 4 variables");
  LearningInstance inst;
  inst.steps = 3;
  inst.rules = 2;
  for (std::size_t ci = 0; ci < f.clauses.size(); ++ci) {
    int j = static_cast<int>(ci) + 1;
    std::vector<int> sign(f.n + 1, 0);
    for (const auto& l : f.clauses[ci]) sign[l.var] = l.positive ? 1 : -1;
    auto var_pair = [&](int i) {
      Tree a(var_label('a', i, j));
      Tree b(var_label('b', i, j));
      if (sign[i] == 0) return std::pair{Tree("d", {a, a}), Tree("e", {a, a})};
      Tree src = sign[i] > 0 ? Tree("d", {a, b}) : Tree("d", {b, a});
      return std::pair{src, Tree("e", {a, b})};
    };
    Tree src("d", {Tree("a"), var_pair(f.n).first});
    for (int i = f.n - 1; i >= 1; --i) src = Tree("d", {src, var_pair(i).first});
    Tree dst("e", {var_pair(f.n).second, var_pair(f.n - 1).second});
    for (int i = f.n - 2; i >= 1; --i) dst = Tree("e", {dst, var_pair(i).second});
    inst.pairs.emplace_back(src, dst);
  }
  inst.pairs.emplace_back(Tree("h1", {Tree("h2"), Tree("h3")}), Tree("h1", {Tree("h3"), Tree("h2")}));
  inst.pairs.emplace_back(Tree("h4", {Tree("h5"), Tree("h6")}), Tree("h4", {Tree("h6"), Tree("h5")}));
  return inst;
}

RuleSet three_sat_rules(const Cnf3& f, const std::vector<bool>& alpha) {
  validate_cnf3(f);
  if (f.n < 4) throw std::invalid_argument("the construction needs at least 4 variables");
  if (static_cast<int>(alpha.size()) != f.n) throw std::invalid_argument("assignment size differs from n");
  auto x = [](int i) { return Pattern(PatternLabel::node_var("x" + std::to_string(i))); };
  auto y = [](int i) { return Pattern(PatternLabel::node_var("y" + std::to_string(i))); };
  auto d = [](std::vector<Pattern> k) { return Pattern(PatternLabel::constant("d"), std::move(k)); };
  auto e = [](std::vector<Pattern> k) { return Pattern(PatternLabel::constant("e"), std::move(k)); };
  auto head_leaf = [&](int i) { return alpha[i - 1] ? e({x(i), y(i)}) : e({y(i), x(i)}); };
  Pattern body = d({Pattern(PatternLabel::constant("a")), d({x(f.n), y(f.n)})});
  for (int i = f.n - 1; i >= 1; --i) body = d({body, d({x(i), y(i)})});
  Pattern head = e({head_leaf(f.n), head_leaf(f.n - 1)});
  for (int i = f.n - 2; i >= 1; --i) head = e({head, head_leaf(i)});
  Pattern swap_body(PatternLabel::node_var("x"), {Pattern(PatternLabel::node_var("y")), Pattern(PatternLabel::node_var("z"))});
  Pattern swap_head(PatternLabel::node_var("x"), {Pattern(PatternLabel::node_var("z")), Pattern(PatternLabel::node_var("y"))});
  return make_rule_set({make_transformation("rho_alpha", body, head), make_transformation("rho_swap", swap_body, swap_head)});
}

std::uint64_t SplitMix64::operator()() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t SplitMix64::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("empty range");
  std::uint64_t limit = max() - max() % n;
  for (;;) {
    std::uint64_t v = (*this)();
    if (v < limit) return v % n;
  }
}

Tree random_tree(SplitMix64& rng, int nodes, const std::vector<std::string>& alphabet, int max_degree) {
  if (alphabet.empty()) throw std::invalid_argument("empty alphabet");
  nodes = std::max(nodes, 1);
  std::vector<std::string> label(nodes);
  std::vector<std::vector<int>> kids(nodes);
  for (int i = 0; i < nodes; ++i) label[i] = alphabet[rng.below(alphabet.size())];
  for (int i = 1; i < nodes; ++i) {
    std::vector<int> open;
    for (int p = 0; p < i; ++p)
      if (static_cast<int>(kids[p].size()) < max_degree) open.push_back(p);
    if (open.empty()) throw std::invalid_argument("max_degree must be positive for trees with several nodes");
    kids[open[rng.below(open.size())]].push_back(i);
  }
  std::function<Tree(int)> build = [&](int i) {
    std::vector<Tree> ch;
    for (int c : kids[i]) ch.push_back(build(c));
    return Tree(label[i], std::move(ch));
  };
  return build(0);
}

Generated gen_random(const RandomOptions& opts) {
  if (opts.pool.rules.empty()) throw std::invalid_argument("rule pool is empty");
  if (opts.noise < 0 || opts.noise > 1) throw std::invalid_argument("noise must lie in [0, 1]");
  SplitMix64 rng(opts.seed);
  Generated out;
  out.planted = opts.pool;
  out.instance.steps = std::max(opts.steps, 1);
  out.instance.rules = static_cast<int>(opts.pool.rules.size());
  const auto& pool = opts.pool.rules;

  auto sample_instance = [&](const Pattern& body) {
    Binding b;
    std::function<void(const Pattern&)> fill = [&](const Pattern& p) {
      const auto& l = p.label();
      if (l.kind == PatternLabel::Kind::NodeVar && !b.nodes.count(l.name))
        b.nodes[l.name] = opts.alphabet[rng.below(opts.alphabet.size())];
      if (l.kind == PatternLabel::Kind::TreeVar && !b.trees.count(l.name))
        b.trees.emplace(l.name, random_tree(rng, 1 + static_cast<int>(rng.below(3)), opts.alphabet, opts.max_degree));
      if (l.kind == PatternLabel::Kind::IntervalVar) throw std::invalid_argument("interval variables are not supported");
      for (const auto& c : p.children()) fill(c);
    };
    fill(body);
    return instantiate(body, b);
  };

  for (int n = 0; n < opts.n_pairs; ++n) {
    const auto& first = pool[rng.below(pool.size())];
    std::optional<Tree> src;
    for (int attempt = 0; attempt < std::max(opts.retries, 1) && !src; ++attempt) {
      int ctx_nodes = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(std::max(opts.max_context_nodes, 1))));
      Tree host = random_tree(rng, ctx_nodes, opts.alphabet, opts.max_degree);
      auto positions = host.positions();
      Position hole = positions[rng.below(positions.size())];
      Tree t = plug(context(host, hole), sample_instance(first.body));
      if (!apply_all(first, t).empty()) src = t;
    }
    if (!src) throw std::runtime_error("rule " + first.name + " did not apply to any sampled tree");
    Tree cur = *src;
    int steps = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(out.instance.steps)));
    for (int s = 0; s < steps; ++s) {
      const Transformation& rho = s == 0 ? first : pool[rng.below(pool.size())];
      auto options = apply_all(rho, cur);
      if (options.empty()) break;
      cur = options[rng.below(options.size())].second;
    }
    out.instance.pairs.emplace_back(*src, cur);
  }

  int noisy = static_cast<int>(std::lround(opts.noise * opts.n_pairs));
  out.noisy.assign(out.instance.pairs.size(), false);
  std::vector<int> order(out.instance.pairs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  for (int i = 0; i < noisy; ++i) {
    int p = order[i];
    auto& [src, dst] = out.instance.pairs[p];
    dst = Tree("noise" + std::to_string(p), {dst, src});
    out.noisy[p] = true;
  }
  if (noisy > 0) out.instance.ratio = static_cast<double>(out.instance.pairs.size() - noisy) / out.instance.pairs.size();
  return out;
}

}  // namespace tpt
