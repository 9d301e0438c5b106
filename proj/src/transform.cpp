// SPDX-License-Identifier: MIT
#include "tpt/transform.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

namespace tpt {

Transformation make_transformation(std::string name, Pattern body, Pattern head) {
  if (body.has_interval_vars() || head.has_interval_vars())
    throw std::invalid_argument("interval variables belong to interval transformations");
  auto bv = body.variables();
  std::set<PatternLabel> have(bv.begin(), bv.end());
  for (const auto& v : head.variables())
    if (!have.count(v)) throw std::invalid_argument("head variable " + v.to_string() + " does not occur in the body");
  return Transformation{std::move(name), std::move(body), std::move(head)};
}

const Transformation* RuleSet::find(const std::string& name) const {
  for (const auto& r : rules)
    if (r.name == name) return &r;
  return nullptr;
}

RuleSet make_rule_set(std::vector<Transformation> rules) {
  std::set<std::string> names;
  for (const auto& r : rules)
    if (!names.insert(r.name).second) throw std::invalid_argument("duplicate rule name " + r.name);
  return RuleSet{std::move(rules)};
}

Tree instantiate(const Pattern& head, const Binding& b) {
  const auto& l = head.label();
  switch (l.kind) {
    case PatternLabel::Kind::TreeVar: {
      auto it = b.trees.find(l.name);
      if (it == b.trees.end()) throw std::invalid_argument("unbound tree variable $" + l.name);
      return it->second;
    }
    case PatternLabel::Kind::IntervalVar:
      throw std::invalid_argument("interval variables need the interval instantiation");
    case PatternLabel::Kind::NodeVar:
    case PatternLabel::Kind::Const: {
      std::string label = l.name;
      if (l.kind == PatternLabel::Kind::NodeVar) {
        auto it = b.nodes.find(l.name);
        if (it == b.nodes.end()) throw std::invalid_argument("unbound node variable ?" + l.name);
        label = it->second;
      }
      std::vector<Tree> kids;
      for (const auto& c : head.children()) kids.push_back(instantiate(c, b));
      return Tree(std::move(label), std::move(kids));
    }
  }
  throw std::logic_error("unreachable");
}

std::optional<Tree> apply_at(const Transformation& rho, const Tree& t, const Position& v) {
  Tree sub = subtree(t, v);
  auto b = match_binding(rho.body, sub.node());
  if (!b) return std::nullopt;
  return plug(context(t, v), instantiate(rho.head, *b));
}

std::vector<std::pair<Position, Tree>> apply_all(const Transformation& rho, const Tree& t) {
  std::vector<std::pair<Position, Tree>> out;
  for (const auto& v : t.positions())
    if (auto r = apply_at(rho, t, v)) out.emplace_back(v, std::move(*r));
  return out;
}

std::optional<Position> explains(const Transformation& rho, const Tree& t, const Tree& t_star) {
  for (const auto& v : t.positions()) {
    if (!t_star.contains(v) || !contexts_isomorphic(t, v, t_star, v)) continue;
    auto r = apply_at(rho, t, v);
    if (r && *r == t_star) return v;
  }
  return std::nullopt;
}

std::optional<ApplicationTrace> explains_in_steps(const RuleSet& gamma, const Tree& t, const Tree& t_star, int s,
                                                  const SearchLimits& limits) {
  if (s < 0) throw std::invalid_argument("step count must be non-negative");
  if (t == t_star) return ApplicationTrace{};
  struct Entry {
    Tree tree;
    int parent;
    TraceStep step;
  };
  std::vector<Entry> nodes;
  std::unordered_map<Tree, int, TreeHash> seen;
  nodes.push_back({t, -1, {}});
  seen.emplace(t, 0);
  const long long cap = static_cast<long long>(limits.size_factor) * std::max(t.size(), t_star.size());
  bool pruned = false;
  std::vector<int> frontier{0};
  auto rebuild = [&](int idx) {
    ApplicationTrace tr;
    for (int i = idx; nodes[i].parent >= 0; i = nodes[i].parent) tr.steps.push_back(nodes[i].step);
    std::reverse(tr.steps.begin(), tr.steps.end());
    return tr;
  };
  for (int depth = 1; depth <= s && !frontier.empty(); ++depth) {
    std::vector<int> next;
    for (int idx : frontier) {
      Tree cur = nodes[idx].tree;
      for (const auto& v : cur.positions()) {
        for (const auto& rho : gamma.rules) {
          auto r = apply_at(rho, cur, v);
          if (!r) continue;
          if (r->size() > cap) {
            pruned = true;
            continue;
          }
          if (seen.count(*r)) continue;
          int id = static_cast<int>(nodes.size());
          nodes.push_back({*r, idx, TraceStep{rho.name, v, *r}});
          seen.emplace(*r, id);
          if (*r == t_star) return rebuild(id);
          if (nodes.size() > limits.max_nodes)
            throw BudgetExceeded("multi-step search exceeded " + std::to_string(limits.max_nodes) + " nodes");
          next.push_back(id);
        }
      }
    }
    frontier = std::move(next);
  }
  if (pruned) throw BudgetExceeded("multi-step search pruned trees above the size cap");
  return std::nullopt;
}

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

// Index of the first occurrence of `needle` outside double quotes.
std::size_t find_unquoted(std::string_view s, std::string_view needle) {
  bool q = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (q) {
      if (s[i] == '\\') ++i;
      else if (s[i] == '"') q = false;
      continue;
    }
    if (s[i] == '"') {
      q = true;
      continue;
    }
    if (s.substr(i, needle.size()) == needle) return i;
  }
  return std::string_view::npos;
}

}  // namespace

Transformation parse_rule(std::string_view text, const std::string& default_name) {
  std::size_t arrow = find_unquoted(text, "~>");
  if (arrow == std::string_view::npos) throw ParseError("missing '~>' in rule", 1, static_cast<int>(text.size()) + 1);
  std::string name = default_name;
  std::string_view lhs = text.substr(0, arrow);
  std::size_t colon = find_unquoted(lhs, ":");
  if (colon != std::string_view::npos) {
    name = trim(lhs.substr(0, colon));
    if (name.empty()) throw ParseError("empty rule name", 1, 1);
    lhs = lhs.substr(colon + 1);
  }
  Pattern body = parse_pattern(lhs);
  Pattern head = parse_pattern(text.substr(arrow + 2));
  return make_transformation(std::move(name), std::move(body), std::move(head));
}

Transformation canonical_names(const Transformation& rho) {
  std::map<PatternLabel, PatternLabel> rename;
  int counts[4] = {0, 0, 0, 0};
  const char* prefix[4] = {"", "x", "Y", "Z"};
  for (const auto& v : rho.body.variables()) {
    int k = static_cast<int>(v.kind);
    rename.emplace(v, PatternLabel{v.kind, prefix[k] + std::to_string(++counts[k])});
  }
  std::function<Pattern(const Pattern&)> rec = [&](const Pattern& p) {
    std::vector<Pattern> kids;
    for (const auto& c : p.children()) kids.push_back(rec(c));
    auto it = rename.find(p.label());
    return Pattern(it == rename.end() ? p.label() : it->second, std::move(kids));
  };
  return Transformation{rho.name, rec(rho.body), rec(rho.head)};
}

std::string serialize_rule(const Transformation& rho) {
  return serialize_pattern(rho.body) + " ~> " + serialize_pattern(rho.head);
}

RuleSet parse_rule_file(std::string_view text) {
  std::vector<Transformation> rules;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = find_unquoted(line, "#");
    if (hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    try {
      rules.push_back(parse_rule(line, "rho" + std::to_string(rules.size() + 1)));
    } catch (const ParseError& e) {
      throw ParseError(std::string("rule file: ") + e.what(), lineno, e.column());
    }
  }
  return make_rule_set(std::move(rules));
}

std::string serialize_rule_file(const RuleSet& gamma) {
  std::string out;
  for (const auto& r : gamma.rules) out += quote_label(r.name) + ": " + serialize_rule(r) + "\n";
  return out;
}

bool semantic_check(const Transformation& rho, const Tree& t, const Tree& t_star, const Position& v) {
  if (!t.contains(v) || !t_star.contains(v)) return false;
  if (!contexts_isomorphic(t, v, t_star, v)) return false;
  std::map<std::string, std::string> nodes;
  std::map<std::string, Tree> trees;
  for (const auto& w : rho.body.positions()) {
    Position tw = concat(v, w);
    const TreeNode* n = t.find(tw);
    if (!n) return false;
    const PatternNode* p = rho.body.find(w);
    switch (p->label.kind) {
      case PatternLabel::Kind::Const:
        if (n->label != p->label.name) return false;
        break;
      case PatternLabel::Kind::NodeVar: {
        auto [it, fresh] = nodes.emplace(p->label.name, n->label);
        if (!fresh && it->second != n->label) return false;
        break;
      }
      case PatternLabel::Kind::TreeVar: {
        Tree sub = subtree(t, tw);
        auto [it, fresh] = trees.emplace(p->label.name, sub);
        if (!fresh && !is_isomorphic(it->second, sub)) return false;
        continue;  // leaf of the pattern; children are captured
      }
      case PatternLabel::Kind::IntervalVar:
        return false;
    }
    if (n->kids.size() != p->kids.size()) return false;
  }
  for (const auto& w : rho.head.positions()) {
    Position tw = concat(v, w);
    const TreeNode* n = t_star.find(tw);
    if (!n) return false;
    const PatternNode* p = rho.head.find(w);
    switch (p->label.kind) {
      case PatternLabel::Kind::Const:
        if (n->label != p->label.name) return false;
        break;
      case PatternLabel::Kind::NodeVar: {
        auto it = nodes.find(p->label.name);
        if (it == nodes.end() || it->second != n->label) return false;
        break;
      }
      case PatternLabel::Kind::TreeVar: {
        auto it = trees.find(p->label.name);
        if (it == trees.end() || !is_isomorphic(it->second, subtree(t_star, tw))) return false;
        continue;
      }
      case PatternLabel::Kind::IntervalVar:
        return false;
    }
    if (n->kids.size() != p->kids.size()) return false;
  }
  return true;
}

bool verify_trace(const RuleSet& gamma, const Tree& t, const Tree& t_star, const ApplicationTrace& trace, int s) {
  if (static_cast<int>(trace.steps.size()) > s) return false;
  Tree cur = t;
  for (const auto& st : trace.steps) {
    const Transformation* rho = gamma.find(st.rule);
    if (!rho || !semantic_check(*rho, cur, st.result, st.at)) return false;
    cur = st.result;
  }
  return cur == t_star;
}

}  // namespace tpt
