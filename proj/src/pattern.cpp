// SPDX-License-Identifier: MIT
#include "tpt/pattern.hpp"

#include <functional>
#include <set>

namespace tpt {

std::string PatternLabel::to_string() const {
  switch (kind) {
    case Kind::Const: return quote_label(name);
    case Kind::NodeVar: return "?" + name;
    case Kind::TreeVar: return "$" + name;
    case Kind::IntervalVar: return "@" + name;
  }
  return name;
}

namespace {

PNodePtr make_pnode(PatternLabel label, std::vector<PNodePtr> kids) {
  if (label.name.empty()) throw std::invalid_argument("pattern labels must be non-empty");
  if ((label.kind == PatternLabel::Kind::TreeVar || label.kind == PatternLabel::Kind::IntervalVar) &&
      !kids.empty())
    throw std::invalid_argument("variable " + label.to_string() + " must be a leaf");
  auto n = std::make_shared<PatternNode>();
  n->label = std::move(label);
  n->kids = std::move(kids);
  return n;
}

bool pnodes_equal(const PatternNode* a, const PatternNode* b) {
  if (a == b) return true;
  if (!(a->label == b->label) || a->kids.size() != b->kids.size()) return false;
  for (std::size_t i = 0; i < a->kids.size(); ++i)
    if (!pnodes_equal(a->kids[i].get(), b->kids[i].get())) return false;
  return true;
}

void serialize_pnode(const PatternNode* n, std::string& out) {
  out += n->label.to_string();
  if (n->kids.empty()) return;
  out.push_back('(');
  for (std::size_t i = 0; i < n->kids.size(); ++i) {
    if (i) out.push_back(',');
    serialize_pnode(n->kids[i].get(), out);
  }
  out.push_back(')');
}

struct Matcher {
  Binding b;
  bool run(const PatternNode* p, const NodePtr& t) {
    switch (p->label.kind) {
      case PatternLabel::Kind::TreeVar: {
        auto [it, fresh] = b.trees.try_emplace(p->label.name, Tree::from_node(t));
        return fresh || it->second == Tree::from_node(t);
      }
      case PatternLabel::Kind::IntervalVar:
        throw std::invalid_argument("interval variables need the interval matcher");
      case PatternLabel::Kind::NodeVar: {
        auto [it, fresh] = b.nodes.try_emplace(p->label.name, t->label);
        if (!fresh && it->second != t->label) return false;
        break;
      }
      case PatternLabel::Kind::Const:
        if (p->label.name != t->label) return false;
        break;
    }
    if (p->kids.size() != t->kids.size()) return false;
    for (std::size_t i = 0; i < p->kids.size(); ++i)
      if (!run(p->kids[i].get(), t->kids[i])) return false;
    return true;
  }
};

}  // namespace

Pattern::Pattern() : node_(make_pnode(PatternLabel::constant("_"), {})) {}

Pattern::Pattern(PatternLabel label, std::vector<Pattern> children) {
  std::vector<PNodePtr> kids;
  for (auto& c : children) kids.push_back(c.node_);
  node_ = make_pnode(std::move(label), std::move(kids));
}

Pattern Pattern::from_node(PNodePtr n) {
  Pattern p;
  p.node_ = std::move(n);
  return p;
}

Pattern Pattern::from_tree(const Tree& t) {
  std::vector<Pattern> kids;
  for (const auto& c : t.children()) kids.push_back(from_tree(c));
  return Pattern(PatternLabel::constant(t.label()), std::move(kids));
}

Pattern Pattern::child(int i) const { return from_node(node_->kids.at(i)); }

std::vector<Pattern> Pattern::children() const {
  std::vector<Pattern> out;
  for (const auto& k : node_->kids) out.push_back(from_node(k));
  return out;
}

int Pattern::size() const {
  std::function<int(const PatternNode*)> rec = [&](const PatternNode* n) {
    int s = 1;
    for (const auto& k : n->kids) s += rec(k.get());
    return s;
  };
  return rec(node_.get());
}

const PatternNode* Pattern::find(const Position& p) const {
  const PatternNode* n = node_.get();
  for (int i : p) {
    if (i < 0 || i >= static_cast<int>(n->kids.size())) return nullptr;
    n = n->kids[i].get();
  }
  return n;
}

bool Pattern::contains(const Position& p) const { return find(p) != nullptr; }

std::vector<Position> Pattern::positions() const {
  std::vector<Position> out;
  Position cur;
  std::function<void(const PatternNode*)> rec = [&](const PatternNode* n) {
    out.push_back(cur);
    for (std::size_t i = 0; i < n->kids.size(); ++i) {
      cur.push_back(static_cast<int>(i));
      rec(n->kids[i].get());
      cur.pop_back();
    }
  };
  rec(node_.get());
  return out;
}

bool Pattern::has_interval_vars() const {
  std::function<bool(const PatternNode*)> rec = [&](const PatternNode* n) {
    if (n->label.kind == PatternLabel::Kind::IntervalVar) return true;
    for (const auto& k : n->kids)
      if (rec(k.get())) return true;
    return false;
  };
  return rec(node_.get());
}

std::vector<PatternLabel> Pattern::variables() const {
  std::vector<PatternLabel> out;
  std::set<PatternLabel> seen;
  std::function<void(const PatternNode*)> rec = [&](const PatternNode* n) {
    if (n->label.is_var() && seen.insert(n->label).second) out.push_back(n->label);
    for (const auto& k : n->kids) rec(k.get());
  };
  rec(node_.get());
  return out;
}

bool operator==(const Pattern& a, const Pattern& b) { return pnodes_equal(a.node_.get(), b.node_.get()); }

namespace detail {

Pattern parse_pattern_node(Lexer& lx, bool allow_intervals) {
  char c = lx.peek();
  PatternLabel label;
  if (c == '?' || c == '$' || c == '@') {
    lx.accept(c);
    if (c == '@' && !allow_intervals) lx.fail("interval variables are not allowed here");
    std::string name = lx.bare_run();
    if (name.empty()) lx.fail(std::string("malformed variable after sigil '") + c + "'");
    label.kind = c == '?' ? PatternLabel::Kind::NodeVar
                 : c == '$' ? PatternLabel::Kind::TreeVar
                            : PatternLabel::Kind::IntervalVar;
    label.name = std::move(name);
  } else {
    bool quoted = false;
    label = PatternLabel::constant(lx.label(quoted));
  }
  std::vector<Pattern> kids;
  if (lx.accept('(')) {
    if (label.kind == PatternLabel::Kind::TreeVar || label.kind == PatternLabel::Kind::IntervalVar)
      lx.fail("variable " + label.to_string() + " must be a leaf");
    do {
      kids.push_back(parse_pattern_node(lx, allow_intervals));
    } while (lx.accept(','));
    lx.expect(')');
  }
  return Pattern(std::move(label), std::move(kids));
}

}  // namespace detail

Pattern parse_pattern(std::string_view text, bool allow_intervals) {
  detail::Lexer lx(text);
  Pattern p = detail::parse_pattern_node(lx, allow_intervals);
  if (!lx.at_end()) lx.fail("trailing input after pattern");
  return p;
}

std::string serialize_pattern(const Pattern& p) {
  std::string out;
  serialize_pnode(p.node().get(), out);
  return out;
}

std::optional<Binding> match_binding(const Pattern& p, const NodePtr& t) {
  Matcher m;
  if (!m.run(p.node().get(), t)) return std::nullopt;
  return std::move(m.b);
}

std::optional<Match> match_at(const Pattern& p, const Tree& t, const Position& v) {
  const TreeNode* n = t.find(v);
  if (!n) throw std::out_of_range("unknown position " + position_to_string(v));
  if (!match_binding(p, subtree(t, v).node())) return std::nullopt;
  Match m;
  m.root_image = v;
  for (const auto& w : p.positions()) m.map.emplace_back(w, concat(v, w));
  return m;
}

std::vector<Match> all_matches(const Pattern& p, const Tree& t) {
  std::vector<Match> out;
  for (const auto& v : t.positions())
    if (auto m = match_at(p, t, v)) out.push_back(std::move(*m));
  return out;
}

Binding binding_of(const Match& m, const Pattern& p, const Tree& t) {
  auto b = match_binding(p, subtree(t, m.root_image).node());
  if (!b) throw std::invalid_argument("not a match of the pattern");
  return std::move(*b);
}

}  // namespace tpt
