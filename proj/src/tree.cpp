// SPDX-License-Identifier: MIT
#include "tpt/tree.hpp"

#include <algorithm>
#include <charconv>
#include <functional>

#include "tpt/lexer.hpp"

namespace tpt {

ParseError::ParseError(const std::string& msg, int line, int column)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
      line_(line),
      column_(column) {}

std::string position_to_string(const Position& p) {
  if (p.empty()) return "-";
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out.push_back('.');
    out += std::to_string(p[i]);
  }
  return out;
}

Position parse_position(std::string_view text) {
  Position p;
  if (text == "-" || text.empty()) return p;
  std::size_t i = 0;
  while (i <= text.size()) {
    std::size_t j = text.find('.', i);
    if (j == std::string_view::npos) j = text.size();
    int v = 0;
    auto part = text.substr(i, j - i);
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || ptr != part.data() + part.size() || v < 0 || part.empty())
      throw std::invalid_argument("malformed position '" + std::string(text) + "'");
    p.push_back(v);
    i = j + 1;
  }
  return p;
}

bool is_prefix(const Position& prefix, const Position& p) {
  return prefix.size() <= p.size() && std::equal(prefix.begin(), prefix.end(), p.begin());
}

Position concat(const Position& a, const Position& b) {
  Position r = a;
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

std::uint64_t mix_hash(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  h ^= h >> 31;
  h *= 0xbf58476d1ce4e5b9ULL;
  return h ^ (h >> 29);
}

std::uint64_t label_hash(const std::string& s) {
  // FNV-1a
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

NodePtr make_node(std::string label, std::vector<NodePtr> kids) {
  if (label.empty()) throw std::invalid_argument("tree labels must be non-empty");
  auto n = std::make_shared<TreeNode>();
  n->label = std::move(label);
  n->kids = std::move(kids);
  std::uint64_t h = mix_hash(label_hash(n->label), n->kids.size());
  for (const auto& k : n->kids) {
    h = mix_hash(h, k->hash);
    n->size += k->size;
    n->height = std::max(n->height, k->height + 1);
  }
  n->hash = h;
  return n;
}

bool nodes_equal(const TreeNode* a, const TreeNode* b) {
  if (a == b) return true;
  if (a->hash != b->hash || a->size != b->size || a->label != b->label || a->kids.size() != b->kids.size())
    return false;
  for (std::size_t i = 0; i < a->kids.size(); ++i)
    if (!nodes_equal(a->kids[i].get(), b->kids[i].get())) return false;
  return true;
}

NodePtr parse_node(detail::Lexer& lx) {
  bool quoted = false;
  std::string label = lx.label(quoted);
  std::vector<NodePtr> kids;
  if (lx.accept('(')) {
    do {
      kids.push_back(parse_node(lx));
    } while (lx.accept(','));
    lx.expect(')');
  }
  return make_node(std::move(label), std::move(kids));
}

void serialize_node(const TreeNode* n, std::string& out) {
  out += quote_label(n->label);
  if (n->kids.empty()) return;
  out.push_back('(');
  for (std::size_t i = 0; i < n->kids.size(); ++i) {
    if (i) out.push_back(',');
    serialize_node(n->kids[i].get(), out);
  }
  out.push_back(')');
}

NodePtr replace_at(const NodePtr& n, const Position& p, std::size_t depth, const NodePtr& repl) {
  if (depth == p.size()) return repl;
  std::vector<NodePtr> kids = n->kids;
  kids[p[depth]] = replace_at(n->kids[p[depth]], p, depth + 1, repl);
  return make_node(n->label, std::move(kids));
}

}  // namespace

Tree::Tree() : node_(make_node("_", {})) {}

Tree::Tree(std::string label, std::vector<Tree> children) {
  std::vector<NodePtr> kids;
  kids.reserve(children.size());
  for (auto& c : children) kids.push_back(c.node_);
  node_ = make_node(std::move(label), std::move(kids));
}

Tree Tree::from_node(NodePtr n) {
  Tree t;
  t.node_ = std::move(n);
  return t;
}

Tree Tree::child(int i) const { return from_node(node_->kids.at(i)); }

std::vector<Tree> Tree::children() const {
  std::vector<Tree> out;
  for (const auto& k : node_->kids) out.push_back(from_node(k));
  return out;
}

const TreeNode* Tree::find(const Position& p) const {
  const TreeNode* n = node_.get();
  for (int i : p) {
    if (i < 0 || i >= static_cast<int>(n->kids.size())) return nullptr;
    n = n->kids[i].get();
  }
  return n;
}

bool Tree::contains(const Position& p) const { return find(p) != nullptr; }

const std::string& Tree::label_at(const Position& p) const {
  const TreeNode* n = find(p);
  if (!n) throw std::out_of_range("unknown position " + position_to_string(p));
  return n->label;
}

std::vector<Position> Tree::positions() const {
  std::vector<Position> out;
  Position cur;
  std::function<void(const TreeNode*)> rec = [&](const TreeNode* n) {
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

int Tree::max_degree() const {
  int d = 0;
  std::function<void(const TreeNode*)> rec = [&](const TreeNode* n) {
    d = std::max(d, static_cast<int>(n->kids.size()));
    for (const auto& k : n->kids) rec(k.get());
  };
  rec(node_.get());
  return d;
}

bool operator==(const Tree& a, const Tree& b) { return nodes_equal(a.node_.get(), b.node_.get()); }

std::string quote_label(const std::string& label) {
  bool bare = !label.empty() && std::all_of(label.begin(), label.end(), detail::is_bare_char);
  if (bare) return label;
  std::string out = "\"";
  for (char c : label) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

Tree parse_tree(std::string_view text) {
  detail::Lexer lx(text);
  NodePtr n = parse_node(lx);
  if (!lx.at_end()) lx.fail("trailing input after tree");
  return Tree::from_node(std::move(n));
}

std::string serialize_tree(const Tree& t) {
  std::string out;
  serialize_node(t.node().get(), out);
  return out;
}

Tree subtree(const Tree& t, const Position& v) {
  const TreeNode* n = t.node().get();
  NodePtr cur = t.node();
  for (int i : v) {
    if (i < 0 || i >= static_cast<int>(n->kids.size()))
      throw std::out_of_range("unknown position " + position_to_string(v));
    cur = n->kids[i];
    n = cur.get();
  }
  return Tree::from_node(cur);
}

bool is_isomorphic(const Tree& a, const Tree& b) { return a == b; }

Context context(const Tree& t, const Position& hole) {
  if (!t.contains(hole)) throw std::out_of_range("unknown position " + position_to_string(hole));
  return Context{t, hole};
}

Tree plug(const Context& ctx, const Tree& t) {
  return Tree::from_node(replace_at(ctx.tree.node(), ctx.hole, 0, t.node()));
}

bool contexts_isomorphic(const Tree& t1, const Position& v1, const Tree& t2, const Position& v2) {
  if (!t1.contains(v1)) throw std::out_of_range("unknown position " + position_to_string(v1));
  if (!t2.contains(v2)) throw std::out_of_range("unknown position " + position_to_string(v2));
  if (v1 != v2) return false;
  // Walk the hole path; every sibling off the path must agree.
  const TreeNode* a = t1.node().get();
  const TreeNode* b = t2.node().get();
  for (int step : v1) {
    if (a->label != b->label || a->kids.size() != b->kids.size()) return false;
    for (std::size_t i = 0; i < a->kids.size(); ++i)
      if (static_cast<int>(i) != step && !nodes_equal(a->kids[i].get(), b->kids[i].get())) return false;
    a = a->kids[step].get();
    b = b->kids[step].get();
  }
  return true;
}

}  // namespace tpt
