// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tpt {

using Position = std::vector<int>;

std::string position_to_string(const Position& p);
Position parse_position(std::string_view text);
bool is_prefix(const Position& prefix, const Position& p);
Position concat(const Position& a, const Position& b);

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& msg, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }

private:
  int line_;
  int column_;
};

struct TreeNode {
  std::string label;
  std::vector<std::shared_ptr<const TreeNode>> kids;
  std::uint64_t hash = 0;
  int size = 1;
  int height = 0;
};

using NodePtr = std::shared_ptr<const TreeNode>;

// Immutable labelled ordered tree; copies share structure.
class Tree {
public:
  Tree();
  explicit Tree(std::string label, std::vector<Tree> children = {});

  const std::string& label() const { return node_->label; }
  int degree() const { return static_cast<int>(node_->kids.size()); }
  Tree child(int i) const;
  std::vector<Tree> children() const;
  int size() const { return node_->size; }
  int height() const { return node_->height; }
  std::uint64_t hash() const { return node_->hash; }
  const NodePtr& node() const { return node_; }

  bool contains(const Position& p) const;
  const TreeNode* find(const Position& p) const;
  const std::string& label_at(const Position& p) const;
  std::vector<Position> positions() const;  // pre-order
  int max_degree() const;

  friend bool operator==(const Tree& a, const Tree& b);
  friend bool operator!=(const Tree& a, const Tree& b) { return !(a == b); }

  static Tree from_node(NodePtr n);

private:
  NodePtr node_;
};

struct TreeHash {
  std::size_t operator()(const Tree& t) const { return static_cast<std::size_t>(t.hash()); }
};

struct Context {
  Tree tree;
  Position hole;
};

Tree parse_tree(std::string_view text);
std::string serialize_tree(const Tree& t);
std::string quote_label(const std::string& label);

Tree subtree(const Tree& t, const Position& v);
bool is_isomorphic(const Tree& a, const Tree& b);
Context context(const Tree& t, const Position& hole);
Tree plug(const Context& ctx, const Tree& t);
bool contexts_isomorphic(const Tree& t1, const Position& v1, const Tree& t2, const Position& v2);

std::uint64_t mix_hash(std::uint64_t h, std::uint64_t v);
std::uint64_t label_hash(const std::string& s);

}  // namespace tpt
