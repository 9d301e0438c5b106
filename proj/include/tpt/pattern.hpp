// SPDX-License-Identifier: MIT
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tpt/lexer.hpp"
#include "tpt/tree.hpp"

namespace tpt {

struct PatternLabel {
  enum class Kind { Const, NodeVar, TreeVar, IntervalVar };
  Kind kind = Kind::Const;
  std::string name;

  static PatternLabel constant(std::string s) { return {Kind::Const, std::move(s)}; }
  static PatternLabel node_var(std::string s) { return {Kind::NodeVar, std::move(s)}; }
  static PatternLabel tree_var(std::string s) { return {Kind::TreeVar, std::move(s)}; }
  static PatternLabel interval_var(std::string s) { return {Kind::IntervalVar, std::move(s)}; }

  bool is_var() const { return kind != Kind::Const; }
  std::string to_string() const;
  friend bool operator==(const PatternLabel& a, const PatternLabel& b) {
    return a.kind == b.kind && a.name == b.name;
  }
  friend bool operator<(const PatternLabel& a, const PatternLabel& b) {
    return a.kind != b.kind ? a.kind < b.kind : a.name < b.name;
  }
};

struct PatternNode {
  PatternLabel label;
  std::vector<std::shared_ptr<const PatternNode>> kids;
};

using PNodePtr = std::shared_ptr<const PatternNode>;

// Tree pattern; tree and interval variables must be leaves.
class Pattern {
public:
  Pattern();
  Pattern(PatternLabel label, std::vector<Pattern> children = {});
  static Pattern from_tree(const Tree& t);

  const PatternLabel& label() const { return node_->label; }
  int degree() const { return static_cast<int>(node_->kids.size()); }
  Pattern child(int i) const;
  std::vector<Pattern> children() const;
  const PNodePtr& node() const { return node_; }

  int size() const;
  bool contains(const Position& p) const;
  const PatternNode* find(const Position& p) const;
  std::vector<Position> positions() const;  // pre-order
  bool has_interval_vars() const;
  // Distinct variables in pre-order of first occurrence.
  std::vector<PatternLabel> variables() const;

  friend bool operator==(const Pattern& a, const Pattern& b);
  static Pattern from_node(PNodePtr n);

private:
  PNodePtr node_;
};

struct Match {
  Position root_image;
  std::vector<std::pair<Position, Position>> map;  // pattern position -> tree position, pre-order
};

struct Binding {
  std::map<std::string, std::string> nodes;
  std::map<std::string, Tree> trees;
  std::map<std::string, std::vector<Tree>> intervals;
  bool empty() const { return nodes.empty() && trees.empty() && intervals.empty(); }
};

Pattern parse_pattern(std::string_view text, bool allow_intervals = false);
std::string serialize_pattern(const Pattern& p);

std::optional<Match> match_at(const Pattern& p, const Tree& t, const Position& v);
std::vector<Match> all_matches(const Pattern& p, const Tree& t);
Binding binding_of(const Match& m, const Pattern& p, const Tree& t);
// Match and binding in one pass; the fast path used by application.
std::optional<Binding> match_binding(const Pattern& p, const NodePtr& t);

namespace detail {
Pattern parse_pattern_node(Lexer& lx, bool allow_intervals);
}

}  // namespace tpt
