// SPDX-License-Identifier: MIT
#pragma once

#include <algorithm>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "tpt/transform.hpp"
#include "tpt/tree.hpp"

namespace tpt::testutil {

inline Tree random_tree(std::mt19937_64& rng, int max_nodes, const std::vector<std::string>& alphabet,
                        int max_degree = 3) {
  std::uniform_int_distribution<int> lab(0, static_cast<int>(alphabet.size()) - 1);
  int budget = std::uniform_int_distribution<int>(1, max_nodes)(rng);
  // Build top-down, spending the node budget breadth-first.
  struct Proto {
    std::string label;
    std::vector<int> kids;
  };
  std::vector<Proto> protos{{alphabet[lab(rng)], {}}};
  std::vector<int> open{0};
  int used = 1;
  while (used < budget && !open.empty()) {
    int pick = std::uniform_int_distribution<int>(0, static_cast<int>(open.size()) - 1)(rng);
    int id = open[pick];
    int room = std::min(max_degree - static_cast<int>(protos[id].kids.size()), budget - used);
    if (room <= 0) {
      open.erase(open.begin() + pick);
      continue;
    }
    int k = std::uniform_int_distribution<int>(1, room)(rng);
    for (int i = 0; i < k; ++i) {
      protos.push_back({alphabet[lab(rng)], {}});
      protos[id].kids.push_back(static_cast<int>(protos.size()) - 1);
      open.push_back(static_cast<int>(protos.size()) - 1);
      ++used;
    }
    open.erase(std::find(open.begin(), open.end(), id));
  }
  std::function<Tree(int)> build = [&](int id) {
    std::vector<Tree> kids;
    for (int k : protos[id].kids) kids.push_back(build(k));
    return Tree(protos[id].label, std::move(kids));
  };
  return build(0);
}

// A random rule with distinct variables; its body has at most max_nodes nodes.
inline Transformation random_rule(std::mt19937_64& rng, int max_nodes, const std::vector<std::string>& alphabet) {
  Tree shape = random_tree(rng, max_nodes, alphabet, 2);
  int nx = 0, ny = 0;
  std::vector<PatternLabel> vars;
  std::function<Pattern(const Tree&)> body = [&](const Tree& t) {
    int roll = static_cast<int>(rng() % 3);
    if (t.degree() == 0 && roll == 0) {
      vars.push_back(PatternLabel::tree_var("Y" + std::to_string(++ny)));
      return Pattern(vars.back());
    }
    std::vector<Pattern> kids;
    for (const auto& c : t.children()) kids.push_back(body(c));
    if (roll == 1) return Pattern(PatternLabel::constant(t.label()), std::move(kids));
    vars.push_back(PatternLabel::node_var("x" + std::to_string(++nx)));
    return Pattern(vars.back(), std::move(kids));
  };
  Pattern b = body(shape);
  std::function<Pattern(int)> head = [&](int depth) {
    std::uniform_int_distribution<int> pick(0, static_cast<int>(vars.size() + alphabet.size()) - 1);
    int k = pick(rng);
    PatternLabel l = k < static_cast<int>(vars.size()) ? vars[k] : PatternLabel::constant(alphabet[k - vars.size()]);
    std::vector<Pattern> kids;
    if (l.kind != PatternLabel::Kind::TreeVar && depth < 2) {
      int deg = static_cast<int>(rng() % 3);
      for (int i = 0; i < deg; ++i) kids.push_back(head(depth + 1));
    }
    return Pattern(l, std::move(kids));
  };
  return Transformation{"rho", b, head(0)};
}

// A tree matched by the body at the root, with random values for the variables.
inline Tree instantiate_body(std::mt19937_64& rng, const Pattern& body, const std::vector<std::string>& alphabet) {
  Binding b;
  std::function<void(const Pattern&)> fill = [&](const Pattern& p) {
    const auto& l = p.label();
    if (l.kind == PatternLabel::Kind::NodeVar && !b.nodes.count(l.name))
      b.nodes[l.name] = alphabet[rng() % alphabet.size()];
    if (l.kind == PatternLabel::Kind::TreeVar && !b.trees.count(l.name))
      b.trees.emplace(l.name, random_tree(rng, 3, alphabet, 2));
    for (const auto& c : p.children()) fill(c);
  };
  fill(body);
  return instantiate(body, b);
}

}  // namespace tpt::testutil
