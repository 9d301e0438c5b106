// SPDX-License-Identifier: MIT
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tpt/instance.hpp"
#include "tpt/transform.hpp"

namespace tpt {

// Undirected simple graph on vertices 1..n.
struct Graph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;
};

// Accepts "1-2,1-4,2-3"; n defaults to the largest vertex mentioned.
Graph parse_edges(std::string_view text, int n = 0);
// Throws std::invalid_argument on self-loops, duplicates or vertices outside 1..n.
void validate_graph(const Graph& g);
bool has_vertex_cover(const Graph& g, int k);

// Depth l of the full binary tree with at least n leaves.
int leaf_depth(int n);

// One pair per edge, s = 1, r = k.
LearningInstance gen_vertex_cover(const Graph& g, int k);
// Same with every edge label spelled out as a binary tree over {a, b}.
LearningInstance gen_vertex_cover_binary(const Graph& g, int k);
// One rule per cover vertex, returning the label of that leaf.
RuleSet vertex_cover_rules(const Graph& g, const std::vector<int>& cover, bool binary);

struct Literal {
  int var = 0;  // 1-based
  bool positive = true;
};

struct Cnf3 {
  int n = 0;
  std::vector<std::array<Literal, 3>> clauses;
};

// DIMACS input; every clause must have exactly three literals over distinct variables.
Cnf3 parse_cnf3(std::string_view text);
void validate_cnf3(const Cnf3& f);
bool evaluate(const Cnf3& f, const std::vector<bool>& alpha);  // alpha[i - 1] is p_i
bool is_satisfiable(const Cnf3& f);

// One snake pair per clause plus two swap pairs, s = 3, r = 2. Requires n >= 4.
LearningInstance gen_3sat(const Cnf3& f);
// The rule encoding alpha and the sibling swap.
RuleSet three_sat_rules(const Cnf3& f, const std::vector<bool>& alpha);

// x_{k+1} = x_k + 0x9E3779B97F4A7C15 (mod 2^64); output z = x_{k+1} mixed by
// z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9, z = (z ^ (z >> 27)) * 0x94D049BB133111EB, z ^ (z >> 31).
class SplitMix64 {
public:
  using result_type = std::uint64_t;
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t operator()();
  // Uniform in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n);
  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }

private:
  std::uint64_t state_;
};

struct RandomOptions {
  std::uint64_t seed = 1;
  int n_pairs = 10;
  RuleSet pool;
  double noise = 0.0;
  int steps = 1;
  int max_context_nodes = 5;
  int max_degree = 2;
  std::vector<std::string> alphabet{"f", "g", "a", "b"};
  int retries = 100;
};

struct Generated {
  LearningInstance instance;
  RuleSet planted;
  std::vector<bool> noisy;  // per pair
};

Tree random_tree(SplitMix64& rng, int nodes, const std::vector<std::string>& alphabet, int max_degree);

// Throws std::invalid_argument on an empty pool and std::runtime_error when a pool
// rule cannot be applied to any sampled tree.
Generated gen_random(const RandomOptions& opts);

}  // namespace tpt
