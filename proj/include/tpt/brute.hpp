// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "tpt/instance.hpp"
#include "tpt/transform.hpp"

namespace tpt {

struct BruteOptions {
  // Multi-step search: node limit for bodies and heads.
  int max_rule_size = 3;
  // Throws BudgetExceeded beyond this many candidate rules or rule tuples.
  std::uint64_t max_candidates = 5'000'000;
  SearchLimits search;
};

// Every rule (canonical names, deduplicated) whose body matches a subtree of the
// source and whose body and head have at most max_size nodes. Head constants are
// drawn from the labels of both trees.
std::vector<Transformation> enumerate_candidates(const std::pair<Tree, Tree>& pair, int max_size,
                                                 std::uint64_t max_candidates = 5'000'000);

// Rules explaining the pair in one step, restricted to the most general body for
// each head: linear, variables only, and cut to tree variables wherever the head
// does not look further down. Any rule explaining the pair is dominated by one of these.
std::vector<Transformation> explaining_candidates(const Tree& t, const Tree& t_star,
                                                  std::uint64_t max_candidates = 5'000'000);

// First rule tuple (up to inst.rules rules) explaining the required number of pairs,
// or nullopt when the search space is exhausted.
std::optional<RuleSet> learn_brute(const LearningInstance& inst, const BruteOptions& opts = {});

}  // namespace tpt
