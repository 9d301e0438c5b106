// SPDX-License-Identifier: MIT
#pragma once

#include <optional>
#include <set>
#include <vector>

#include "tpt/instance.hpp"
#include "tpt/pattern.hpp"
#include "tpt/transform.hpp"

namespace tpt {

// Largest linear pattern matching every source at the root. Variables are named
// after their positions ("x:0.1", "Y:1").
Pattern alg_body(const std::vector<Tree>& sources);

// Labels of sigma (plus the constant itself) that can produce `label` at p_l of
// t_star when the rule is applied at the root of t.
std::set<PatternLabel> alg_possibilities(const Pattern& sigma, const std::string& label, const Position& p_l,
                                         const Tree& t, const Tree& t_star);

// Head candidate for body sigma; nullopt when no root label works for every pair.
std::optional<Pattern> alg_head(const Pattern& sigma, const std::vector<std::pair<Tree, Tree>>& pairs);

// Single rule explaining every pair by one application at the root.
std::optional<Transformation> learn_root(const LearningInstance& inst);

// As learn_root, with one prescribed application position per pair. Throws
// std::invalid_argument when a position is missing or the pair differs outside it.
std::optional<Transformation> learn_at_positions(const LearningInstance& inst, const std::vector<Position>& positions);

}  // namespace tpt
