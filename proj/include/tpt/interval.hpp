// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tpt/transform.hpp"

namespace tpt {

struct IntervalMatch {
  Position root_image;
  // pattern position -> image positions (a singleton unless the node is an interval variable)
  std::vector<std::pair<Position, std::vector<Position>>> map;
  Binding binding;
};

struct IntervalTransformation {
  std::string name;
  Pattern body;
  Pattern head;
};

struct IntervalLimits {
  std::uint64_t max_decisions = 10000000;
};

IntervalTransformation make_interval_transformation(std::string name, Pattern body, Pattern head);
IntervalTransformation parse_interval_rule(std::string_view text, const std::string& default_name = "rho");
std::string serialize_interval_rule(const IntervalTransformation& rho);

// Visits interval matches at v in backtracking order (leftmost pattern child
// first, shortest interval first); the visitor returns true to stop.
// Returns the number of decisions spent; throws BudgetExceeded past the limit.
std::uint64_t for_each_interval_match(const Pattern& p, const Tree& t, const Position& v,
                                      const std::function<bool(const IntervalMatch&)>& visit,
                                      const IntervalLimits& limits = {});

std::optional<IntervalMatch> interval_match_at(const Pattern& p, const Tree& t, const Position& v,
                                               const IntervalLimits& limits = {});
Tree interval_instantiate(const Pattern& head, const Binding& b);
// All distinct results, deduplicated by isomorphism, in discovery order.
std::vector<Tree> interval_apply_at(const IntervalTransformation& rho, const Tree& t, const Position& v,
                                    const IntervalLimits& limits = {});
std::optional<std::pair<Position, IntervalMatch>> interval_explains(const IntervalTransformation& rho, const Tree& t,
                                                                    const Tree& t_star,
                                                                    const IntervalLimits& limits = {});

struct IntervalStep {
  std::string rule;
  Position at;
  Tree result;
};

std::optional<std::vector<IntervalStep>> interval_explains_in_steps(const std::vector<IntervalTransformation>& gamma,
                                                                    const Tree& t, const Tree& t_star, int s,
                                                                    const IntervalLimits& limits = {},
                                                                    std::uint64_t max_nodes = 1000000);

// Independent check of disjointness, singleton, contiguity, order and
// consistency conditions for a claimed match.
bool verify_interval_match(const Pattern& p, const Tree& t, const IntervalMatch& m);

}  // namespace tpt
