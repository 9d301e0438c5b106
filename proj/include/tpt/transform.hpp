// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tpt/errors.hpp"
#include "tpt/pattern.hpp"

namespace tpt {

struct Transformation {
  std::string name;
  Pattern body;
  Pattern head;
};

// Throws std::invalid_argument when the head uses a variable missing from the body.
Transformation make_transformation(std::string name, Pattern body, Pattern head);

// Renames variables by first body occurrence in pre-order: x1.., Y1.., Z1...
Transformation canonical_names(const Transformation& rho);

struct RuleSet {
  std::vector<Transformation> rules;
  const Transformation* find(const std::string& name) const;
};

RuleSet make_rule_set(std::vector<Transformation> rules);

struct TraceStep {
  std::string rule;
  Position at;
  Tree result;
};

struct ApplicationTrace {
  std::vector<TraceStep> steps;
};

struct SearchLimits {
  std::uint64_t max_nodes = 1000000;
  int size_factor = 64;
};

Tree instantiate(const Pattern& head, const Binding& b);
std::optional<Tree> apply_at(const Transformation& rho, const Tree& t, const Position& v);
std::vector<std::pair<Position, Tree>> apply_all(const Transformation& rho, const Tree& t);
std::optional<Position> explains(const Transformation& rho, const Tree& t, const Tree& t_star);
// Breadth-first; ties broken by (position in pre-order, rule index).
std::optional<ApplicationTrace> explains_in_steps(const RuleSet& gamma, const Tree& t, const Tree& t_star, int s,
                                                  const SearchLimits& limits = {});

// Accepts "BODY ~> HEAD" with an optional "name:" prefix.
Transformation parse_rule(std::string_view text, const std::string& default_name = "rho");
std::string serialize_rule(const Transformation& rho);
RuleSet parse_rule_file(std::string_view text);
std::string serialize_rule_file(const RuleSet& gamma);

// Direct check of the transformation semantics at v: isomorphic contexts, a body
// match into t, a head match into t_star, and consistent variable images.
// Shares no code with apply_at.
bool semantic_check(const Transformation& rho, const Tree& t, const Tree& t_star, const Position& v);
// Every step of the trace re-checked semantically and chained from t to t_star.
bool verify_trace(const RuleSet& gamma, const Tree& t, const Tree& t_star, const ApplicationTrace& trace, int s);

}  // namespace tpt
