// SPDX-License-Identifier: MIT
#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tpt/tree.hpp"

namespace tpt {

struct LearningInstance {
  std::vector<std::pair<Tree, Tree>> pairs;  // (source, target)
  int steps = 1;
  int rules = 1;
  double ratio = 1.0;

  // Number of pairs that must be explained: ceil(ratio * n).
  int required_pairs() const;
  // Sorted union of all labels.
  std::vector<std::string> alphabet() const;
};

// Throws std::invalid_argument on steps < 1, rules < 1 or a ratio outside (0, 1].
void validate_instance(const LearningInstance& inst);

LearningInstance parse_instance(std::string_view json_text);
std::string serialize_instance(const LearningInstance& inst);
LearningInstance load_instance(const std::string& path);
void save_instance(const LearningInstance& inst, const std::string& path);

}  // namespace tpt
