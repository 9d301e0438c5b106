// SPDX-License-Identifier: MIT
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tpt/brute.hpp"
#include "tpt/encoder.hpp"
#include "tpt/instance.hpp"
#include "tpt/sat.hpp"
#include "tpt/transform.hpp"

namespace tpt {

enum class Engine { Sat, Exact, Brute };

struct LearnConfig {
  Engine engine = Engine::Sat;
  // SAT engine: try r = 1, 2, ... up to the instance's rule budget.
  bool incremental = false;
  SolverOptions solver;
  EncoderOptions encoder;
  // Command template with "{cnf}" for an external solver; empty uses the built-in one.
  std::string external_solver;
  // One application position per pair (exact engine, or the SAT engine at s = 1).
  std::optional<std::vector<Position>> at_positions;
  BruteOptions brute;
  // Parallel speculative runs of the incremental search.
  int jobs = 1;
};

enum class LearnStatus { Found, NoSolution, Budget };

struct LearnResult {
  LearnStatus status = LearnStatus::NoSolution;
  RuleSet rules;
  // Per pair; empty for pairs left unexplained under a ratio below 1.
  std::vector<std::optional<ApplicationTrace>> traces;
  int rules_used = 0;
  std::string message;
};

LearnResult learn(const LearningInstance& inst, const LearnConfig& config = {});

// One literal rule per differing pair.
RuleSet trivial_solution(const LearningInstance& inst);

Engine parse_engine(const std::string& name);

}  // namespace tpt
