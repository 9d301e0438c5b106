// SPDX-License-Identifier: MIT
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tpt/instance.hpp"
#include "tpt/tree.hpp"

namespace tpt {

class FormulaError : public std::runtime_error {
public:
  FormulaError(const std::string& msg, std::size_t column)
      : std::runtime_error(msg + " at column " + std::to_string(column + 1)), column_(column) {}
  std::size_t column() const { return column_; }

private:
  std::size_t column_;
};

struct FormulaOptions {
  // Merge chains like A & B & C into one node with three children.
  bool nary = false;
};

// Grammar, loosest first: <-> (no chains), -> (right-associative), |, &, !.
// Labels: not, and, or, imp, iff, true, false and the variable names.
Tree parse_formula(std::string_view text, const FormulaOptions& opts = {});
std::string print_formula(const Tree& t);
bool is_formula_tree(const Tree& t);
bool is_proposition(const std::string& label);

using FormulaPair = std::pair<Tree, Tree>;

// Renames propositions by first occurrence in the target (P1, P2, ...), then the
// remaining source propositions by first occurrence in the source.
FormulaPair unify_variables(const FormulaPair& pair);
std::vector<FormulaPair> unify_variables(const std::vector<FormulaPair>& pairs);
// Drops repeated pairs, keeping the first occurrence.
std::vector<FormulaPair> distinct_pairs(const std::vector<FormulaPair>& pairs);

// One "attempt ::: solution" pair per line; blank lines and lines starting with '#' are skipped.
std::vector<FormulaPair> parse_dataset(std::string_view text, const FormulaOptions& opts = {});

struct IngestOptions {
  FormulaOptions formula;
  bool unify = true;
  bool dedupe = true;
  int steps = 1;
  int rules = 1;
  double ratio = 1.0;
};

LearningInstance ingest_dataset(std::string_view text, const IngestOptions& opts = {});

// Synthetic stand-in for a cluster of "either-or" modelling mistakes.
std::string either_or_dataset();

}  // namespace tpt
