// SPDX-License-Identifier: MIT
#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tpt {

// Clause store over variables 1..num_vars(); literals use the DIMACS sign convention.
class CnfFormula {
public:
  int num_vars() const { return nvars_; }
  int new_var() { return ++nvars_; }
  void ensure_vars(int n) {
    if (n > nvars_) nvars_ = n;
  }
  // Literals are sorted by variable and deduplicated. Tautologies are dropped
  // (returns false). Empty clauses and unknown variables throw.
  bool add_clause(std::span<const int> lits);
  bool add_clause(std::initializer_list<int> lits) { return add_clause(std::span<const int>(lits.begin(), lits.size())); }
  std::size_t num_clauses() const { return offsets_.size() - 1; }
  std::span<const int> clause(std::size_t i) const {
    return {lits_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  std::size_t num_literals() const { return lits_.size(); }

private:
  int nvars_ = 0;
  std::vector<int> lits_;
  std::vector<std::size_t> offsets_{0};
  std::vector<int> scratch_;
};

struct VarName {
  std::string kind;
  std::vector<int> args;
  std::string to_string() const;
  bool operator==(const VarName&) const = default;
};

// Bijection between structured names and the variables they were assigned.
// Variables created directly through CnfFormula::new_var are anonymous.
class VarRegistry {
public:
  int get(CnfFormula& f, const std::string& kind, const std::vector<int>& args);
  std::optional<int> find(const std::string& kind, const std::vector<int>& args) const;
  const VarName* name(int var) const;
  std::size_t size() const { return names_.size(); }
  std::vector<int> variables() const;

private:
  static std::string key(const std::string& kind, const std::vector<int>& args);
  std::unordered_map<std::string, int> ids_;
  std::unordered_map<int, VarName> names_;
};

void add_at_least_one(CnfFormula& f, std::span<const int> lits);
void add_at_most_one(CnfFormula& f, std::span<const int> lits);
// One positive clause plus pairwise exclusions.
void add_exactly_one(CnfFormula& f, std::span<const int> lits);
void add_implication(CnfFormula& f, int a, int b);
// Sequential counter; introduces auxiliary variables.
void add_at_least_k(CnfFormula& f, std::span<const int> lits, int k);

enum class SolveStatus { Sat, Unsat, BudgetExceeded };

struct SolveResult {
  SolveStatus status = SolveStatus::Unsat;
  std::vector<bool> model;  // indexed by variable, entry 0 unused
  std::uint64_t conflicts = 0;
  std::uint64_t decisions = 0;
  std::uint64_t propagations = 0;

  bool sat() const { return status == SolveStatus::Sat; }
  bool value(int lit) const { return lit > 0 ? model[lit] : !model[-lit]; }
};

struct SolverOptions {
  std::uint64_t max_conflicts = 0;  // 0 means unlimited
  const std::atomic<bool>* cancel = nullptr;
  std::uint64_t seed = 0;
};

SolveResult solve(const CnfFormula& f, const SolverOptions& opts = {});

bool satisfies(const CnfFormula& f, const std::vector<bool>& model);

std::string export_dimacs(const CnfFormula& f);
CnfFormula parse_dimacs(std::string_view text);
// Reads "s" and "v" lines of the usual solver output format.
SolveResult import_model(std::string_view text, int num_vars);
// Runs an external solver. The template's "{cnf}" is replaced by the path of a
// temporary DIMACS file; the solver's standard output is read as a model.
SolveResult solve_external(const CnfFormula& f, const std::string& command_template);

}  // namespace tpt
