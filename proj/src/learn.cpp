// SPDX-License-Identifier: MIT
#include "tpt/learn.hpp"

#include <future>
#include <set>
#include <stdexcept>

#include "tpt/errors.hpp"
#include "tpt/exact.hpp"

namespace tpt {

namespace {

LearnResult learn_sat_r(const LearningInstance& inst, int r, const LearnConfig& config) {
  LearningInstance sub = inst;
  sub.rules = r;
  EncoderOptions opts = config.encoder;
  if (config.at_positions) opts.fixed_positions = config.at_positions;
  LearnResult out;
  out.rules_used = r;
  Encoding enc;
  try {
    enc = encode(sub, opts);
  } catch (const EncodingTooLarge& e) {
    out.status = LearnStatus::Budget;
    out.message = e.what();
    return out;
  }
  SolveResult res = config.external_solver.empty() ? solve(enc.cnf, config.solver)
                                                   : solve_external(enc.cnf, config.external_solver);
  if (res.status == SolveStatus::BudgetExceeded) {
    out.status = LearnStatus::Budget;
    out.message = "solver budget exhausted at r = " + std::to_string(r);
    return out;
  }
  if (!res.sat()) {
    out.status = LearnStatus::NoSolution;
    return out;
  }
  if (!config.external_solver.empty() && !satisfies(enc.cnf, res.model))
    throw std::runtime_error("external solver returned a model that violates the formula");
  Decoded d = decode(enc, res.model);
  out.status = LearnStatus::Found;
  out.rules = std::move(d.rules);
  out.traces = std::move(d.traces);
  return out;
}

LearnResult learn_sat(const LearningInstance& inst, const LearnConfig& config) {
  if (!config.incremental) return learn_sat_r(inst, inst.rules, config);
  bool budget_hit = false;
  std::string message;
  const int jobs = std::max(1, config.jobs);
  for (int r = 1; r <= inst.rules; r += jobs) {
    std::vector<std::future<LearnResult>> batch;
    for (int k = r; k < r + jobs && k <= inst.rules; ++k)
      batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred,
                                 [&, k] { return learn_sat_r(inst, k, config); }));
    for (auto& f : batch) {
      LearnResult res = f.get();
      if (res.status == LearnStatus::Found) return res;
      if (res.status == LearnStatus::Budget) {
        budget_hit = true;
        message = res.message;
      }
    }
  }
  LearnResult out;
  out.status = budget_hit ? LearnStatus::Budget : LearnStatus::NoSolution;
  out.message = message;
  out.rules_used = inst.rules;
  return out;
}

std::vector<std::optional<ApplicationTrace>> traces_for(const RuleSet& gamma, const LearningInstance& inst,
                                                        const SearchLimits& limits) {
  std::vector<std::optional<ApplicationTrace>> out;
  for (const auto& [t, ts] : inst.pairs) {
    try {
      out.push_back(explains_in_steps(gamma, t, ts, inst.steps, limits));
    } catch (const BudgetExceeded&) {
      out.emplace_back();
    }
  }
  return out;
}

}  // namespace

RuleSet trivial_solution(const LearningInstance& inst) {
  std::vector<Transformation> rules;
  std::set<std::string> seen;
  for (const auto& [t, ts] : inst.pairs) {
    if (t == ts) continue;
    Transformation rho{"rho" + std::to_string(rules.size() + 1), Pattern::from_tree(t), Pattern::from_tree(ts)};
    if (seen.insert(serialize_rule(rho)).second) rules.push_back(std::move(rho));
  }
  return make_rule_set(std::move(rules));
}

Engine parse_engine(const std::string& name) {
  if (name == "sat") return Engine::Sat;
  if (name == "exact") return Engine::Exact;
  if (name == "brute") return Engine::Brute;
  throw std::invalid_argument("unknown engine '" + name + "' (expected sat, exact or brute)");
}

LearnResult learn(const LearningInstance& inst, const LearnConfig& config) {
  validate_instance(inst);
  switch (config.engine) {
    case Engine::Sat:
      return learn_sat(inst, config);
    case Engine::Exact: {
      if (inst.steps != 1 || inst.ratio < 1.0)
        throw std::invalid_argument("the exact engine handles one step and ratio 1 only");
      auto rho = config.at_positions ? learn_at_positions(inst, *config.at_positions) : learn_root(inst);
      LearnResult out;
      out.rules_used = 1;
      if (!rho) {
        out.message = config.at_positions ? "no single rule at the given positions" : "no single rule at the root";
        return out;
      }
      out.status = LearnStatus::Found;
      out.rules = make_rule_set({*rho});
      for (std::size_t i = 0; i < inst.pairs.size(); ++i) {
        Position v = config.at_positions ? (*config.at_positions)[i] : Position{};
        auto next = apply_at(*rho, inst.pairs[i].first, v);
        ApplicationTrace tr;
        tr.steps.push_back({rho->name, v, *next});
        out.traces.emplace_back(std::move(tr));
      }
      return out;
    }
    case Engine::Brute: {
      LearnResult out;
      try {
        auto gamma = learn_brute(inst, config.brute);
        if (!gamma) return out;
        out.status = LearnStatus::Found;
        out.rules = std::move(*gamma);
        out.rules_used = static_cast<int>(out.rules.rules.size());
        out.traces = traces_for(out.rules, inst, config.brute.search);
      } catch (const BudgetExceeded& e) {
        out.status = LearnStatus::Budget;
        out.message = e.what();
      }
      return out;
    }
  }
  return {};
}

}  // namespace tpt
