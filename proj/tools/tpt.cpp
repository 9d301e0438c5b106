// SPDX-License-Identifier: MIT
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "tpt/encoder.hpp"
#include "tpt/errors.hpp"
#include "tpt/formula.hpp"
#include "tpt/gen.hpp"
#include "tpt/interval.hpp"
#include "tpt/learn.hpp"
#include "tpt/tree.hpp"

using namespace tpt;

namespace {

constexpr int kFound = 0;
constexpr int kNone = 1;
constexpr int kBudget = 2;
constexpr int kUsage = 3;

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
}

std::vector<Position> parse_positions(const std::string& text) {
  std::vector<Position> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_position(item));
  return out;
}

std::string format_trace(const std::optional<ApplicationTrace>& tr) {
  if (!tr) return "unexplained";
  if (tr->steps.empty()) return "identical";
  std::string out;
  for (const auto& st : tr->steps) {
    if (!out.empty()) out += " ";
    out += st.rule + "@" + position_to_string(st.at);
  }
  return out;
}

struct EncoderFlags {
  bool symmetry = false;
  bool per_pair = false;
  bool layered = false;
  int max_node_vars = -1;
  int max_tree_vars = -1;

  void add(CLI::App* app) {
    app->add_flag("--symmetry-breaking", symmetry, "Order the rules lexicographically");
    app->add_flag("--per-pair-alphabet", per_pair, "Restrict intermediate labels to each pair's labels");
    app->add_flag("--layered", layered, "Use the multi-step construction even for one step");
    app->add_option("--max-node-vars", max_node_vars, "Node variables per rule");
    app->add_option("--max-tree-vars", max_tree_vars, "Tree variables per rule");
  }
  EncoderOptions options() const {
    EncoderOptions o;
    o.symmetry_breaking = symmetry;
    o.per_pair_alphabet = per_pair;
    o.force_layered = layered;
    o.max_node_vars = max_node_vars;
    o.max_tree_vars = max_tree_vars;
    return o;
  }
};

struct InstanceFlags {
  int steps = 0;
  int rules = 0;
  double ratio = 0;

  void add(CLI::App* app) {
    app->add_option("--steps", steps, "Override the step bound s");
    app->add_option("--rules", rules, "Override the rule bound r");
    app->add_option("--ratio", ratio, "Override the required ratio q");
  }
  LearningInstance apply(LearningInstance inst) const {
    if (steps) inst.steps = steps;
    if (rules) inst.rules = rules;
    if (ratio) inst.ratio = ratio;
    validate_instance(inst);
    return inst;
  }
};

LearningInstance load(const std::string& path) {
  try {
    return parse_instance(read_file(path));
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
}

int report(const LearnResult& res, const LearningInstance& inst) {
  if (!res.message.empty()) std::cerr << res.message << "\n";
  if (res.status == LearnStatus::Budget) {
    std::cerr << "budget exhausted\n";
    return kBudget;
  }
  if (res.status == LearnStatus::NoSolution) {
    std::cerr << "no solution\n";
    return kNone;
  }
  std::cout << serialize_rule_file(res.rules);
  for (std::size_t i = 0; i < inst.pairs.size(); ++i)
    std::cout << "# pair " << i + 1 << ": " << format_trace(i < res.traces.size() ? res.traces[i] : std::nullopt) << "\n";
  return kFound;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learning tree pattern transformations from example pairs"};
  app.set_version_flag("--version", std::string("tpt ") + TPT_VERSION);
  app.require_subcommand(1);
  int jobs = 1;
  app.add_option("--jobs", jobs, "Worker threads for speculative incremental runs")->check(CLI::PositiveNumber);

  // learn
  auto* learn_cmd = app.add_subcommand("learn", "Find rules explaining an instance");
  std::string l_instance, l_engine = "sat", l_dimacs, l_solver, l_at;
  bool l_incremental = false;
  std::uint64_t l_budget = 0, l_seed = 0;
  InstanceFlags l_inst;
  EncoderFlags l_enc;
  learn_cmd->add_option("--instance", l_instance, "Instance file (JSON)")->required();
  learn_cmd->add_option("--engine", l_engine, "sat, exact or brute")->check(CLI::IsMember({"sat", "exact", "brute"}));
  learn_cmd->add_flag("--incremental", l_incremental, "Try r = 1, 2, ... and stop at the first solution");
  learn_cmd->add_option("--emit-dimacs", l_dimacs, "Write the encoding at the instance's r to this path");
  learn_cmd->add_option("--budget", l_budget, "Solver conflicts (sat) or candidates/search nodes (brute)");
  learn_cmd->add_option("--seed", l_seed, "Solver seed");
  learn_cmd->add_option("--solver", l_solver, "External solver command with {cnf} placeholder");
  learn_cmd->add_option("--at", l_at, "Comma-separated application position per pair");
  l_inst.add(learn_cmd);
  l_enc.add(learn_cmd);

  // apply
  auto* apply_cmd = app.add_subcommand("apply", "Apply a rule to a tree");
  std::string a_rule, a_tree, a_at, a_name;
  bool a_all = false;
  apply_cmd->add_option("--rule", a_rule, "Rule file")->required();
  apply_cmd->add_option("--tree", a_tree, "Tree in bracket notation")->required();
  apply_cmd->add_option("--name", a_name, "Rule to use when the file holds several");
  auto* at_opt = apply_cmd->add_option("--at", a_at, "Position such as - or 0.1");
  apply_cmd->add_flag("--all", a_all, "Every application")->excludes(at_opt);

  // check
  auto* check_cmd = app.add_subcommand("check", "Verify rules against an instance");
  std::string c_rules, c_instance;
  int c_steps = 0;
  check_cmd->add_option("--rules", c_rules, "Rule file")->required();
  check_cmd->add_option("--instance", c_instance, "Instance file")->required();
  check_cmd->add_option("--steps", c_steps, "Step bound (defaults to the instance's)");

  // gen
  auto* gen_cmd = app.add_subcommand("gen", "Generate instances");
  gen_cmd->require_subcommand(1);
  std::string g_out;
  auto* gen_vc = gen_cmd->add_subcommand("vertex-cover", "One pair per edge, s = 1, r = k");
  std::string vc_edges;
  int vc_k = 1, vc_n = 0;
  bool vc_binary = false;
  gen_vc->add_option("--edges", vc_edges, "Edges such as 1-2,2-3")->required();
  gen_vc->add_option("--k", vc_k, "Cover size")->required();
  gen_vc->add_option("--n", vc_n, "Number of vertices (default: largest mentioned)");
  gen_vc->add_flag("--binary", vc_binary, "Spell edge labels as trees over {a, b}");
  auto* gen_3 = gen_cmd->add_subcommand("3sat", "Snake-tree pairs from a 3-CNF, s = 3, r = 2");
  std::string sat_cnf;
  gen_3->add_option("--cnf", sat_cnf, "DIMACS file with three literals per clause")->required();
  auto* gen_r = gen_cmd->add_subcommand("random", "Pairs from planted rules");
  RandomOptions ropts;
  std::string r_pool, r_alphabet, r_planted;
  gen_r->add_option("--seed", ropts.seed, "Seed");
  gen_r->add_option("--pairs", ropts.n_pairs, "Number of pairs");
  gen_r->add_option("--pool", r_pool, "Rule file to plant (default: a sibling swap)");
  gen_r->add_option("--noise", ropts.noise, "Fraction of scrambled targets");
  gen_r->add_option("--steps", ropts.steps, "Maximum planted steps per pair");
  gen_r->add_option("--context", ropts.max_context_nodes, "Maximum nodes of the host tree");
  gen_r->add_option("--alphabet", r_alphabet, "Comma-separated labels");
  gen_r->add_option("--planted", r_planted, "Also write the planted rules here");
  for (auto* sub : {gen_vc, gen_3, gen_r}) sub->add_option("--out", g_out, "Output file (default stdout)");

  // encode / decode
  auto* enc_cmd = app.add_subcommand("encode", "Write the SAT encoding as DIMACS");
  std::string e_instance, e_out;
  InstanceFlags e_inst;
  EncoderFlags e_enc;
  enc_cmd->add_option("--instance", e_instance, "Instance file")->required();
  enc_cmd->add_option("--out", e_out, "DIMACS output")->required();
  e_inst.add(enc_cmd);
  e_enc.add(enc_cmd);
  auto* dec_cmd = app.add_subcommand("decode", "Read rules from a solver model");
  std::string d_instance, d_model;
  InstanceFlags d_inst;
  EncoderFlags d_enc;
  dec_cmd->add_option("--instance", d_instance, "Instance file used for encoding")->required();
  dec_cmd->add_option("--model", d_model, "Solver output with s/v lines")->required();
  d_inst.add(dec_cmd);
  d_enc.add(dec_cmd);

  // ingest
  auto* ing_cmd = app.add_subcommand("ingest", "Turn 'attempt ::: solution' lines into an instance");
  std::string i_formulas, i_out;
  IngestOptions iopts;
  iopts.unify = false;
  bool i_keep = false;
  ing_cmd->add_option("--formulas", i_formulas, "Dataset file")->required();
  ing_cmd->add_option("--out", i_out, "Instance output (default stdout)");
  ing_cmd->add_flag("--unify", iopts.unify, "Rename propositions target-first");
  ing_cmd->add_flag("--nary", iopts.formula.nary, "Merge chains of & and |");
  ing_cmd->add_flag("--keep-duplicates", i_keep, "Keep repeated pairs");
  ing_cmd->add_option("--steps", iopts.steps, "Step bound s");
  ing_cmd->add_option("--rules", iopts.rules, "Rule bound r");
  ing_cmd->add_option("--ratio", iopts.ratio, "Required ratio q");

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "Run the embedded solver on a DIMACS file");
  std::string s_cnf;
  std::uint64_t s_budget = 0;
  solve_cmd->add_option("--cnf", s_cnf, "DIMACS file")->required();
  solve_cmd->add_option("--budget", s_budget, "Conflict limit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*learn_cmd) {
      LearningInstance inst = l_inst.apply(load(l_instance));
      LearnConfig cfg;
      cfg.engine = parse_engine(l_engine);
      cfg.incremental = l_incremental;
      cfg.encoder = l_enc.options();
      cfg.solver.max_conflicts = l_budget;
      cfg.solver.seed = l_seed;
      cfg.external_solver = l_solver;
      cfg.jobs = jobs;
      if (l_budget) {
        cfg.brute.max_candidates = l_budget;
        cfg.brute.search.max_nodes = l_budget;
      }
      if (!l_at.empty()) {
        cfg.at_positions = parse_positions(l_at);
        if (cfg.at_positions->size() != inst.pairs.size()) throw UsageError("--at needs one position per pair");
      }
      if (!l_dimacs.empty()) {
        EncoderOptions o = cfg.encoder;
        o.fixed_positions = cfg.at_positions;
        try {
          write_output(l_dimacs, export_dimacs(encode(inst, o).cnf));
        } catch (const EncodingTooLarge& e) {
          std::cerr << e.what() << "\n";
          return kBudget;
        }
      }
      return report(learn(inst, cfg), inst);
    }

    if (*apply_cmd) {
      std::string text = read_file(a_rule);
      Tree t = parse_tree(a_tree);
      bool interval = text.find('@') != std::string::npos;
      if (interval) {
        std::vector<IntervalTransformation> rules;
        std::stringstream ss(text);
        std::string line;
        while (std::getline(ss, line)) {
          auto first = line.find_first_not_of(" \t\r");
          if (first == std::string::npos || line[first] == '#') continue;
          rules.push_back(parse_interval_rule(line));
        }
        if (rules.empty()) throw UsageError("no rule in " + a_rule);
        const IntervalTransformation* rho = &rules[0];
        for (const auto& r : rules)
          if (r.name == a_name) rho = &r;
        std::vector<Position> where;
        if (!a_at.empty()) where = {parse_position(a_at)};
        else where = t.positions();
        bool any = false;
        for (const auto& v : where) {
          for (const auto& res : interval_apply_at(*rho, t, v)) {
            std::cout << position_to_string(v) << "\t" << serialize_tree(res) << "\n";
            any = true;
          }
          if (any && !a_all && a_at.empty()) break;
        }
        return any ? kFound : kNone;
      }
      RuleSet gamma = parse_rule_file(text);
      if (gamma.rules.empty()) throw UsageError("no rule in " + a_rule);
      const Transformation* rho = a_name.empty() ? &gamma.rules[0] : gamma.find(a_name);
      if (!rho) throw UsageError("no rule named " + a_name);
      if (!a_at.empty()) {
        auto res = apply_at(*rho, t, parse_position(a_at));
        if (!res) return kNone;
        std::cout << serialize_tree(*res) << "\n";
        return kFound;
      }
      auto all = apply_all(*rho, t);
      if (all.empty()) return kNone;
      if (!a_all) all.resize(1);
      for (const auto& [v, res] : all) std::cout << position_to_string(v) << "\t" << serialize_tree(res) << "\n";
      return kFound;
    }

    if (*check_cmd) {
      LearningInstance inst = load(c_instance);
      RuleSet gamma = parse_rule_file(read_file(c_rules));
      int s = c_steps ? c_steps : inst.steps;
      int explained = 0;
      for (std::size_t i = 0; i < inst.pairs.size(); ++i) {
        const auto& [t, ts] = inst.pairs[i];
        std::optional<ApplicationTrace> tr;
        std::string verdict;
        try {
          tr = explains_in_steps(gamma, t, ts, s);
          verdict = tr ? (verify_trace(gamma, t, ts, *tr, s) ? "explained" : "invalid") : "unexplained";
        } catch (const BudgetExceeded&) {
          verdict = "budget";
        }
        explained += verdict == "explained";
        std::cout << i + 1 << "\t" << verdict << "\t" << (tr ? format_trace(tr) : "-") << "\n";
      }
      std::cout << explained << "/" << inst.pairs.size() << " explained, " << inst.required_pairs() << " required\n";
      return explained >= inst.required_pairs() ? kFound : kNone;
    }

    if (*gen_cmd) {
      LearningInstance inst;
      if (*gen_vc) {
        Graph g = parse_edges(vc_edges, vc_n);
        inst = vc_binary ? gen_vertex_cover_binary(g, vc_k) : gen_vertex_cover(g, vc_k);
        if (inst.pairs.empty()) std::cerr << "warning: graph has no edges, instance is empty\n";
      } else if (*gen_3) {
        inst = gen_3sat(parse_cnf3(read_file(sat_cnf)));
      } else {
        ropts.pool = r_pool.empty() ? make_rule_set({parse_rule("swap: ?x($Y1,$Y2) ~> ?x($Y2,$Y1)")})
                                    : parse_rule_file(read_file(r_pool));
        if (!r_alphabet.empty()) {
          ropts.alphabet.clear();
          std::stringstream ss(r_alphabet);
          std::string item;
          while (std::getline(ss, item, ',')) ropts.alphabet.push_back(item);
        }
        Generated g = gen_random(ropts);
        inst = g.instance;
        if (inst.pairs.empty()) std::cerr << "warning: no pairs requested, instance is empty\n";
        if (!r_planted.empty()) write_output(r_planted, serialize_rule_file(g.planted));
      }
      write_output(g_out, serialize_instance(inst));
      return kFound;
    }

    if (*enc_cmd) {
      LearningInstance inst = e_inst.apply(load(e_instance));
      try {
        Encoding enc = encode(inst, e_enc.options());
        write_output(e_out, export_dimacs(enc.cnf));
        std::cerr << enc.cnf.num_vars() << " variables, " << enc.cnf.num_clauses() << " clauses\n";
      } catch (const EncodingTooLarge& e) {
        std::cerr << e.what() << "\n";
        return kBudget;
      }
      return kFound;
    }

    if (*dec_cmd) {
      LearningInstance inst = d_inst.apply(load(d_instance));
      Encoding enc = encode(inst, d_enc.options());
      SolveResult res = import_model(read_file(d_model), enc.cnf.num_vars());
      if (!res.sat()) {
        std::cerr << "model file reports no solution\n";
        return kNone;
      }
      if (!satisfies(enc.cnf, res.model)) throw std::runtime_error("model violates the encoding");
      Decoded d = decode(enc, res.model);
      LearnResult out;
      out.status = LearnStatus::Found;
      out.rules = d.rules;
      out.traces = d.traces;
      return report(out, inst);
    }

    if (*ing_cmd) {
      iopts.dedupe = !i_keep;
      LearningInstance inst = ingest_dataset(read_file(i_formulas), iopts);
      write_output(i_out, serialize_instance(inst));
      return kFound;
    }

    if (*solve_cmd) {
      CnfFormula f = parse_dimacs(read_file(s_cnf));
      SolverOptions o;
      o.max_conflicts = s_budget;
      SolveResult res = solve(f, o);
      if (res.status == SolveStatus::BudgetExceeded) {
        std::cout << "s UNKNOWN\n";
        return kBudget;
      }
      if (!res.sat()) {
        std::cout << "s UNSATISFIABLE\n";
        return kNone;
      }
      std::cout << "s SATISFIABLE\nv";
      for (int v = 1; v <= f.num_vars(); ++v) std::cout << " " << (res.model[v] ? v : -v);
      std::cout << " 0\n";
      return kFound;
    }
  } catch (const BudgetExceeded& e) {
    std::cerr << e.what() << "\n";
    return kBudget;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
