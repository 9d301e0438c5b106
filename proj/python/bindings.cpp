// SPDX-License-Identifier: MIT
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tpt/formula.hpp"
#include "tpt/gen.hpp"
#include "tpt/learn.hpp"

namespace py = pybind11;
using namespace tpt;

namespace {

LearningInstance to_instance(const std::vector<std::pair<std::string, std::string>>& pairs, int steps, int rules,
                             double ratio) {
  LearningInstance inst;
  for (const auto& [s, t] : pairs) inst.pairs.emplace_back(parse_tree(s), parse_tree(t));
  inst.steps = steps;
  inst.rules = rules;
  inst.ratio = ratio;
  validate_instance(inst);
  return inst;
}

py::dict result_dict(const LearnResult& res) {
  static const char* names[] = {"found", "none", "budget"};
  py::list rules, traces;
  for (const auto& r : res.rules.rules) rules.append(r.name + ": " + serialize_rule(r));
  for (const auto& tr : res.traces) {
    if (!tr) {
      traces.append(py::none());
      continue;
    }
    py::list steps;
    for (const auto& st : tr->steps) steps.append(py::make_tuple(st.rule, position_to_string(st.at)));
    traces.append(steps);
  }
  py::dict d;
  d["status"] = names[static_cast<int>(res.status)];
  d["rules"] = rules;
  d["traces"] = traces;
  d["message"] = res.message;
  return d;
}

std::vector<std::pair<std::string, std::string>> pair_strings(const LearningInstance& inst) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [s, t] : inst.pairs) out.emplace_back(serialize_tree(s), serialize_tree(t));
  return out;
}

}  // namespace

PYBIND11_MODULE(_tpt, m) {
  m.doc() = "Learning tree pattern transformations from example pairs";
  m.attr("__version__") = TPT_VERSION;

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<BudgetExceeded>(m, "BudgetExceeded");

  m.def("normalize_tree", [](const std::string& s) { return serialize_tree(parse_tree(s)); }, py::arg("tree"));
  m.def("positions", [](const std::string& s) {
    std::vector<std::string> out;
    for (const auto& p : parse_tree(s).positions()) out.push_back(position_to_string(p));
    return out;
  }, py::arg("tree"));

  m.def("apply_at", [](const std::string& rule, const std::string& tree, const std::string& at) -> std::optional<std::string> {
    auto res = apply_at(parse_rule(rule), parse_tree(tree), parse_position(at));
    if (!res) return std::nullopt;
    return serialize_tree(*res);
  }, py::arg("rule"), py::arg("tree"), py::arg("at") = "-");

  m.def("apply_all", [](const std::string& rule, const std::string& tree) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [v, t] : apply_all(parse_rule(rule), parse_tree(tree)))
      out.emplace_back(position_to_string(v), serialize_tree(t));
    return out;
  }, py::arg("rule"), py::arg("tree"));

  m.def("explains", [](const std::string& rule, const std::string& t, const std::string& ts) -> std::optional<std::string> {
    auto v = explains(parse_rule(rule), parse_tree(t), parse_tree(ts));
    if (!v) return std::nullopt;
    return position_to_string(*v);
  }, py::arg("rule"), py::arg("source"), py::arg("target"));

  m.def("explains_in_steps", [](const std::vector<std::string>& rules, const std::string& t, const std::string& ts, int s) {
    std::vector<Transformation> parsed;
    for (std::size_t i = 0; i < rules.size(); ++i) parsed.push_back(parse_rule(rules[i], "rho" + std::to_string(i + 1)));
    auto tr = explains_in_steps(make_rule_set(parsed), parse_tree(t), parse_tree(ts), s);
    if (!tr) return py::object(py::none());
    py::list steps;
    for (const auto& st : tr->steps) steps.append(py::make_tuple(st.rule, position_to_string(st.at)));
    return py::object(steps);
  }, py::arg("rules"), py::arg("source"), py::arg("target"), py::arg("steps") = 1);

  m.def("learn", [](const std::vector<std::pair<std::string, std::string>>& pairs, int steps, int rules, double ratio,
                    const std::string& engine, bool incremental, std::uint64_t budget, std::uint64_t seed) {
    LearnConfig cfg;
    cfg.engine = parse_engine(engine);
    cfg.incremental = incremental;
    cfg.solver.max_conflicts = budget;
    cfg.solver.seed = seed;
    LearningInstance inst = to_instance(pairs, steps, rules, ratio);
    py::gil_scoped_release release;
    LearnResult res = learn(inst, cfg);
    py::gil_scoped_acquire acquire;
    return result_dict(res);
  }, py::arg("pairs"), py::arg("steps") = 1, py::arg("rules") = 1, py::arg("ratio") = 1.0, py::arg("engine") = "sat",
     py::arg("incremental") = false, py::arg("budget") = 0, py::arg("seed") = 0);

  m.def("gen_vertex_cover", [](const std::string& edges, int k, int n, bool binary) {
    Graph g = parse_edges(edges, n);
    return pair_strings(binary ? gen_vertex_cover_binary(g, k) : gen_vertex_cover(g, k));
  }, py::arg("edges"), py::arg("k"), py::arg("n") = 0, py::arg("binary") = false);

  m.def("gen_3sat", [](const std::string& dimacs) { return pair_strings(gen_3sat(parse_cnf3(dimacs))); },
        py::arg("dimacs"));

  m.def("parse_formula", [](const std::string& text, bool nary) { return serialize_tree(parse_formula(text, {nary})); },
        py::arg("text"), py::arg("nary") = false);
  m.def("print_formula", [](const std::string& tree) { return print_formula(parse_tree(tree)); }, py::arg("tree"));

  m.def("ingest", [](const std::string& text, bool unify, bool nary) {
    IngestOptions o;
    o.unify = unify;
    o.formula.nary = nary;
    return pair_strings(ingest_dataset(text, o));
  }, py::arg("text"), py::arg("unify") = true, py::arg("nary") = false);

  m.def("solve_dimacs", [](const std::string& text, std::uint64_t budget) -> py::object {
    SolverOptions o;
    o.max_conflicts = budget;
    CnfFormula f = parse_dimacs(text);
    SolveResult r = solve(f, o);
    if (r.status == SolveStatus::BudgetExceeded) return py::str("unknown");
    if (!r.sat()) return py::none();
    std::vector<int> model;
    for (int v = 1; v <= f.num_vars(); ++v) model.push_back(r.model[v] ? v : -v);
    return py::cast(model);
  }, py::arg("dimacs"), py::arg("budget") = 0);
}
