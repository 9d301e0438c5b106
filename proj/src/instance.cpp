// SPDX-License-Identifier: MIT
#include "tpt/instance.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace tpt {

int LearningInstance::required_pairs() const {
  const double n = static_cast<double>(pairs.size());
  return static_cast<int>(std::ceil(ratio * n - 1e-9));
}

std::vector<std::string> LearningInstance::alphabet() const {
  std::set<std::string> labels;
  for (const auto& [s, t] : pairs)
    for (const Tree* tr : {&s, &t})
      for (const auto& p : tr->positions()) labels.insert(tr->label_at(p));
  return {labels.begin(), labels.end()};
}

void validate_instance(const LearningInstance& inst) {
  if (inst.steps < 1) throw std::invalid_argument("steps must be at least 1");
  if (inst.rules < 1) throw std::invalid_argument("rules must be at least 1");
  if (!(inst.ratio > 0.0 && inst.ratio <= 1.0)) throw std::invalid_argument("ratio must lie in (0, 1]");
}

LearningInstance parse_instance(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("instance: ") + e.what());
  }
  if (!j.is_object() || !j.contains("pairs") || !j["pairs"].is_array())
    throw std::invalid_argument("instance: expected an object with a \"pairs\" list");
  LearningInstance inst;
  for (const auto& p : j["pairs"]) {
    if (!p.is_object() || !p.contains("source") || !p.contains("target") || !p["source"].is_string() ||
        !p["target"].is_string())
      throw std::invalid_argument("instance: each pair needs string fields \"source\" and \"target\"");
    inst.pairs.emplace_back(parse_tree(p["source"].get<std::string>()), parse_tree(p["target"].get<std::string>()));
  }
  auto get_int = [&](const char* key, int dflt) {
    if (!j.contains(key)) return dflt;
    if (!j[key].is_number_integer()) throw std::invalid_argument(std::string("instance: \"") + key + "\" must be an integer");
    return j[key].get<int>();
  };
  inst.steps = get_int("steps", 1);
  inst.rules = get_int("rules", 1);
  if (j.contains("ratio")) {
    if (!j["ratio"].is_number()) throw std::invalid_argument("instance: \"ratio\" must be a number");
    inst.ratio = j["ratio"].get<double>();
  }
  validate_instance(inst);
  return inst;
}

std::string serialize_instance(const LearningInstance& inst) {
  nlohmann::ordered_json j;
  j["pairs"] = nlohmann::ordered_json::array();
  for (const auto& [s, t] : inst.pairs) {
    nlohmann::ordered_json p;
    p["source"] = serialize_tree(s);
    p["target"] = serialize_tree(t);
    j["pairs"].push_back(p);
  }
  j["steps"] = inst.steps;
  j["rules"] = inst.rules;
  if (inst.ratio != 1.0) j["ratio"] = inst.ratio;
  return j.dump(2) + "\n";
}

LearningInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_instance(ss.str());
}

void save_instance(const LearningInstance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << serialize_instance(inst);
}

}  // namespace tpt
