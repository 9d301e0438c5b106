// SPDX-License-Identifier: MIT
#include "tpt/exact.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <stdexcept>

namespace tpt {

namespace {

std::string var_name(char kind, const Position& p) { return std::string(1, kind) + ":" + position_to_string(p); }

// Position encoded in a variable name produced by alg_body.
Position var_position(const PatternLabel& l) { return parse_position(l.name.substr(2)); }

bool label_less(const PatternLabel& a, const PatternLabel& b) { return var_position(a) < var_position(b); }

}  // namespace

Pattern alg_body(const std::vector<Tree>& sources) {
  if (sources.empty()) throw std::invalid_argument("alg_body: no source trees");
  std::function<Pattern(const Position&)> build = [&](const Position& p) {
    int deg = -1;
    bool same = true;
    for (const auto& t : sources) {
      int d = t.find(p)->kids.size();
      if (deg >= 0 && d != deg) same = false;
      deg = d;
    }
    if (!same) return Pattern(PatternLabel::tree_var(var_name('Y', p)));
    std::vector<Pattern> kids;
    for (int c = 0; c < deg; ++c) {
      Position q = p;
      q.push_back(c);
      kids.push_back(build(q));
    }
    return Pattern(PatternLabel::node_var(var_name('x', p)), std::move(kids));
  };
  return build({});
}

std::set<PatternLabel> alg_possibilities(const Pattern& sigma, const std::string& label, const Position& p_l,
                                         const Tree& t, const Tree& t_star) {
  if (!t_star.contains(p_l)) return {};
  std::set<PatternLabel> out{PatternLabel::constant(label)};
  for (const auto& p : t.positions()) {
    if (t.label_at(p) != label) continue;
    const PatternNode* n = sigma.find(p);
    if (!n) continue;
    if (n->label.kind != PatternLabel::Kind::TreeVar || subtree(t, p) == subtree(t_star, p_l)) out.insert(n->label);
  }
  return out;
}

std::optional<Pattern> alg_head(const Pattern& sigma, const std::vector<std::pair<Tree, Tree>>& pairs) {
  std::map<Position, std::set<PatternLabel>> head;
  std::set<Position> req;
  for (const auto& [t, ts] : pairs)
    for (const auto& p : ts.positions()) req.insert(p);
  for (const auto& p : req) {
    std::optional<std::set<PatternLabel>> acc;
    for (const auto& [t, ts] : pairs) {
      std::set<PatternLabel> poss;
      if (ts.contains(p)) poss = alg_possibilities(sigma, ts.label_at(p), p, t, ts);
      if (!acc) {
        acc = std::move(poss);
      } else {
        std::set<PatternLabel> both;
        std::set_intersection(acc->begin(), acc->end(), poss.begin(), poss.end(), std::inserter(both, both.end()));
        acc = std::move(both);
      }
    }
    head[p] = acc ? *acc : std::set<PatternLabel>{};
  }
  auto has_tree_var = [](const std::set<PatternLabel>& s) {
    return std::any_of(s.begin(), s.end(), [](const auto& l) { return l.kind == PatternLabel::Kind::TreeVar; });
  };
  auto admitted = [&](const Position& p) {
    auto it = head.find(p);
    if (it == head.end() || it->second.empty()) return false;
    Position a = p;
    while (!a.empty()) {
      a.pop_back();
      const auto& s = head[a];
      if (s.empty() || has_tree_var(s)) return false;
    }
    return true;
  };
  std::function<Pattern(const Position&)> build = [&](const Position& p) {
    const auto& s = head[p];
    std::optional<PatternLabel> pick;
    for (auto kind : {PatternLabel::Kind::TreeVar, PatternLabel::Kind::NodeVar})
      for (const auto& l : s)
        if (!pick && l.kind == kind) pick = l;
    if (pick) {
      for (const auto& l : s)
        if (l.kind == pick->kind && label_less(l, *pick)) pick = l;
    } else {
      pick = *s.begin();
    }
    std::vector<Pattern> kids;
    if (pick->kind != PatternLabel::Kind::TreeVar) {
      for (int c = 0;; ++c) {
        Position q = p;
        q.push_back(c);
        if (!admitted(q)) break;
        kids.push_back(build(q));
      }
    }
    return Pattern(*pick, std::move(kids));
  };
  if (!admitted({})) return std::nullopt;
  return build({});
}

std::optional<Transformation> learn_root(const LearningInstance& inst) {
  if (inst.pairs.empty()) return Transformation{"rho1", parse_pattern("?x1"), parse_pattern("?x1")};
  std::set<std::string> in_sources;
  std::map<std::string, int> target_count;
  for (const auto& [t, ts] : inst.pairs) {
    for (const auto& p : t.positions()) in_sources.insert(t.label_at(p));
    std::set<std::string> here;
    for (const auto& p : ts.positions()) here.insert(ts.label_at(p));
    for (const auto& l : here) ++target_count[l];
  }
  for (const auto& [l, c] : target_count)
    if (!in_sources.count(l) && c != static_cast<int>(inst.pairs.size())) return std::nullopt;
  std::vector<Tree> sources;
  for (const auto& pr : inst.pairs) sources.push_back(pr.first);
  Pattern sigma = alg_body(sources);
  auto tau = alg_head(sigma, inst.pairs);
  if (!tau) return std::nullopt;
  Transformation rho = canonical_names(Transformation{"rho1", sigma, *tau});
  for (const auto& [t, ts] : inst.pairs) {
    auto out = apply_at(rho, t, {});
    if (!out || *out != ts) return std::nullopt;
  }
  return rho;
}

std::optional<Transformation> learn_at_positions(const LearningInstance& inst, const std::vector<Position>& positions) {
  if (positions.size() != inst.pairs.size())
    throw std::invalid_argument("expected one position per pair");
  LearningInstance rooted = inst;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const auto& [t, ts] = inst.pairs[i];
    const auto& v = positions[i];
    if (!t.contains(v) || !ts.contains(v))
      throw std::invalid_argument("pair " + std::to_string(i + 1) + ": position " + position_to_string(v) +
                                  " is missing");
    if (!contexts_isomorphic(t, v, ts, v))
      throw std::invalid_argument("pair " + std::to_string(i + 1) + " differs outside position " +
                                  position_to_string(v));
    rooted.pairs[i] = {subtree(t, v), subtree(ts, v)};
  }
  return learn_root(rooted);
}

}  // namespace tpt
