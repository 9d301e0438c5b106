// SPDX-License-Identifier: MIT
#include "tpt/brute.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "tpt/errors.hpp"

namespace tpt {

namespace {

class Budget {
public:
  explicit Budget(std::uint64_t limit) : limit_(limit) {}
  void tick() {
    if (++count_ > limit_) throw BudgetExceeded("brute-force search exceeded " + std::to_string(limit_) + " candidates");
  }

private:
  std::uint64_t limit_;
  std::uint64_t count_ = 0;
};

struct Sized {
  Pattern p;
  int size;
};

// Patterns matching t at the root with at most `budget` nodes; every variable
// occurrence gets a distinct placeholder name.
std::vector<Sized> matching_shapes(const Tree& t, int budget, int& counter) {
  std::vector<Sized> out;
  if (budget < 1) return out;
  out.push_back({Pattern(PatternLabel::tree_var("#" + std::to_string(counter++))), 1});
  std::vector<std::vector<Sized>> seqs{{}};
  std::vector<int> seq_size{0};
  for (const auto& c : t.children()) {
    std::vector<std::vector<Sized>> next;
    std::vector<int> next_size;
    for (std::size_t s = 0; s < seqs.size(); ++s) {
      int room = budget - 1 - seq_size[s];
      for (auto& k : matching_shapes(c, room, counter)) {
        next.push_back(seqs[s]);
        next.back().push_back(k);
        next_size.push_back(seq_size[s] + k.size);
      }
    }
    seqs = std::move(next);
    seq_size = std::move(next_size);
  }
  for (std::size_t s = 0; s < seqs.size(); ++s) {
    std::vector<Pattern> kids;
    for (auto& k : seqs[s]) kids.push_back(k.p);
    int size = 1 + seq_size[s];
    out.push_back({Pattern(PatternLabel::constant(t.label()), kids), size});
    out.push_back({Pattern(PatternLabel::node_var("#" + std::to_string(counter++)), kids), size});
  }
  return out;
}

// All ways of merging placeholder variables whose captured values coincide.
void merge_variables(const Pattern& shape, const Tree& t, const std::function<void(const Pattern&)>& emit) {
  struct Occ {
    PatternLabel::Kind kind;
    std::string placeholder;
    Tree value;
  };
  std::vector<Occ> occ;
  std::function<void(const Pattern&, const Tree&)> collect = [&](const Pattern& p, const Tree& n) {
    if (p.label().kind == PatternLabel::Kind::NodeVar) occ.push_back({p.label().kind, p.label().name, Tree(n.label())});
    if (p.label().kind == PatternLabel::Kind::TreeVar) occ.push_back({p.label().kind, p.label().name, n});
    for (int i = 0; i < p.degree(); ++i) collect(p.child(i), n.child(i));
  };
  collect(shape, t);
  std::vector<int> group(occ.size(), -1);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int groups) {
    if (i == occ.size()) {
      std::map<std::string, std::string> rename;
      for (std::size_t k = 0; k < occ.size(); ++k) rename[occ[k].placeholder] = "g" + std::to_string(group[k]);
      std::function<Pattern(const Pattern&)> re = [&](const Pattern& p) {
        std::vector<Pattern> kids;
        for (const auto& c : p.children()) kids.push_back(re(c));
        auto it = rename.find(p.label().name);
        PatternLabel l = p.label();
        if (l.is_var() && it != rename.end()) l.name = it->second;
        return Pattern(l, std::move(kids));
      };
      emit(re(shape));
      return;
    }
    for (int g = 0; g < groups; ++g) {
      std::size_t first = 0;
      while (group[first] != g) ++first;
      if (occ[first].kind == occ[i].kind && occ[first].value == occ[i].value) {
        group[i] = g;
        rec(i + 1, groups);
      }
    }
    group[i] = groups;
    rec(i + 1, groups + 1);
  };
  rec(0, 0);
}

// All patterns with at most `budget` nodes over the given labels; tree variables are leaves.
std::vector<Sized> all_patterns(const std::vector<PatternLabel>& labels, int budget) {
  std::vector<Sized> out;
  if (budget < 1) return out;
  std::vector<std::pair<std::vector<Pattern>, int>> seqs{{{}, 0}};
  // children sequences of total size <= budget - 1
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    auto [seq, used] = seqs[i];
    for (auto& k : all_patterns(labels, budget - 1 - used)) {
      auto next = seq;
      next.push_back(k.p);
      seqs.push_back({std::move(next), used + k.size});
    }
  }
  for (const auto& l : labels) {
    if (l.kind == PatternLabel::Kind::TreeVar) {
      out.push_back({Pattern(l), 1});
      continue;
    }
    for (const auto& [seq, used] : seqs) out.push_back({Pattern(l, seq), 1 + used});
  }
  return out;
}

std::vector<PatternLabel> head_labels(const Pattern& body, const std::set<std::string>& constants) {
  std::vector<PatternLabel> labels;
  for (const auto& c : constants) labels.push_back(PatternLabel::constant(c));
  for (const auto& v : body.variables()) labels.push_back(v);
  return labels;
}

std::set<std::string> labels_of(const Tree& t) {
  std::set<std::string> out;
  for (const auto& p : t.positions()) out.insert(t.label_at(p));
  return out;
}

}  // namespace

std::vector<Transformation> enumerate_candidates(const std::pair<Tree, Tree>& pair, int max_size,
                                                 std::uint64_t max_candidates) {
  std::vector<Transformation> out;
  if (max_size < 1) return out;
  Budget budget(max_candidates);
  const auto& [t, ts] = pair;
  std::set<std::string> constants = labels_of(t);
  for (const auto& l : labels_of(ts)) constants.insert(l);
  std::set<std::string> seen_bodies, seen_rules;
  std::vector<Pattern> bodies;
  for (const auto& v : t.positions()) {
    Tree sub = subtree(t, v);
    int counter = 0;
    for (const auto& shape : matching_shapes(sub, max_size, counter)) {
      merge_variables(shape.p, sub, [&](const Pattern& p) {
        Pattern body = canonical_names(Transformation{"", p, p}).body;
        if (seen_bodies.insert(serialize_pattern(body)).second) bodies.push_back(body);
      });
    }
  }
  for (const auto& body : bodies) {
    for (const auto& head : all_patterns(head_labels(body, constants), max_size)) {
      Transformation rho{"rho", body, head.p};
      if (seen_rules.insert(serialize_rule(rho)).second) {
        budget.tick();
        out.push_back(std::move(rho));
      }
    }
  }
  return out;
}

std::vector<Transformation> explaining_candidates(const Tree& t, const Tree& t_star, std::uint64_t max_candidates) {
  std::vector<Transformation> out;
  std::set<std::string> seen;
  Budget budget(max_candidates);
  for (const auto& v : t.positions()) {
    if (!t_star.contains(v) || !contexts_isomorphic(t, v, t_star, v)) continue;
    const Tree S = subtree(t, v), T = subtree(t_star, v);
    const auto spos = S.positions();
    std::vector<Tree> ssub;
    for (const auto& p : spos) ssub.push_back(subtree(S, p));
    enum Kind { kConst, kX, kY };
    struct Choice {
      Kind kind;
      int src;
    };
    std::map<Position, Choice> choice;
    std::vector<Position> pending{{}};
    std::function<Pattern(const Position&, std::set<int>&, std::set<int>&)> build_head =
        [&](const Position& q, std::set<int>& xs, std::set<int>& ys) {
          const Choice& c = choice.at(q);
          if (c.kind == kY) {
            ys.insert(c.src);
            return Pattern(PatternLabel::tree_var("Y:" + position_to_string(spos[c.src])));
          }
          std::vector<Pattern> kids;
          const TreeNode* n = T.find(q);
          for (std::size_t i = 0; i < n->kids.size(); ++i) {
            Position qc = q;
            qc.push_back(static_cast<int>(i));
            kids.push_back(build_head(qc, xs, ys));
          }
          if (c.kind == kConst) return Pattern(PatternLabel::constant(n->label), std::move(kids));
          xs.insert(c.src);
          return Pattern(PatternLabel::node_var("x:" + position_to_string(spos[c.src])), std::move(kids));
        };
    auto emit = [&] {
      std::set<int> xs, ys;
      Pattern head = build_head({}, xs, ys);
      std::vector<Position> xpos, ypos;
      for (int i : xs) xpos.push_back(spos[i]);
      for (int i : ys) ypos.push_back(spos[i]);
      auto below = [](const std::vector<Position>& refs, const Position& p) {
        for (const auto& r : refs)
          if (r.size() > p.size() && is_prefix(p, r)) return true;
        return false;
      };
      auto member = [](const std::vector<Position>& refs, const Position& p) {
        return std::find(refs.begin(), refs.end(), p) != refs.end();
      };
      for (const auto& y : ypos)
        if (member(xpos, y) || below(xpos, y) || below(ypos, y)) return;
      std::function<Pattern(const Position&)> body = [&](const Position& p) {
        std::string at = position_to_string(p);
        if (member(ypos, p)) return Pattern(PatternLabel::tree_var("Y:" + at));
        const TreeNode* n = S.find(p);
        bool referenced = member(xpos, p);
        bool expand = below(xpos, p) || below(ypos, p) || (referenced && !n->kids.empty());
        if (!expand) {
          if (referenced) return Pattern(PatternLabel::node_var("x:" + at));
          return Pattern(PatternLabel::tree_var("Y:" + at));
        }
        std::vector<Pattern> kids;
        for (std::size_t i = 0; i < n->kids.size(); ++i) {
          Position pc = p;
          pc.push_back(static_cast<int>(i));
          kids.push_back(body(pc));
        }
        return Pattern(PatternLabel::node_var("x:" + at), std::move(kids));
      };
      Transformation rho = canonical_names(Transformation{"rho", body({}), head});
      if (seen.insert(serialize_rule(rho)).second) {
        budget.tick();
        out.push_back(std::move(rho));
      }
    };
    std::function<void()> rec = [&] {
      if (pending.empty()) {
        emit();
        return;
      }
      Position q = pending.back();
      pending.pop_back();
      const TreeNode* n = T.find(q);
      Tree tq = subtree(T, q);
      auto with_kids = [&](Choice c) {
        choice[q] = c;
        for (std::size_t i = n->kids.size(); i-- > 0;) {
          Position qc = q;
          qc.push_back(static_cast<int>(i));
          pending.push_back(qc);
        }
        rec();
        pending.resize(pending.size() - n->kids.size());
      };
      with_kids({kConst, -1});
      for (std::size_t i = 0; i < spos.size(); ++i)
        if (S.label_at(spos[i]) == n->label) with_kids({kX, static_cast<int>(i)});
      for (std::size_t i = 0; i < spos.size(); ++i)
        if (ssub[i] == tq) {
          choice[q] = {kY, static_cast<int>(i)};
          rec();
        }
      pending.push_back(q);
    };
    rec();
  }
  return out;
}

namespace {

class CoverSearch {
public:
  CoverSearch(const LearningInstance& inst, const BruteOptions& opts) : inst_(inst), opts_(opts) {
    n_ = static_cast<int>(inst.pairs.size());
    cands_.resize(n_);
    ready_.assign(n_, false);
  }

  std::optional<std::vector<Transformation>> run() {
    std::vector<char> covered(n_, 0);
    for (int i = 0; i < n_; ++i) covered[i] = inst_.pairs[i].first == inst_.pairs[i].second;
    int skips = n_ - inst_.required_pairs();
    std::vector<int> chosen;
    if (!search(0, covered, chosen, skips)) return std::nullopt;
    std::vector<Transformation> out;
    for (int id : result_) out.push_back(rules_[id]);
    return out;
  }

private:
  const std::vector<int>& candidates(int i) {
    if (!ready_[i]) {
      for (auto& rho : explaining_candidates(inst_.pairs[i].first, inst_.pairs[i].second, opts_.max_candidates)) {
        std::string key = serialize_rule(rho);
        auto [it, fresh] = ids_.try_emplace(key, static_cast<int>(rules_.size()));
        if (fresh) {
          rules_.push_back(std::move(rho));
          masks_.emplace_back();
        }
        cands_[i].push_back(it->second);
      }
      ready_[i] = true;
    }
    return cands_[i];
  }

  const std::vector<char>& mask(int id) {
    auto& m = masks_[id];
    if (m.empty()) {
      m.resize(n_);
      for (int i = 0; i < n_; ++i) m[i] = explains(rules_[id], inst_.pairs[i].first, inst_.pairs[i].second).has_value();
    }
    return m;
  }

  bool search(int idx, const std::vector<char>& covered, std::vector<int>& chosen, int skips) {
    while (idx < n_ && covered[idx]) ++idx;
    if (idx == n_) {
      result_ = chosen;
      return true;
    }
    if (static_cast<int>(chosen.size()) < inst_.rules) {
      for (int id : candidates(idx)) {
        if (++tuples_ > opts_.max_candidates) throw BudgetExceeded("brute-force cover search exceeded its budget");
        std::vector<char> next = covered;
        const auto& m = mask(id);
        for (int i = 0; i < n_; ++i) next[i] |= m[i];
        chosen.push_back(id);
        if (search(idx + 1, next, chosen, skips)) return true;
        chosen.pop_back();
      }
    }
    return skips > 0 && search(idx + 1, covered, chosen, skips - 1);
  }

  const LearningInstance& inst_;
  const BruteOptions& opts_;
  int n_ = 0;
  std::vector<std::vector<int>> cands_;
  std::vector<bool> ready_;
  std::vector<Transformation> rules_;
  std::vector<std::vector<char>> masks_;
  std::unordered_map<std::string, int> ids_;
  std::vector<int> result_;
  std::uint64_t tuples_ = 0;
};

// Linear patterns over variables only: inner nodes are node variables, leaves either kind.
std::vector<Sized> general_bodies(int budget) {
  std::vector<Sized> out;
  for (const auto& s : all_patterns({PatternLabel::node_var("v"), PatternLabel::tree_var("v")}, budget)) {
    int counter = 0;
    std::function<Pattern(const Pattern&)> name = [&](const Pattern& p) {
      PatternLabel l = p.label();
      l.name = "v" + std::to_string(counter++);
      std::vector<Pattern> kids;
      for (const auto& c : p.children()) kids.push_back(name(c));
      return Pattern(l, std::move(kids));
    };
    out.push_back({canonical_names(Transformation{"", name(s.p), s.p}).body, s.size});
  }
  return out;
}

std::optional<std::vector<Transformation>> tuple_search(const LearningInstance& inst, const BruteOptions& opts) {
  std::set<std::string> constants;
  for (const auto& [t, ts] : inst.pairs) {
    for (const auto& l : labels_of(t)) constants.insert(l);
    for (const auto& l : labels_of(ts)) constants.insert(l);
  }
  Budget budget(opts.max_candidates);
  std::vector<Transformation> cands;
  for (const auto& body : general_bodies(opts.max_rule_size))
    for (const auto& head : all_patterns(head_labels(body.p, constants), opts.max_rule_size)) {
      if (head.p == body.p) continue;
      budget.tick();
      cands.push_back(Transformation{"rho", body.p, head.p});
    }
  const int need = inst.required_pairs();
  std::vector<int> pick;
  std::function<bool(std::size_t)> rec = [&](std::size_t from) -> bool {
    if (!pick.empty()) {
      budget.tick();
      std::vector<Transformation> rules;
      for (int id : pick) rules.push_back(cands[id]);
      for (std::size_t k = 0; k < rules.size(); ++k) rules[k].name = "rho" + std::to_string(k + 1);
      RuleSet gamma = make_rule_set(rules);
      int ok = 0;
      for (const auto& [t, ts] : inst.pairs)
        if (explains_in_steps(gamma, t, ts, inst.steps, opts.search)) ++ok;
      if (ok >= need) return true;
    }
    if (static_cast<int>(pick.size()) == inst.rules) return false;
    for (std::size_t i = from; i < cands.size(); ++i) {
      pick.push_back(static_cast<int>(i));
      if (rec(i + 1)) return true;
      pick.pop_back();
    }
    return false;
  };
  int explained0 = 0;
  for (const auto& [t, ts] : inst.pairs) explained0 += t == ts;
  if (explained0 >= need) return std::vector<Transformation>{};
  if (!rec(0)) return std::nullopt;
  std::vector<Transformation> out;
  for (int id : pick) out.push_back(cands[id]);
  return out;
}

}  // namespace

std::optional<RuleSet> learn_brute(const LearningInstance& inst, const BruteOptions& opts) {
  validate_instance(inst);
  std::optional<std::vector<Transformation>> rules;
  if (inst.steps == 1) rules = CoverSearch(inst, opts).run();
  else rules = tuple_search(inst, opts);
  if (!rules) return std::nullopt;
  if (rules->empty()) rules->push_back(Transformation{"rho", parse_pattern("?x1"), parse_pattern("?x1")});
  for (std::size_t k = 0; k < rules->size(); ++k) (*rules)[k].name = "rho" + std::to_string(k + 1);
  RuleSet gamma = make_rule_set(std::move(*rules));
  int ok = 0;
  for (const auto& [t, ts] : inst.pairs) {
    try {
      if (explains_in_steps(gamma, t, ts, inst.steps, opts.search)) ++ok;
    } catch (const BudgetExceeded&) {
    }
  }
  if (ok < inst.required_pairs()) throw std::logic_error("brute-force result failed re-verification");
  return gamma;
}

}  // namespace tpt
