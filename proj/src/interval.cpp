// SPDX-License-Identifier: MIT
#include "tpt/interval.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace tpt {

namespace {

using Kind = PatternLabel::Kind;

bool same_sequence(const std::vector<Tree>& a, const NodePtr* b, std::size_t n) {
  if (a.size() != n) return false;
  for (std::size_t i = 0; i < n; ++i)
    if (!(a[i] == Tree::from_node(b[i]))) return false;
  return true;
}

class Search {
public:
  Search(const IntervalLimits& lim, const std::function<bool(const IntervalMatch&)>& visit, Position root)
      : lim_(lim), visit_(visit) {
    match_.root_image = std::move(root);
  }

  std::uint64_t decisions() const { return decisions_; }

  bool node(const PatternNode* p, const NodePtr& t, const Position& ppos, const Position& tpos, const std::function<bool()>& k) {
    tick();
    match_.map.push_back({ppos, {tpos}});
    bool stop = false;
    auto& b = match_.binding;
    switch (p->label.kind) {
      case Kind::TreeVar: {
        auto it = b.trees.find(p->label.name);
        if (it != b.trees.end()) {
          stop = it->second == Tree::from_node(t) && k();
        } else {
          b.trees.emplace(p->label.name, Tree::from_node(t));
          stop = k();
          b.trees.erase(p->label.name);
        }
        break;
      }
      case Kind::IntervalVar:
        throw std::logic_error("interval variable outside a child list");
      case Kind::NodeVar: {
        auto it = b.nodes.find(p->label.name);
        if (it != b.nodes.end()) {
          stop = it->second == t->label && children(p, t, ppos, tpos, 0, 0, k);
        } else {
          b.nodes.emplace(p->label.name, t->label);
          stop = children(p, t, ppos, tpos, 0, 0, k);
          b.nodes.erase(p->label.name);
        }
        break;
      }
      case Kind::Const:
        stop = p->label.name == t->label && children(p, t, ppos, tpos, 0, 0, k);
        break;
    }
    match_.map.pop_back();
    return stop;
  }

  bool children(const PatternNode* p, const NodePtr& t, const Position& ppos, const Position& tpos, std::size_t i, std::size_t j,
                const std::function<bool()>& k) {
    const std::size_t pk = p->kids.size(), tk = t->kids.size();
    if (i == pk) return j == tk && k();
    const PatternNode* c = p->kids[i].get();
    auto rest = [&](std::size_t nj) { return children(p, t, ppos, tpos, i + 1, nj, k); };
    Position cp = ppos;
    cp.push_back(static_cast<int>(i));
    bool stop = false;
    if (c->label.kind == Kind::IntervalVar) {
      std::size_t need = 0;
      for (std::size_t q = i + 1; q < pk; ++q)
        if (p->kids[q]->label.kind != Kind::IntervalVar) ++need;
      if (j + need <= tk) {
        std::size_t max_len = tk - j - need;
        auto& iv = match_.binding.intervals;
        auto it = iv.find(c->label.name);
        if (it != iv.end()) {
          std::size_t len = it->second.size();
          tick();
          if (len <= max_len && same_sequence(it->second, t->kids.data() + j, len)) {
            push_interval(cp, tpos, j, len);
            stop = rest(j + len);
            match_.map.pop_back();
          }
        } else {
          for (std::size_t len = 0; len <= max_len && !stop; ++len) {
            tick();
            std::vector<Tree> seq;
            for (std::size_t q = j; q < j + len; ++q) seq.push_back(Tree::from_node(t->kids[q]));
            iv.emplace(c->label.name, std::move(seq));
            push_interval(cp, tpos, j, len);
            stop = rest(j + len);
            match_.map.pop_back();
            iv.erase(c->label.name);
          }
        }
      }
    } else if (j < tk) {
      Position ct = tpos;
      ct.push_back(static_cast<int>(j));
      stop = node(c, t->kids[j], cp, ct, [&] { return rest(j + 1); });
    }
    return stop;
  }

  bool report() { return visit_(match_); }

private:
  void tick() {
    if (++decisions_ > lim_.max_decisions)
      throw BudgetExceeded("interval matching exceeded " + std::to_string(lim_.max_decisions) + " decisions");
  }
  void push_interval(const Position& ppos, const Position& tpos, std::size_t j, std::size_t len) {
    std::vector<Position> img;
    for (std::size_t q = j; q < j + len; ++q) {
      Position x = tpos;
      x.push_back(static_cast<int>(q));
      img.push_back(std::move(x));
    }
    match_.map.push_back({ppos, std::move(img)});
  }

  const IntervalLimits& lim_;
  const std::function<bool(const IntervalMatch&)>& visit_;
  IntervalMatch match_;
  std::uint64_t decisions_ = 0;
};

void check_interval_roots(const Pattern& body, const Pattern& head) {
  if (body.label().kind == Kind::IntervalVar || head.label().kind == Kind::IntervalVar)
    throw std::invalid_argument("an interval variable cannot be the root of a pattern");
}

}  // namespace

IntervalTransformation make_interval_transformation(std::string name, Pattern body, Pattern head) {
  check_interval_roots(body, head);
  auto bv = body.variables();
  std::set<PatternLabel> have(bv.begin(), bv.end());
  for (const auto& v : head.variables())
    if (!have.count(v)) throw std::invalid_argument("head variable " + v.to_string() + " does not occur in the body");
  return IntervalTransformation{std::move(name), std::move(body), std::move(head)};
}

IntervalTransformation parse_interval_rule(std::string_view text, const std::string& default_name) {
  std::size_t arrow = text.find("~>");
  if (arrow == std::string_view::npos) throw ParseError("missing '~>' in rule", 1, 1);
  std::string name = default_name;
  std::string_view lhs = text.substr(0, arrow);
  std::size_t colon = lhs.find(':');
  if (colon != std::string_view::npos && lhs.find('"') > colon) {
    std::string_view n = lhs.substr(0, colon);
    while (!n.empty() && std::isspace(static_cast<unsigned char>(n.front()))) n.remove_prefix(1);
    while (!n.empty() && std::isspace(static_cast<unsigned char>(n.back()))) n.remove_suffix(1);
    name = std::string(n);
    lhs = lhs.substr(colon + 1);
  }
  return make_interval_transformation(name, parse_pattern(lhs, true), parse_pattern(text.substr(arrow + 2), true));
}

std::string serialize_interval_rule(const IntervalTransformation& rho) {
  return serialize_pattern(rho.body) + " ~> " + serialize_pattern(rho.head);
}

std::uint64_t for_each_interval_match(const Pattern& p, const Tree& t, const Position& v,
                                      const std::function<bool(const IntervalMatch&)>& visit,
                                      const IntervalLimits& limits) {
  if (p.label().kind == Kind::IntervalVar) throw std::invalid_argument("an interval variable cannot be a pattern root");
  Tree sub = subtree(t, v);
  Search s(limits, visit, v);
  Position ppos, tpos = v;
  s.node(p.node().get(), sub.node(), ppos, tpos, [&] { return s.report(); });
  return s.decisions();
}

std::optional<IntervalMatch> interval_match_at(const Pattern& p, const Tree& t, const Position& v,
                                               const IntervalLimits& limits) {
  std::optional<IntervalMatch> out;
  for_each_interval_match(p, t, v, [&](const IntervalMatch& m) {
    out = m;
    return true;
  }, limits);
  return out;
}

namespace {

void instantiate_into(const Pattern& head, const Binding& b, std::vector<Tree>& out) {
  const auto& l = head.label();
  switch (l.kind) {
    case Kind::IntervalVar: {
      auto it = b.intervals.find(l.name);
      if (it == b.intervals.end()) throw std::invalid_argument("unbound interval variable @" + l.name);
      out.insert(out.end(), it->second.begin(), it->second.end());
      return;
    }
    case Kind::TreeVar: {
      auto it = b.trees.find(l.name);
      if (it == b.trees.end()) throw std::invalid_argument("unbound tree variable $" + l.name);
      out.push_back(it->second);
      return;
    }
    case Kind::NodeVar:
    case Kind::Const: {
      std::string label = l.name;
      if (l.kind == Kind::NodeVar) {
        auto it = b.nodes.find(l.name);
        if (it == b.nodes.end()) throw std::invalid_argument("unbound node variable ?" + l.name);
        label = it->second;
      }
      std::vector<Tree> kids;
      for (const auto& c : head.children()) instantiate_into(c, b, kids);
      out.emplace_back(std::move(label), std::move(kids));
      return;
    }
  }
}

}  // namespace

Tree interval_instantiate(const Pattern& head, const Binding& b) {
  std::vector<Tree> out;
  instantiate_into(head, b, out);
  if (out.size() != 1) throw std::invalid_argument("head must instantiate to a single tree");
  return out.front();
}

std::vector<Tree> interval_apply_at(const IntervalTransformation& rho, const Tree& t, const Position& v,
                                    const IntervalLimits& limits) {
  std::vector<Tree> out;
  std::unordered_set<Tree, TreeHash> seen;
  Context ctx = context(t, v);
  for_each_interval_match(rho.body, t, v, [&](const IntervalMatch& m) {
    Tree r = plug(ctx, interval_instantiate(rho.head, m.binding));
    if (seen.insert(r).second) out.push_back(r);
    return false;
  }, limits);
  return out;
}

std::optional<std::pair<Position, IntervalMatch>> interval_explains(const IntervalTransformation& rho, const Tree& t,
                                                                    const Tree& t_star,
                                                                    const IntervalLimits& limits) {
  IntervalLimits remaining = limits;
  for (const auto& v : t.positions()) {
    if (!t_star.contains(v) || !contexts_isomorphic(t, v, t_star, v)) continue;
    Tree want = subtree(t_star, v);
    std::optional<IntervalMatch> hit;
    std::uint64_t spent = for_each_interval_match(rho.body, t, v, [&](const IntervalMatch& m) {
      if (interval_instantiate(rho.head, m.binding) == want) {
        hit = m;
        return true;
      }
      return false;
    }, remaining);
    if (hit) return std::make_pair(v, std::move(*hit));
    remaining.max_decisions -= std::min(spent, remaining.max_decisions);
  }
  return std::nullopt;
}

std::optional<std::vector<IntervalStep>> interval_explains_in_steps(const std::vector<IntervalTransformation>& gamma,
                                                                    const Tree& t, const Tree& t_star, int s,
                                                                    const IntervalLimits& limits,
                                                                    std::uint64_t max_nodes) {
  if (t == t_star) return std::vector<IntervalStep>{};
  struct Entry {
    Tree tree;
    int parent;
    IntervalStep step;
  };
  std::vector<Entry> nodes{{t, -1, {}}};
  std::unordered_map<Tree, int, TreeHash> seen{{t, 0}};
  std::vector<int> frontier{0};
  for (int depth = 1; depth <= s && !frontier.empty(); ++depth) {
    std::vector<int> next;
    for (int idx : frontier) {
      Tree cur = nodes[idx].tree;
      for (const auto& v : cur.positions())
        for (const auto& rho : gamma)
          for (auto& r : interval_apply_at(rho, cur, v, limits)) {
            if (seen.count(r)) continue;
            int id = static_cast<int>(nodes.size());
            nodes.push_back({r, idx, IntervalStep{rho.name, v, r}});
            seen.emplace(r, id);
            if (r == t_star) {
              std::vector<IntervalStep> steps;
              for (int i = id; nodes[i].parent >= 0; i = nodes[i].parent) steps.push_back(nodes[i].step);
              std::reverse(steps.begin(), steps.end());
              return steps;
            }
            if (nodes.size() > max_nodes) throw BudgetExceeded("interval multi-step search exceeded its node budget");
            next.push_back(id);
          }
    }
    frontier = std::move(next);
  }
  return std::nullopt;
}

bool verify_interval_match(const Pattern& p, const Tree& t, const IntervalMatch& m) {
  std::map<Position, std::vector<Position>> img(m.map.begin(), m.map.end());
  auto pps = p.positions();
  if (img.size() != pps.size()) return false;
  std::set<Position> used;
  std::map<std::string, std::string> nodes;
  std::map<std::string, Tree> trees;
  std::map<std::string, std::vector<Tree>> seqs;
  for (const auto& w : pps) {
    auto it = img.find(w);
    if (it == img.end()) return false;
    const PatternNode* pn = p.find(w);
    const auto& ims = it->second;
    for (const auto& x : ims)
      if (!t.contains(x) || !used.insert(x).second) return false;  // disjoint images
    if (pn->label.kind == Kind::IntervalVar) {
      std::vector<Tree> seq;
      for (const auto& x : ims) seq.push_back(subtree(t, x));
      auto [s, fresh] = seqs.emplace(pn->label.name, seq);
      if (!fresh && !(s->second.size() == seq.size() && std::equal(seq.begin(), seq.end(), s->second.begin())))
        return false;
      continue;
    }
    if (ims.size() != 1) return false;
    const Position& x = ims.front();
    if (w.empty() && x != m.root_image) return false;
    if (pn->label.kind == Kind::TreeVar) {
      auto [s, fresh] = trees.emplace(pn->label.name, subtree(t, x));
      if (!fresh && !(s->second == subtree(t, x))) return false;
      continue;
    }
    if (pn->label.kind == Kind::Const && pn->label.name != t.label_at(x)) return false;
    if (pn->label.kind == Kind::NodeVar) {
      auto [s, fresh] = nodes.emplace(pn->label.name, t.label_at(x));
      if (!fresh && s->second != t.label_at(x)) return false;
    }
    // Children images, concatenated in pattern order, must be exactly x's children in order.
    std::vector<Position> cat;
    for (std::size_t i = 0; i < pn->kids.size(); ++i) {
      Position c = w;
      c.push_back(static_cast<int>(i));
      auto ci = img.find(c);
      if (ci == img.end()) return false;
      cat.insert(cat.end(), ci->second.begin(), ci->second.end());
    }
    int deg = subtree(t, x).degree();
    if (static_cast<int>(cat.size()) != deg) return false;
    for (int i = 0; i < deg; ++i) {
      Position want = x;
      want.push_back(i);
      if (cat[i] != want) return false;
    }
  }
  return true;
}

}  // namespace tpt
