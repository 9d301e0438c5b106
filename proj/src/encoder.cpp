// SPDX-License-Identifier: MIT
#include "tpt/encoder.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <unordered_map>

#include "tpt/errors.hpp"

namespace tpt {

int Skeleton::concat(int a, int w) const {
  if (a < 0 || w < 0) return -1;
  for (int c : pos[w]) {
    a = child(a, c);
    if (a < 0) return -1;
  }
  return a;
}

int Skeleton::index_of(const Position& p) const {
  if (pos.empty()) return -1;
  int a = 0;
  for (int c : p) {
    if (c < 0) return -1;
    a = child(a, c);
    if (a < 0) return -1;
  }
  return a;
}

Skeleton make_skeleton(int d, int h, std::size_t cap) {
  Skeleton s;
  s.d = d;
  s.h = h;
  double count = 0, layer = 1;
  for (int k = 0; k <= h; ++k) {
    count += layer;
    layer *= std::max(d, 0);
    if (count > static_cast<double>(cap)) break;
  }
  if (count > static_cast<double>(cap))
    throw EncodingTooLarge("skeleton exceeds " + std::to_string(cap) + " positions (degree " + std::to_string(d) +
                           ", depth " + std::to_string(h) + ")");
  std::function<void(Position&, int)> build = [&](Position& p, int parent) {
    int id = static_cast<int>(s.pos.size());
    s.pos.push_back(p);
    s.parent.push_back(parent);
    s.depth.push_back(static_cast<int>(p.size()));
    s.kids.resize(s.pos.size() * std::max(d, 1), -1);
    if (parent >= 0) s.kids[static_cast<std::size_t>(parent) * d + p.back()] = id;
    if (static_cast<int>(p.size()) < h) {
      for (int c = 0; c < d; ++c) {
        p.push_back(c);
        build(p, id);
        p.pop_back();
      }
    }
  };
  Position root;
  build(root, -1);
  return s;
}

namespace {

constexpr int kTrueLit = std::numeric_limits<int>::max();
constexpr int kFalseLit = -kTrueLit;

enum Side { kBody = 0, kHead = 1 };

std::uint64_t pack(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d, std::uint64_t e) {
  return (a << 48) ^ (b << 42) ^ (c << 36) ^ (d << 18) ^ e;
}

class Encoder {
public:
  Encoder(Encoding& e) : e_(e), sk_(e.skel), f_(e.cnf), reg_(e.registry) {}

  void run() {
    const auto& inst = e_.instance;
    n_ = static_cast<int>(inst.pairs.size());
    r_ = inst.rules;
    s_ = inst.steps;
    V_ = sk_.size();
    S_ = e_.sigma();
    ncodes_ = S_ + 2 * V_ + 1;
    ratio_mode_ = inst.ratio < 1.0;
    if (static_cast<double>(r_) * 2 * V_ * ncodes_ > 6e7)
      throw EncodingTooLarge("rule encoding would need more than 6e7 label slots");
    prepare_pairs();
    if (ratio_mode_)
      for (int i = 0; i < n_; ++i) sel_.push_back(reg_.get(f_, "sel", {i}));
    compute_domains();
    for (int j = 0; j < r_; ++j) syntax(j);
    if (e_.options.symmetry_breaking)
      for (int j = 0; j + 1 < r_; ++j) lex_leq(j, j + 1);
    if (e_.layered) {
      for (int i = 0; i < n_; ++i) layered_pair(i);
    } else {
      for (int i = 0; i < n_; ++i) single_pair(i);
    }
    if (ratio_mode_) {
      add_at_least_k(f_, sel_, inst.required_pairs());
      for (int i = 0; i < n_; ++i)
        if (pd_[i].identical) clause({sel_[i]});
    }
  }

private:
  struct PairData {
    std::vector<int> src, tgt;          // label code per slot, S_ when absent
    std::vector<int> src_sub, tgt_sub;  // subtree class per slot, -1 when absent
    bool identical = false;
    std::vector<int> candidates;  // single-step application positions
    std::vector<char> in_layer_dom;  // per label, for variable layers
  };

  // ---- clause helpers -------------------------------------------------------
  void clause(std::initializer_list<int> lits) { clause_vec(std::vector<int>(lits)); }
  void clause_vec(std::vector<int> lits) {
    std::size_t k = 0;
    for (int l : lits) {
      if (l == kTrueLit) return;
      if (l == kFalseLit) continue;
      lits[k++] = l;
    }
    lits.resize(k);
    if (lits.empty()) {
      if (!false_var_) {
        false_var_ = reg_.get(f_, "false", {});
        f_.add_clause({-false_var_});
      }
      f_.add_clause({false_var_});
      return;
    }
    f_.add_clause(lits);
  }
  void exactly_one(const std::vector<int>& lits) {
    std::vector<int> live;
    for (int l : lits)
      if (l != kFalseLit) live.push_back(l);
    clause_vec(live);
    at_most_one(live);
  }
  void at_most_one(const std::vector<int>& lits) {
    if (lits.size() <= 64) {
      for (std::size_t a = 0; a < lits.size(); ++a)
        for (std::size_t b = a + 1; b < lits.size(); ++b) clause({-lits[a], -lits[b]});
      return;
    }
    const std::size_t n = lits.size();
    std::vector<int> s(n - 1);
    for (auto& v : s) v = f_.new_var();
    clause({-lits[0], s[0]});
    for (std::size_t i = 1; i + 1 < n; ++i) {
      clause({-lits[i], s[i]});
      clause({-s[i - 1], s[i]});
      clause({-lits[i], -s[i - 1]});
    }
    clause({-lits[n - 1], -s[n - 2]});
  }

  // ---- instance preprocessing ----------------------------------------------
  int subtree_class(const Tree& t) {
    auto [it, fresh] = classes_.try_emplace(t, static_cast<int>(classes_.size()));
    return it->second;
  }

  void fill(const Tree& t, std::vector<int>& lab, std::vector<int>& sub) {
    lab.assign(V_, S_);
    sub.assign(V_, -1);
    for (const auto& p : t.positions()) {
      int a = sk_.index_of(p);
      lab[a] = e_.label_code(t.label_at(p));
      sub[a] = subtree_class(subtree(t, p));
    }
  }

  void prepare_pairs() {
    pd_.resize(n_);
    const auto& opts = e_.options;
    if (opts.fixed_positions && opts.fixed_positions->size() != static_cast<std::size_t>(n_))
      throw std::invalid_argument("fixed positions: expected one position per pair");
    for (int i = 0; i < n_; ++i) {
      const auto& [t, ts] = e_.instance.pairs[i];
      auto& p = pd_[i];
      fill(t, p.src, p.src_sub);
      fill(ts, p.tgt, p.tgt_sub);
      // with prescribed positions every pair needs its application
      p.identical = t == ts && !opts.fixed_positions;
      if (!e_.layered) {
        std::vector<Position> cand;
        if (opts.fixed_positions) cand.push_back((*opts.fixed_positions)[i]);
        else cand = t.positions();
        for (const auto& v : cand)
          if (t.contains(v) && ts.contains(v) && contexts_isomorphic(t, v, ts, v))
            p.candidates.push_back(sk_.index_of(v));
      }
      p.in_layer_dom.assign(S_, opts.per_pair_alphabet ? 0 : 1);
      if (opts.per_pair_alphabet) {
        for (int a = 0; a < V_; ++a) {
          if (p.src[a] < S_) p.in_layer_dom[p.src[a]] = 1;
          if (p.tgt[a] < S_) p.in_layer_dom[p.tgt[a]] = 1;
        }
      }
    }
  }

  // ---- rule syntax ----------------------------------------------------------
  bool is_const(int code) const { return code < S_; }
  bool is_node_var(int code) const { return code >= S_ && code < S_ + V_; }
  bool is_tree_var(int code) const { return code >= S_ + V_ && code < S_ + 2 * V_; }
  int slot_of(int code) const { return is_node_var(code) ? code - S_ : code - S_ - V_; }
  int U() const { return ncodes_ - 1; }

  bool ancestor(int u, int w) const {  // u proper ancestor of w
    for (int a = sk_.parent[w]; a >= 0; a = sk_.parent[a])
      if (a == u) return true;
    return false;
  }

  void compute_domains() {
    dom_[kBody].assign(V_, {});
    dom_[kHead].assign(V_, {});
    const bool single = !e_.layered;
    // For single-step encodings, label options are pruned to those consistent with
    // at least one admissible application; a rule used by no pair can always be
    // replaced by one inside the pruned domains.
    std::vector<std::set<int>> bconst(V_), hconst(V_);
    std::vector<std::vector<char>> bx, by, hx, hy;
    std::vector<char> breach(V_, 0), hreach(V_, 0);
    if (single) {
      bx.assign(V_, std::vector<char>(V_, 0));
      by = bx;
      hx = bx;
      hy = bx;
      for (int i = 0; i < n_; ++i) {
        const auto& p = pd_[i];
        if (p.identical) continue;
        for (int v : p.candidates) {
          for (int w = 0; w < V_; ++w) {
            int a = sk_.concat(v, w);
            if (a >= 0 && p.src[a] < S_) {
              breach[w] = 1;
              bconst[w].insert(p.src[a]);
              for (int u = 0; u <= w; ++u) {
                int b = sk_.concat(v, u);
                if (b < 0 || p.src[b] >= S_) continue;
                if (p.src[b] == p.src[a]) bx[w][u] = 1;
                if (p.src_sub[b] == p.src_sub[a]) by[w][u] = 1;
              }
            }
            if (a >= 0 && p.tgt[a] < S_) {
              hreach[w] = 1;
              hconst[w].insert(p.tgt[a]);
              for (int u = 0; u < V_; ++u) {
                int b = sk_.concat(v, u);
                if (b < 0 || p.src[b] >= S_) continue;
                if (p.src[b] == p.tgt[a]) hx[w][u] = 1;
                if (p.src_sub[b] == p.tgt_sub[a]) hy[w][u] = 1;
              }
            }
          }
        }
      }
      breach[0] = hreach[0] = 1;
    }
    for (int w = 0; w < V_; ++w) {
      auto& bd = dom_[kBody][w];
      auto& hd = dom_[kHead][w];
      if (!single || breach[w]) {
        for (int c = 0; c < S_; ++c)
          if (!single || bconst[w].count(c)) bd.push_back(c);
        for (int u = 0; u <= w; ++u)
          if (!single || bx[w][u] || u == w) bd.push_back(S_ + u);
        for (int u = 0; u <= w; ++u)
          if (!ancestor(u, w) && (!single || by[w][u] || u == w)) bd.push_back(S_ + V_ + u);
      }
      if (w != 0) bd.push_back(U());
      if (!single || hreach[w]) {
        for (int c = 0; c < S_; ++c)
          if (!single || hconst[w].count(c)) hd.push_back(c);
        for (int u = 0; u < V_; ++u)
          if (!single || hx[w][u]) hd.push_back(S_ + u);
        for (int u = 0; u < V_; ++u)
          if (!single || hy[w][u]) hd.push_back(S_ + V_ + u);
      }
      if (w != 0) hd.push_back(U());
    }
    // Root of the body can always introduce x_root, and the head can reuse it.
    auto ensure = [](std::vector<int>& d, int code) {
      if (std::find(d.begin(), d.end(), code) == d.end()) d.insert(d.begin(), code);
    };
    ensure(dom_[kBody][0], S_);
    ensure(dom_[kHead][0], S_);
    for (int side : {kBody, kHead}) {
      lit_[side].assign(static_cast<std::size_t>(r_) * V_ * ncodes_, 0);
      tv_[side].assign(static_cast<std::size_t>(r_) * V_, kFalseLit);
    }
  }

  int& slot(int side, int j, int w, int code) {
    return lit_[side][(static_cast<std::size_t>(j) * V_ + w) * ncodes_ + code];
  }
  // Literal for "rule j, side, slot w carries code"; kFalseLit outside the domain.
  int R(int side, int j, int w, int code) {
    if (w < 0) return code == U() ? kTrueLit : kFalseLit;
    int v = slot(side, j, w, code);
    return v ? v : kFalseLit;
  }
  int TV(int side, int j, int w) { return tv_[side][static_cast<std::size_t>(j) * V_ + w]; }

  void syntax(int j) {
    for (int side : {kBody, kHead})
      for (int w = 0; w < V_; ++w)
        for (int code : dom_[side][w])
          slot(side, j, w, code) = reg_.get(f_, side == kBody ? "body" : "head", {j, w, code});
    for (int side : {kBody, kHead}) {
      for (int w = 0; w < V_; ++w) {
        std::vector<int> lits;
        std::vector<int> ys;
        for (int code : dom_[side][w]) {
          lits.push_back(R(side, j, w, code));
          if (is_tree_var(code)) ys.push_back(R(side, j, w, code));
        }
        exactly_one(lits);
        if (!ys.empty()) {
          int tv = reg_.get(f_, side == kBody ? "tvbody" : "tvhead", {j, w});
          tv_[side][static_cast<std::size_t>(j) * V_ + w] = tv;
          std::vector<int> c{-tv};
          for (int y : ys) {
            c.push_back(y);
            clause({-y, tv});
          }
          clause_vec(c);
        }
        for (int c = 0; c < sk_.d; ++c) {
          int wc = sk_.child(w, c);
          if (wc < 0) continue;
          // unused nodes have unused children; tree variables are leaves
          clause({-R(side, j, w, U()), R(side, j, wc, U())});
          clause({-TV(side, j, w), R(side, j, wc, U())});
          int next = sk_.child(w, c + 1);
          if (next >= 0) clause({-R(side, j, wc, U()), R(side, j, next, U())});
        }
        for (int code : dom_[side][w]) {
          if (is_const(code) || code == U()) continue;
          int u = slot_of(code);
          // canonical naming: the variable is introduced at slot u of the body
          if (side == kBody && u == w) continue;
          clause({-R(side, j, w, code), R(kBody, j, u, code)});
        }
      }
    }
    auto limit = [&](int count, bool tree) {
      if (count < 0 || count >= V_) return;
      std::vector<int> neg;
      for (int u = 0; u < V_; ++u) {
        int l = R(kBody, j, u, tree ? S_ + V_ + u : S_ + u);
        if (l != kFalseLit) neg.push_back(-l);
      }
      if (count < static_cast<int>(neg.size()))
        add_at_least_k(f_, neg, static_cast<int>(neg.size()) - count);
    };
    limit(e_.options.max_node_vars, false);
    limit(e_.options.max_tree_vars, true);
  }

  void lex_leq(int j1, int j2) {
    std::vector<int> x, y;
    for (int w = 0; w < V_; ++w)
      for (int code : dom_[kBody][w]) {
        x.push_back(R(kBody, j1, w, code));
        y.push_back(R(kBody, j2, w, code));
      }
    int eq = kTrueLit;  // prefix equal so far
    for (std::size_t i = 0; i < x.size(); ++i) {
      clause({-eq, -x[i], y[i]});
      if (i + 1 == x.size()) break;
      int next = f_.new_var();
      clause({-eq, x[i], y[i], next});
      clause({-eq, -x[i], -y[i], next});
      eq = next;
    }
  }

  // ---- single-step semantics ------------------------------------------------
  void single_pair(int i) {
    const auto& p = pd_[i];
    if (p.identical) return;
    std::vector<int> any;
    if (ratio_mode_) any.push_back(-sel_[i]);
    for (int j = 0; j < r_; ++j) {
      for (int v : p.candidates) {
        int m = reg_.get(f_, "map", {j, 1, v, i});
        any.push_back(m);
        single_body(p, j, v, m);
        single_head(p, j, v, m);
      }
    }
    clause_vec(any);
  }

  void single_body(const PairData& p, int j, int v, int m) {
    for (int w = 0; w < V_; ++w) {
      int a = sk_.concat(v, w);
      if (a < 0 || p.src[a] == S_) {
        clause({-m, R(kBody, j, w, U())});
        continue;
      }
      for (int code : dom_[kBody][w]) {
        bool ok = true;
        if (is_const(code)) {
          ok = p.src[a] == code;  // phi_labels
        } else if (code != U() && slot_of(code) != w) {
          int b = sk_.concat(v, slot_of(code));
          if (b < 0 || p.src[b] == S_) ok = false;
          else if (is_node_var(code)) ok = p.src[b] == p.src[a];  // phi_nodevars
          else ok = p.src_sub[b] == p.src_sub[a];                  // phi_treevars
        }
        if (!ok) clause({-m, -R(kBody, j, w, code)});
      }
      structure(kBody, j, w, a, m, p.src);
    }
  }

  void single_head(const PairData& p, int j, int v, int m) {
    for (int w = 0; w < V_; ++w) {
      int a = sk_.concat(v, w);
      if (a < 0 || p.tgt[a] == S_) {
        clause({-m, R(kHead, j, w, U())});
        continue;
      }
      for (int code : dom_[kHead][w]) {
        if (code == U()) continue;
        bool ok;
        if (is_const(code)) {
          ok = p.tgt[a] == code;  // psi_labels
        } else {
          int b = sk_.concat(v, slot_of(code));
          if (b < 0 || p.src[b] == S_) ok = false;
          else if (is_node_var(code)) ok = p.src[b] == p.tgt[a];  // psi_nodevars
          else ok = p.src_sub[b] == p.tgt_sub[a];                  // psi_treevars
        }
        if (!ok) clause({-m, -R(kHead, j, w, code)});
      }
      structure(kHead, j, w, a, m, p.tgt);
    }
  }

  // A used node that is not a tree variable has exactly the children of its image.
  void structure(int side, int j, int w, int a, int m, const std::vector<int>& lab) {
    int deg = 0;
    while (deg < sk_.d && sk_.child(a, deg) >= 0 && lab[sk_.child(a, deg)] != S_) ++deg;
    if (deg == 0) return;  // children beyond the image are excluded by the existence clauses
    int wc = sk_.child(w, deg - 1);
    clause({-m, R(side, j, w, U()), TV(side, j, w), -R(side, j, wc, U())});
  }

  // ---- layered semantics ----------------------------------------------------
  bool const_layer(int k) const { return k == 0 || (k == s_ && !ratio_mode_); }

  const std::vector<int>& layer_const(int i, int k) const { return k == 0 ? pd_[i].src : pd_[i].tgt; }

  // Literal for "layer k of pair i has label lab at slot a" (lab == S_ means absent).
  int L(int i, int k, int a, int lab) {
    if (a < 0) return lab == S_ ? kTrueLit : kFalseLit;
    if (const_layer(k)) return layer_const(i, k)[a] == lab ? kTrueLit : kFalseLit;
    int v = layer_[i][static_cast<std::size_t>(k) * V_ * (S_ + 1) + static_cast<std::size_t>(a) * (S_ + 1) + lab];
    return v ? v : kFalseLit;
  }

  std::vector<int> layer_labels(int i, int k, int a) const {
    std::vector<int> out;
    if (a < 0) return {S_};
    if (const_layer(k)) return {layer_const(i, k)[a]};
    for (int lab = 0; lab < S_; ++lab)
      if (pd_[i].in_layer_dom[lab]) out.push_back(lab);
    out.push_back(S_);
    return out;
  }

  int eqlab(int i, int k1, int a, int k2, int b) {
    if ((a < 0 || const_layer(k1)) && (b < 0 || const_layer(k2))) {
      int la = a < 0 ? S_ : layer_const(i, k1)[a];
      int lb = b < 0 ? S_ : layer_const(i, k2)[b];
      return la == lb ? kTrueLit : kFalseLit;
    }
    std::uint64_t key = pack(i, k1, k2, a + 1, b + 1);
    auto it = eq_.find(key);
    if (it != eq_.end()) return it->second;
    int e = reg_.get(f_, "eq", {i, k1, a, k2, b});
    eq_.emplace(key, e);
    for (int lab : layer_labels(i, k1, a)) clause({-e, -L(i, k1, a, lab), L(i, k2, b, lab)});
    return e;
  }

  bool const_subtree_equal(int i, int k1, int a, int k2, int b) {
    const auto& A = layer_const(i, k1);
    const auto& B = layer_const(i, k2);
    int la = a < 0 ? S_ : A[a], lb = b < 0 ? S_ : B[b];
    if (la != lb) return false;
    if (la == S_) return true;
    return (k1 == 0 ? pd_[i].src_sub[a] : pd_[i].tgt_sub[a]) == (k2 == 0 ? pd_[i].src_sub[b] : pd_[i].tgt_sub[b]);
  }

  int seq(int i, int k1, int a, int k2, int b) {
    if (a < 0 && b < 0) return kTrueLit;
    if ((a < 0 || const_layer(k1)) && (b < 0 || const_layer(k2)))
      return const_subtree_equal(i, k1, a, k2, b) ? kTrueLit : kFalseLit;
    std::uint64_t key = pack(i, k1 | 32, k2, a + 1, b + 1);
    auto it = eq_.find(key);
    if (it != eq_.end()) return it->second;
    int s = reg_.get(f_, "seq", {i, k1, a, k2, b});
    eq_.emplace(key, s);
    clause({-s, eqlab(i, k1, a, k2, b)});
    for (int c = 0; c < sk_.d; ++c) {
      int ac = sk_.child(a, c), bc = sk_.child(b, c);
      if (ac < 0 && bc < 0) continue;
      clause({-s, seq(i, k1, ac, k2, bc)});
    }
    return s;
  }

  void make_layer(int i, int k) {
    auto& vars = layer_[i];
    for (int a = 0; a < V_; ++a) {
      std::vector<int> lits;
      for (int lab : layer_labels(i, k, a)) {
        if (a == 0 && lab == S_) continue;  // intermediate trees are non-empty
        int v = reg_.get(f_, "int", {i, k, a, lab});
        vars[static_cast<std::size_t>(k) * V_ * (S_ + 1) + static_cast<std::size_t>(a) * (S_ + 1) + lab] = v;
        lits.push_back(v);
      }
      exactly_one(lits);
    }
    for (int a = 0; a < V_; ++a)
      for (int c = 0; c < sk_.d; ++c) {
        int ac = sk_.child(a, c);
        if (ac < 0) continue;
        clause({-L(i, k, a, S_), L(i, k, ac, S_)});
        int next = sk_.child(a, c + 1);
        if (next >= 0) clause({-L(i, k, ac, S_), L(i, k, next, S_)});
      }
  }

  void layered_pair(int i) {
    const auto& p = pd_[i];
    if (p.identical) return;
    layer_[i].assign(static_cast<std::size_t>(s_ + 1) * V_ * (S_ + 1), 0);
    for (int k = 1; k <= s_; ++k)
      if (!const_layer(k)) make_layer(i, k);
    if (ratio_mode_)
      for (int a = 0; a < V_; ++a) clause({-sel_[i], L(i, s_, a, p.tgt[a])});
    int prev_idle = 0;
    for (int k = 1; k <= s_; ++k) {
      std::vector<int> choices;
      std::vector<std::vector<int>> maps_at(V_);
      for (int v = 0; v < V_; ++v) {
        if (const_layer(k - 1) && layer_const(i, k - 1)[v] == S_) continue;
        if (const_layer(k) && layer_const(i, k)[v] == S_) continue;
        if (const_layer(k - 1) && const_layer(k) &&
            !contexts_isomorphic(e_.instance.pairs[i].first, sk_.pos[v], e_.instance.pairs[i].second, sk_.pos[v]))
          continue;
        for (int j = 0; j < r_; ++j) {
          int m = reg_.get(f_, "map", {j, k, v, i});
          choices.push_back(m);
          maps_at[v].push_back(m);
          layered_body(i, k, j, v, m);
          layered_head(i, k, j, v, m);
        }
      }
      int idle = reg_.get(f_, "idle", {i, k});
      choices.push_back(idle);
      exactly_one(choices);
      if (prev_idle) clause({-prev_idle, idle});
      prev_idle = idle;
      // steps at incomparable positions commute; keep them in pre-order
      std::vector<int> app(V_, 0);
      for (int v = 0; v < V_; ++v) {
        if (maps_at[v].empty()) continue;
        app[v] = reg_.get(f_, "app", {i, k, v});
        for (int m : maps_at[v]) clause({-m, app[v]});
      }
      for (int v = 0; v < V_ && k > 1; ++v) {
        if (!app[v]) continue;
        for (int u = v + 1; u < V_; ++u) {
          auto pu = prev_app_.find(u);
          if (pu == prev_app_.end() || is_prefix(sk_.pos[v], sk_.pos[u])) continue;
          clause({-pu->second, -app[v]});
        }
      }
      prev_app_.clear();
      for (int v = 0; v < V_; ++v)
        if (app[v]) prev_app_[v] = app[v];
      // inside(a): a lies at or below the position rewritten in step k
      std::vector<int> ins(V_);
      for (int a = 0; a < V_; ++a) {
        ins[a] = reg_.get(f_, "inside", {i, k, a});
        std::vector<int> just{-ins[a]};
        for (int m : maps_at[a]) {
          clause({-m, ins[a]});
          just.push_back(m);
        }
        if (sk_.parent[a] >= 0) {
          clause({-ins[sk_.parent[a]], ins[a]});
          just.push_back(ins[sk_.parent[a]]);
        }
        clause_vec(just);
        for (int lab : layer_labels(i, k - 1, a)) clause({ins[a], -L(i, k - 1, a, lab), L(i, k, a, lab)});
      }
    }
  }

  void layered_body(int i, int k, int j, int v, int m) {
    const int S = k - 1;
    for (int w = 0; w < V_; ++w) {
      int a = sk_.concat(v, w);
      if (a < 0) {
        clause({-m, R(kBody, j, w, U())});
        continue;
      }
      clause({-m, R(kBody, j, w, U()), -L(i, S, a, S_)});
      for (int code : dom_[kBody][w]) {
        if (code == U()) continue;
        if (is_const(code)) {
          clause({-m, -R(kBody, j, w, code), L(i, S, a, code)});
          continue;
        }
        int u = slot_of(code);
        if (u == w) continue;
        int b = sk_.concat(v, u);
        if (b < 0) {
          clause({-m, -R(kBody, j, w, code)});
          continue;
        }
        int rel = is_node_var(code) ? eqlab(i, S, b, S, a) : seq(i, S, b, S, a);
        clause({-m, -R(kBody, j, w, code), rel});
      }
      layered_structure(kBody, i, S, j, w, a, m);
    }
  }

  void layered_head(int i, int k, int j, int v, int m) {
    const int S = k - 1, T = k;
    for (int w = 0; w < V_; ++w) {
      int a = sk_.concat(v, w);
      if (a < 0) {
        clause({-m, R(kHead, j, w, U())});
        continue;
      }
      clause({-m, R(kHead, j, w, U()), -L(i, T, a, S_)});
      for (int code : dom_[kHead][w]) {
        if (code == U()) continue;
        if (is_const(code)) {
          clause({-m, -R(kHead, j, w, code), L(i, T, a, code)});
          continue;
        }
        int b = sk_.concat(v, slot_of(code));
        if (b < 0) {
          clause({-m, -R(kHead, j, w, code)});
          continue;
        }
        int rel = is_node_var(code) ? eqlab(i, S, b, T, a) : seq(i, S, b, T, a);
        clause({-m, -R(kHead, j, w, code), rel});
      }
      layered_structure(kHead, i, T, j, w, a, m);
    }
  }

  void layered_structure(int side, int i, int k, int j, int w, int a, int m) {
    for (int c = 0; c < sk_.d; ++c) {
      int wc = sk_.child(w, c);
      if (wc < 0) continue;
      int ac = sk_.child(a, c);
      int used = R(side, j, w, U()), tv = TV(side, j, w);
      clause({-m, used, tv, -L(i, k, ac, S_), R(side, j, wc, U())});
      clause({-m, used, tv, L(i, k, ac, S_), -R(side, j, wc, U())});
    }
  }

  Encoding& e_;
  const Skeleton& sk_;
  CnfFormula& f_;
  VarRegistry& reg_;
  int n_ = 0, r_ = 0, s_ = 0, V_ = 0, S_ = 0, ncodes_ = 0;
  bool ratio_mode_ = false;
  int false_var_ = 0;
  std::vector<PairData> pd_;
  std::vector<int> sel_;
  std::vector<std::vector<int>> dom_[2];
  std::vector<int> lit_[2];
  std::vector<int> tv_[2];
  std::unordered_map<Tree, int, TreeHash> classes_;
  std::unordered_map<int, std::vector<int>> layer_;
  std::unordered_map<int, int> prev_app_;
  std::unordered_map<std::uint64_t, int> eq_;
};

}  // namespace

int Encoding::label_code(const std::string& label) const {
  auto it = std::lower_bound(alphabet.begin(), alphabet.end(), label);
  if (it == alphabet.end() || *it != label) return -1;
  return static_cast<int>(it - alphabet.begin());
}

std::optional<int> Encoding::body_var(int j, const Position& w, int code) const {
  int a = skel.index_of(w);
  if (a < 0) return std::nullopt;
  return registry.find("body", {j, a, code});
}

std::optional<int> Encoding::head_var(int j, const Position& w, int code) const {
  int a = skel.index_of(w);
  if (a < 0) return std::nullopt;
  return registry.find("head", {j, a, code});
}

std::optional<int> Encoding::map_var(int j, int k, const Position& v, int pair) const {
  int a = skel.index_of(v);
  if (a < 0) return std::nullopt;
  return registry.find("map", {j, k, a, pair});
}

std::optional<int> Encoding::sel_var(int pair) const { return registry.find("sel", {pair}); }

Encoding encode(const LearningInstance& inst, const EncoderOptions& opts) {
  validate_instance(inst);
  if (inst.steps > 30) throw EncodingTooLarge("at most 30 steps are supported");
  Encoding e;
  e.instance = inst;
  e.options = opts;
  e.alphabet = inst.alphabet();
  e.layered = inst.steps > 1 || opts.force_layered;
  if (opts.fixed_positions && e.layered) throw std::invalid_argument("fixed positions need a single-step encoding");
  int d = 0, h = 0;
  for (const auto& [t, ts] : inst.pairs) {
    d = std::max({d, t.max_degree(), ts.max_degree()});
    h = std::max({h, t.height(), ts.height()});
  }
  e.skel = make_skeleton(d, h, opts.max_skeleton);
  if (e.skel.size() >= (1 << 16) || inst.pairs.size() >= (1u << 15))
    throw EncodingTooLarge("skeleton or pair count beyond the encoder's index range");
  Encoder(e).run();
  return e;
}

namespace {

int read_code(const Encoding& e, const std::vector<bool>& model, const char* kind, int j, int w) {
  int found = -1;
  const int ncodes = e.unused_code() + 1;
  for (int code = 0; code < ncodes; ++code) {
    auto v = e.registry.find(kind, {j, w, code});
    if (v && model[*v]) {
      if (found >= 0) throw DecodeError(std::string("two labels at one ") + kind + " slot");
      found = code;
    }
  }
  if (found < 0) throw DecodeError(std::string("no label at a ") + kind + " slot");
  return found;
}

}  // namespace

RuleSet decode_rules(const Encoding& e, const std::vector<bool>& model) {
  if (static_cast<int>(model.size()) < e.cnf.num_vars() + 1) throw DecodeError("model is shorter than the formula");
  const auto& sk = e.skel;
  std::vector<Transformation> rules;
  for (int j = 0; j < e.instance.rules; ++j) {
    std::vector<int> bcode(sk.size()), hcode(sk.size());
    for (int w = 0; w < sk.size(); ++w) {
      bcode[w] = read_code(e, model, "body", j, w);
      hcode[w] = read_code(e, model, "head", j, w);
    }
    std::map<int, std::string> names;
    int nx = 0, ny = 0;
    std::function<Pattern(const std::vector<int>&, int, bool)> build = [&](const std::vector<int>& code, int w,
                                                                            bool body) -> Pattern {
      int c = code[w];
      PatternLabel lab;
      if (c < e.sigma()) {
        lab = PatternLabel::constant(e.alphabet[c]);
      } else {
        auto it = names.find(c);
        if (it == names.end()) {
          if (!body) throw DecodeError("head variable absent from the body");
          bool node = c < e.sigma() + sk.size();
          it = names.emplace(c, node ? "x" + std::to_string(++nx) : "Y" + std::to_string(++ny)).first;
        }
        lab = c < e.sigma() + sk.size() ? PatternLabel::node_var(it->second) : PatternLabel::tree_var(it->second);
      }
      std::vector<Pattern> kids;
      for (int ch = 0; ch < sk.d; ++ch) {
        int wc = sk.child(w, ch);
        if (wc < 0 || code[wc] == e.unused_code()) break;
        kids.push_back(build(code, wc, body));
      }
      if (lab.kind == PatternLabel::Kind::TreeVar && !kids.empty()) throw DecodeError("tree variable with children");
      return Pattern(lab, std::move(kids));
    };
    if (bcode[0] == e.unused_code() || hcode[0] == e.unused_code()) throw DecodeError("unused rule root");
    Pattern body = build(bcode, 0, true);
    Pattern head = build(hcode, 0, false);
    rules.push_back(make_transformation("rho" + std::to_string(j + 1), std::move(body), std::move(head)));
  }
  return make_rule_set(std::move(rules));
}

namespace {

Tree layer_tree(const Encoding& e, const std::vector<bool>& model, int i, int k) {
  const auto& sk = e.skel;
  std::vector<int> lab(sk.size(), e.sigma());
  for (int a = 0; a < sk.size(); ++a)
    for (int l = 0; l <= e.sigma(); ++l) {
      auto v = e.registry.find("int", {i, k, a, l});
      if (v && model[*v]) lab[a] = l;
    }
  std::function<Tree(int)> build = [&](int a) {
    std::vector<Tree> kids;
    for (int c = 0; c < sk.d; ++c) {
      int ac = sk.child(a, c);
      if (ac < 0 || lab[ac] == e.sigma()) break;
      kids.push_back(build(ac));
    }
    return Tree(e.alphabet.at(lab[a]), std::move(kids));
  };
  if (lab[0] == e.sigma()) throw DecodeError("empty intermediate tree");
  return build(0);
}

}  // namespace

Decoded decode(const Encoding& e, const std::vector<bool>& model) {
  Decoded out;
  out.rules = decode_rules(e, model);
  const auto& inst = e.instance;
  const int s = e.layered ? inst.steps : 1;
  for (int i = 0; i < static_cast<int>(inst.pairs.size()); ++i) {
    const auto& [t, ts] = inst.pairs[i];
    auto sel = e.sel_var(i);
    if (sel && !model[*sel]) {
      out.traces.emplace_back();
      continue;
    }
    ApplicationTrace trace;
    Tree cur = t;
    if (t != ts || !e.layered) {
      for (int k = 1; k <= s; ++k) {
        int jj = -1, vv = -1;
        for (int j = 0; j < inst.rules && jj < 0; ++j)
          for (int v = 0; v < e.skel.size(); ++v) {
            auto m = e.registry.find("map", {j, k, v, i});
            if (m && model[*m]) {
              jj = j;
              vv = v;
              break;
            }
          }
        if (jj < 0) {
          if (!e.layered && t != ts) throw DecodeError("pair " + std::to_string(i + 1) + " has no application");
          continue;
        }
        const auto& rho = out.rules.rules[jj];
        const Position& v = e.skel.pos[vv];
        auto next = apply_at(rho, cur, v);
        if (!next) throw DecodeError("decoded rule does not match pair " + std::to_string(i + 1));
        if (e.layered && k < s) {
          Tree expect = layer_tree(e, model, i, k);
          if (*next != expect) throw DecodeError("intermediate tree mismatch for pair " + std::to_string(i + 1));
        }
        trace.steps.push_back({rho.name, v, *next});
        cur = *next;
        if (!e.layered) break;
      }
    }
    if (cur != ts) throw DecodeError("decoded trace does not reach the target of pair " + std::to_string(i + 1));
    if (!verify_trace(out.rules, t, ts, trace, inst.steps))
      throw DecodeError("semantic check rejects the trace of pair " + std::to_string(i + 1));
    try {
      SearchLimits lim;
      lim.max_nodes = 200000;
      if (!explains_in_steps(out.rules, t, ts, inst.steps, lim))
        throw DecodeError("search finds no explanation for pair " + std::to_string(i + 1));
    } catch (const BudgetExceeded&) {
    }
    out.traces.emplace_back(std::move(trace));
  }
  return out;
}

}  // namespace tpt
