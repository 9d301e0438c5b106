// SPDX-License-Identifier: MIT
#include "tpt/sat.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

namespace tpt {

bool CnfFormula::add_clause(std::span<const int> lits) {
  if (lits.empty()) throw std::invalid_argument("empty clause");
  scratch_.assign(lits.begin(), lits.end());
  std::sort(scratch_.begin(), scratch_.end(), [](int a, int b) {
    int va = std::abs(a), vb = std::abs(b);
    return va != vb ? va < vb : a < b;
  });
  std::size_t n = 0;
  for (std::size_t i = 0; i < scratch_.size(); ++i) {
    int l = scratch_[i];
    if (l == 0 || std::abs(l) > nvars_) throw std::invalid_argument("clause literal " + std::to_string(l) + " out of range");
    if (n > 0 && scratch_[n - 1] == l) continue;
    if (n > 0 && scratch_[n - 1] == -l) return false;
    scratch_[n++] = l;
  }
  lits_.insert(lits_.end(), scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(n));
  offsets_.push_back(lits_.size());
  return true;
}

std::string VarName::to_string() const {
  std::string s = kind + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(args[i]);
  }
  return s + ")";
}

std::string VarRegistry::key(const std::string& kind, const std::vector<int>& args) {
  std::string k = kind;
  k.push_back('\0');
  k.append(reinterpret_cast<const char*>(args.data()), args.size() * sizeof(int));
  return k;
}

int VarRegistry::get(CnfFormula& f, const std::string& kind, const std::vector<int>& args) {
  auto [it, fresh] = ids_.try_emplace(key(kind, args), 0);
  if (fresh) {
    it->second = f.new_var();
    names_.emplace(it->second, VarName{kind, args});
  }
  return it->second;
}

std::optional<int> VarRegistry::find(const std::string& kind, const std::vector<int>& args) const {
  auto it = ids_.find(key(kind, args));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

const VarName* VarRegistry::name(int var) const {
  auto it = names_.find(var);
  return it == names_.end() ? nullptr : &it->second;
}

std::vector<int> VarRegistry::variables() const {
  std::vector<int> out;
  for (const auto& [v, _] : names_) out.push_back(v);
  std::sort(out.begin(), out.end());
  return out;
}

void add_at_least_one(CnfFormula& f, std::span<const int> lits) {
  if (lits.empty()) throw std::invalid_argument("at-least-one over an empty set");
  f.add_clause(lits);
}

void add_at_most_one(CnfFormula& f, std::span<const int> lits) {
  for (std::size_t i = 0; i < lits.size(); ++i)
    for (std::size_t j = i + 1; j < lits.size(); ++j) f.add_clause({-lits[i], -lits[j]});
}

void add_exactly_one(CnfFormula& f, std::span<const int> lits) {
  if (lits.empty()) throw std::invalid_argument("exactly-one over an empty set");
  f.add_clause(lits);
  add_at_most_one(f, lits);
}

void add_implication(CnfFormula& f, int a, int b) { f.add_clause({-a, b}); }

void add_at_least_k(CnfFormula& f, std::span<const int> lits, int k) {
  const int n = static_cast<int>(lits.size());
  if (k < 0 || k > n) throw std::invalid_argument("at-least-k needs 0 <= k <= n");
  if (k == 0) return;
  // At least k true is at most m = n - k of the negations true.
  const int m = n - k;
  if (m == 0) {
    for (int l : lits) f.add_clause({l});
    return;
  }
  if (n == 1) return;
  std::vector<int> x(lits.size());
  for (int i = 0; i < n; ++i) x[i] = -lits[i];
  // s[i][j]: at least j+1 of x[0..i] are true.
  std::vector<std::vector<int>> s(n - 1, std::vector<int>(m));
  for (auto& row : s)
    for (int& v : row) v = f.new_var();
  f.add_clause({-x[0], s[0][0]});
  for (int j = 1; j < m; ++j) f.add_clause({-s[0][j]});
  for (int i = 1; i < n - 1; ++i) {
    f.add_clause({-x[i], s[i][0]});
    for (int j = 0; j < m; ++j) f.add_clause({-s[i - 1][j], s[i][j]});
    for (int j = 1; j < m; ++j) f.add_clause({-x[i], -s[i - 1][j - 1], s[i][j]});
    f.add_clause({-x[i], -s[i - 1][m - 1]});
  }
  f.add_clause({-x[n - 1], -s[n - 2][m - 1]});
}

namespace {

using Lit = int;  // 2 * var + sign, var 0-based
constexpr int8_t kFalse = 0, kTrue = 1, kUndef = 2;

inline Lit from_dimacs(int d) { return 2 * (std::abs(d) - 1) + (d < 0 ? 1 : 0); }
inline int var_of(Lit l) { return l >> 1; }
inline Lit negate(Lit l) { return l ^ 1; }

class VarHeap {
public:
  explicit VarHeap(const std::vector<double>& act) : act_(act) {}
  void resize(int n) { pos_.assign(n, -1); }
  bool contains(int v) const { return pos_[v] >= 0; }
  bool empty() const { return heap_.empty(); }
  void insert(int v) {
    if (contains(v)) return;
    pos_[v] = static_cast<int>(heap_.size());
    heap_.push_back(v);
    up(pos_[v]);
  }
  void increased(int v) {
    if (contains(v)) up(pos_[v]);
  }
  int pop() {
    int top = heap_[0];
    heap_[0] = heap_.back();
    pos_[heap_[0]] = 0;
    heap_.pop_back();
    pos_[top] = -1;
    if (!heap_.empty()) down(0);
    return top;
  }

private:
  bool better(int a, int b) const { return act_[a] > act_[b]; }
  void up(int i) {
    int v = heap_[i];
    while (i > 0) {
      int p = (i - 1) / 2;
      if (!better(v, heap_[p])) break;
      heap_[i] = heap_[p];
      pos_[heap_[i]] = i;
      i = p;
    }
    heap_[i] = v;
    pos_[v] = i;
  }
  void down(int i) {
    int v = heap_[i];
    const int n = static_cast<int>(heap_.size());
    for (;;) {
      int c = 2 * i + 1;
      if (c >= n) break;
      if (c + 1 < n && better(heap_[c + 1], heap_[c])) ++c;
      if (!better(heap_[c], v)) break;
      heap_[i] = heap_[c];
      pos_[heap_[i]] = i;
      i = c;
    }
    heap_[i] = v;
    pos_[v] = i;
  }
  const std::vector<double>& act_;
  std::vector<int> heap_;
  std::vector<int> pos_;
};

double luby(double y, int x) {
  int size = 1, seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  double r = 1;
  for (int i = 0; i < seq; ++i) r *= y;
  return r;
}

class Cdcl {
public:
  Cdcl(int n, const SolverOptions& opts) : opts_(opts), heap_(activity_) {
    assign_.assign(n, kUndef);
    level_.assign(n, 0);
    reason_.assign(n, -1);
    phase_.assign(n, 0);
    seen_.assign(n, 0);
    activity_.assign(n, 0.0);
    watches_.resize(2 * static_cast<std::size_t>(n));
    heap_.resize(n);
    std::uint64_t s = opts.seed;
    for (int v = 0; v < n; ++v) {
      if (s) {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        activity_[v] = static_cast<double>(s % 1000) * 1e-6;
      }
      heap_.insert(v);
    }
  }

  bool add_input(std::span<const int> dimacs) {
    if (!ok_) return false;
    std::vector<Lit> c;
    for (int d : dimacs) {
      Lit l = from_dimacs(d);
      int8_t v = value(l);
      if (v == kTrue) return true;
      if (v == kFalse) continue;
      c.push_back(l);
    }
    if (c.empty()) return ok_ = false;
    if (c.size() == 1) {
      enqueue(c[0], -1);
      if (propagate() >= 0) ok_ = false;
      return ok_;
    }
    attach(new_clause(std::move(c), false));
    return true;
  }

  SolveStatus run() {
    if (!ok_) return SolveStatus::Unsat;
    max_learnts_ = std::max<double>(static_cast<double>(clauses_.size()) / 3.0, 2000.0);
    for (int restart = 0;; ++restart) {
      auto budget = static_cast<std::uint64_t>(luby(2.0, restart) * 100);
      SolveStatus st;
      if (search(budget, st)) return st;
    }
  }

  int8_t model_value(int v) const { return assign_[v]; }
  std::uint64_t conflicts = 0, decisions = 0, propagations = 0;

private:
  struct Clause {
    std::vector<Lit> lits;
    double act = 0;
    int lbd = 0;
    bool learnt = false;
    bool removed = false;
  };
  struct Watcher {
    int cref;
    Lit blocker;
  };

  int8_t value(Lit l) const {
    int8_t a = assign_[var_of(l)];
    return a == kUndef ? kUndef : static_cast<int8_t>(a ^ (l & 1));
  }
  int decision_level() const { return static_cast<int>(trail_lim_.size()); }

  int new_clause(std::vector<Lit> lits, bool learnt) {
    int cref;
    if (!free_.empty()) {
      cref = free_.back();
      free_.pop_back();
    } else {
      cref = static_cast<int>(clauses_.size());
      clauses_.emplace_back();
    }
    Clause& c = clauses_[cref];
    c.lits = std::move(lits);
    c.learnt = learnt;
    c.removed = false;
    c.act = 0;
    c.lbd = 0;
    if (learnt) learnts_.push_back(cref);
    return cref;
  }
  void attach(int cref) {
    const Clause& c = clauses_[cref];
    watches_[c.lits[0]].push_back({cref, c.lits[1]});
    watches_[c.lits[1]].push_back({cref, c.lits[0]});
  }

  void enqueue(Lit l, int reason) {
    int v = var_of(l);
    assign_[v] = static_cast<int8_t>((l & 1) ^ 1);
    level_[v] = decision_level();
    reason_[v] = reason;
    trail_.push_back(l);
  }

  int propagate() {
    int confl = -1;
    while (qhead_ < trail_.size()) {
      Lit p = trail_[qhead_++];
      Lit fl = negate(p);
      auto& ws = watches_[fl];
      ++propagations;
      std::size_t i = 0, j = 0;
      const std::size_t end = ws.size();
      while (i < end) {
        Watcher w = ws[i];
        if (value(w.blocker) == kTrue) {
          ws[j++] = ws[i++];
          continue;
        }
        Clause& c = clauses_[w.cref];
        ++i;
        if (c.lits[0] == fl) std::swap(c.lits[0], c.lits[1]);
        Lit first = c.lits[0];
        Watcher nw{w.cref, first};
        if (first != w.blocker && value(first) == kTrue) {
          ws[j++] = nw;
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < c.lits.size(); ++k) {
          if (value(c.lits[k]) != kFalse) {
            std::swap(c.lits[1], c.lits[k]);
            watches_[c.lits[1]].push_back(nw);
            moved = true;
            break;
          }
        }
        if (moved) continue;
        ws[j++] = nw;
        if (value(first) == kFalse) {
          confl = w.cref;
          qhead_ = trail_.size();
          while (i < end) ws[j++] = ws[i++];
        } else {
          enqueue(first, w.cref);
        }
      }
      ws.resize(j);
      if (confl >= 0) return confl;
    }
    return -1;
  }

  void bump_var(int v) {
    if ((activity_[v] += var_inc_) > 1e100) {
      for (double& a : activity_) a *= 1e-100;
      var_inc_ *= 1e-100;
    }
    heap_.increased(v);
  }
  void bump_clause(Clause& c) {
    if ((c.act += cla_inc_) > 1e20) {
      for (int cr : learnts_) clauses_[cr].act *= 1e-20;
      cla_inc_ *= 1e-20;
    }
  }

  std::uint32_t abstract_level(int v) const { return 1u << (level_[v] & 31); }

  bool lit_redundant(Lit p, std::uint32_t abs_levels) {
    stack_.clear();
    stack_.push_back(p);
    const std::size_t top = to_clear_.size();
    while (!stack_.empty()) {
      int v = var_of(stack_.back());
      stack_.pop_back();
      const Clause& c = clauses_[reason_[v]];
      for (std::size_t k = 1; k < c.lits.size(); ++k) {
        Lit q = c.lits[k];
        int u = var_of(q);
        if (seen_[u] || level_[u] == 0) continue;
        if (reason_[u] >= 0 && (abstract_level(u) & abs_levels)) {
          seen_[u] = 1;
          stack_.push_back(q);
          to_clear_.push_back(q);
        } else {
          for (std::size_t t = top; t < to_clear_.size(); ++t) seen_[var_of(to_clear_[t])] = 0;
          to_clear_.resize(top);
          return false;
        }
      }
    }
    return true;
  }

  void analyze(int confl, std::vector<Lit>& out, int& bt_level) {
    out.clear();
    out.push_back(-1);
    int path = 0;
    Lit p = -1;
    int index = static_cast<int>(trail_.size()) - 1;
    do {
      Clause& c = clauses_[confl];
      if (c.learnt) bump_clause(c);
      for (std::size_t k = (p == -1 ? 0 : 1); k < c.lits.size(); ++k) {
        Lit q = c.lits[k];
        int v = var_of(q);
        if (seen_[v] || level_[v] == 0) continue;
        bump_var(v);
        seen_[v] = 1;
        if (level_[v] >= decision_level()) ++path;
        else out.push_back(q);
      }
      while (!seen_[var_of(trail_[index--])]) {
      }
      p = trail_[index + 1];
      confl = reason_[var_of(p)];
      seen_[var_of(p)] = 0;
      --path;
    } while (path > 0);
    out[0] = negate(p);

    to_clear_.assign(out.begin(), out.end());
    std::uint32_t abs_levels = 0;
    for (std::size_t i = 1; i < out.size(); ++i) abs_levels |= abstract_level(var_of(out[i]));
    std::size_t j = 1;
    for (std::size_t i = 1; i < out.size(); ++i)
      if (reason_[var_of(out[i])] < 0 || !lit_redundant(out[i], abs_levels)) out[j++] = out[i];
    out.resize(j);
    for (Lit l : to_clear_) seen_[var_of(l)] = 0;

    bt_level = 0;
    if (out.size() > 1) {
      std::size_t best = 1;
      for (std::size_t i = 2; i < out.size(); ++i)
        if (level_[var_of(out[i])] > level_[var_of(out[best])]) best = i;
      std::swap(out[1], out[best]);
      bt_level = level_[var_of(out[1])];
    }
  }

  int lbd(const std::vector<Lit>& c) {
    ++stamp_;
    if (level_stamp_.size() < trail_lim_.size() + 1) level_stamp_.resize(trail_lim_.size() + 1, 0);
    int n = 0;
    for (Lit l : c) {
      int lv = level_[var_of(l)];
      if (level_stamp_[lv] != stamp_) {
        level_stamp_[lv] = stamp_;
        ++n;
      }
    }
    return n;
  }

  void cancel_until(int lvl) {
    if (decision_level() <= lvl) return;
    for (std::size_t i = trail_.size(); i-- > static_cast<std::size_t>(trail_lim_[lvl]);) {
      int v = var_of(trail_[i]);
      phase_[v] = static_cast<int8_t>(trail_[i] & 1);
      assign_[v] = kUndef;
      reason_[v] = -1;
      heap_.insert(v);
    }
    trail_.resize(trail_lim_[lvl]);
    trail_lim_.resize(lvl);
    qhead_ = trail_.size();
  }

  bool locked(int cref) const {
    const Clause& c = clauses_[cref];
    int v = var_of(c.lits[0]);
    return reason_[v] == cref && value(c.lits[0]) == kTrue;
  }

  void reduce_db() {
    std::vector<int> cand;
    std::vector<int> keep;
    for (int cr : learnts_) {
      const Clause& c = clauses_[cr];
      if (c.lbd <= 2 || locked(cr)) keep.push_back(cr);
      else cand.push_back(cr);
    }
    std::sort(cand.begin(), cand.end(), [&](int a, int b) {
      const Clause &ca = clauses_[a], &cb = clauses_[b];
      return ca.lbd != cb.lbd ? ca.lbd > cb.lbd : ca.act < cb.act;
    });
    std::size_t drop = cand.size() / 2;
    for (std::size_t i = 0; i < cand.size(); ++i) {
      if (i < drop) {
        clauses_[cand[i]].removed = true;
      } else {
        keep.push_back(cand[i]);
      }
    }
    if (drop == 0) return;
    for (auto& ws : watches_)
      ws.erase(std::remove_if(ws.begin(), ws.end(), [&](const Watcher& w) { return clauses_[w.cref].removed; }),
               ws.end());
    for (std::size_t i = 0; i < drop; ++i) {
      Clause& c = clauses_[cand[i]];
      std::vector<Lit>().swap(c.lits);
      free_.push_back(cand[i]);
    }
    learnts_ = std::move(keep);
  }

  // Returns true when finished, with the status in st; false on restart.
  bool search(std::uint64_t budget, SolveStatus& st) {
    std::uint64_t local = 0;
    std::vector<Lit> learnt;
    for (;;) {
      int confl = propagate();
      if (confl >= 0) {
        ++conflicts;
        ++local;
        if (decision_level() == 0) {
          st = SolveStatus::Unsat;
          return true;
        }
        int bt;
        analyze(confl, learnt, bt);
        int l = learnt.size() > 1 ? lbd(learnt) : 1;
        cancel_until(bt);
        if (learnt.size() == 1) {
          enqueue(learnt[0], -1);
        } else {
          int cr = new_clause(learnt, true);
          clauses_[cr].lbd = l;
          attach(cr);
          bump_clause(clauses_[cr]);
          enqueue(clauses_[cr].lits[0], cr);
        }
        var_inc_ /= 0.95;
        cla_inc_ /= 0.999;
        if (opts_.max_conflicts && conflicts >= opts_.max_conflicts) {
          st = SolveStatus::BudgetExceeded;
          return true;
        }
        if (opts_.cancel && (conflicts & 255) == 0 && opts_.cancel->load(std::memory_order_relaxed)) {
          st = SolveStatus::BudgetExceeded;
          return true;
        }
        continue;
      }
      if (local >= budget) {
        cancel_until(0);
        return false;
      }
      if (static_cast<double>(learnts_.size()) - static_cast<double>(trail_.size()) >= max_learnts_) {
        reduce_db();
        max_learnts_ *= 1.1;
      }
      int next = -1;
      while (!heap_.empty()) {
        int v = heap_.pop();
        if (assign_[v] == kUndef) {
          next = v;
          break;
        }
      }
      if (next < 0) {
        st = SolveStatus::Sat;
        return true;
      }
      ++decisions;
      trail_lim_.push_back(static_cast<int>(trail_.size()));
      enqueue(2 * next + (phase_[next] ? 1 : 0), -1);
    }
  }

  SolverOptions opts_;
  bool ok_ = true;
  std::vector<int8_t> assign_;
  std::vector<int> level_;
  std::vector<int> reason_;
  std::vector<int8_t> phase_;
  std::vector<char> seen_;
  std::vector<double> activity_;
  VarHeap heap_;
  std::vector<std::vector<Watcher>> watches_;
  std::vector<Clause> clauses_;
  std::vector<int> learnts_;
  std::vector<int> free_;
  std::vector<Lit> trail_;
  std::vector<int> trail_lim_;
  std::size_t qhead_ = 0;
  double var_inc_ = 1.0, cla_inc_ = 1.0, max_learnts_ = 0;
  std::vector<Lit> stack_, to_clear_;
  std::vector<std::uint64_t> level_stamp_;
  std::uint64_t stamp_ = 0;
};

}  // namespace

bool satisfies(const CnfFormula& f, const std::vector<bool>& model) {
  if (static_cast<int>(model.size()) < f.num_vars() + 1) return false;
  for (std::size_t i = 0; i < f.num_clauses(); ++i) {
    bool ok = false;
    for (int l : f.clause(i))
      if (l > 0 ? model[l] : !model[-l]) {
        ok = true;
        break;
      }
    if (!ok) return false;
  }
  return true;
}

SolveResult solve(const CnfFormula& f, const SolverOptions& opts) {
  SolveResult res;
  Cdcl s(f.num_vars(), opts);
  bool ok = true;
  for (std::size_t i = 0; i < f.num_clauses() && ok; ++i) ok = s.add_input(f.clause(i));
  res.status = ok ? s.run() : SolveStatus::Unsat;
  res.conflicts = s.conflicts;
  res.decisions = s.decisions;
  res.propagations = s.propagations;
  if (res.status == SolveStatus::Sat) {
    res.model.assign(static_cast<std::size_t>(f.num_vars()) + 1, false);
    for (int v = 0; v < f.num_vars(); ++v) res.model[v + 1] = s.model_value(v) == kTrue;
    if (!satisfies(f, res.model)) throw std::logic_error("solver produced a model that violates a clause");
  }
  return res;
}

std::string export_dimacs(const CnfFormula& f) {
  std::string out = "p cnf " + std::to_string(f.num_vars()) + " " + std::to_string(f.num_clauses()) + "\n";
  out.reserve(out.size() + f.num_literals() * 6);
  for (std::size_t i = 0; i < f.num_clauses(); ++i) {
    for (int l : f.clause(i)) {
      out += std::to_string(l);
      out += ' ';
    }
    out += "0\n";
  }
  return out;
}

CnfFormula parse_dimacs(std::string_view text) {
  CnfFormula f;
  std::istringstream in{std::string(text)};
  std::string line;
  bool header = false;
  std::vector<int> cur;
  long declared = -1;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == 'c' || line[0] == '%') continue;
    std::istringstream ls(line);
    if (line[0] == 'p') {
      std::string p, cnf;
      int v;
      ls >> p >> cnf >> v >> declared;
      if (!ls || cnf != "cnf" || v < 0 || declared < 0) throw std::invalid_argument("malformed DIMACS header: " + line);
      f.ensure_vars(v);
      header = true;
      continue;
    }
    if (!header) throw std::invalid_argument("DIMACS clause before the header");
    std::string tok;
    while (ls >> tok) {
      char* endp = nullptr;
      long x = std::strtol(tok.c_str(), &endp, 10);
      if (*endp) throw std::invalid_argument("malformed DIMACS literal: " + tok);
      if (x == 0) {
        if (cur.empty()) throw std::invalid_argument("empty clause in DIMACS input");
        f.add_clause(cur);
        cur.clear();
      } else {
        cur.push_back(static_cast<int>(x));
      }
    }
  }
  if (!cur.empty()) throw std::invalid_argument("unterminated DIMACS clause");
  if (!header) throw std::invalid_argument("missing DIMACS header");
  return f;
}

SolveResult import_model(std::string_view text, int num_vars) {
  SolveResult res;
  res.status = SolveStatus::BudgetExceeded;
  res.model.assign(static_cast<std::size_t>(num_vars) + 1, false);
  bool any_v = false;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == 'c') continue;
    std::istringstream ls(line);
    std::string head;
    ls >> head;
    if (head == "s") {
      std::string st;
      ls >> st;
      if (st == "SATISFIABLE") res.status = SolveStatus::Sat;
      else if (st == "UNSATISFIABLE") res.status = SolveStatus::Unsat;
      else if (st == "UNKNOWN") res.status = SolveStatus::BudgetExceeded;
      else throw std::invalid_argument("malformed status line: " + line);
      continue;
    }
    if (head != "v") throw std::invalid_argument("malformed model line: " + line);
    any_v = true;
    std::string tok;
    while (ls >> tok) {
      char* endp = nullptr;
      long x = std::strtol(tok.c_str(), &endp, 10);
      if (*endp) throw std::invalid_argument("malformed model literal: " + tok);
      if (x == 0) continue;
      if (std::labs(x) > num_vars) throw std::invalid_argument("model references unknown variable " + tok);
      res.model[std::labs(x)] = x > 0;
    }
  }
  if (any_v && res.status == SolveStatus::BudgetExceeded) res.status = SolveStatus::Sat;
  if (res.status != SolveStatus::Sat) res.model.clear();
  return res;
}

SolveResult solve_external(const CnfFormula& f, const std::string& command_template) {
  std::string dir = std::filesystem::temp_directory_path().string();
  std::string path = dir + "/tpt-" + std::to_string(::getpid()) + "-" +
                     std::to_string(reinterpret_cast<std::uintptr_t>(&f)) + ".cnf";
  {
    std::ofstream out(path);
    out << export_dimacs(f);
    if (!out) throw std::runtime_error("cannot write " + path);
  }
  std::string cmd = command_template;
  auto at = cmd.find("{cnf}");
  if (at == std::string::npos) cmd += " " + path;
  else cmd.replace(at, 5, path);
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) {
    std::filesystem::remove(path);
    throw std::runtime_error("cannot run external solver: " + cmd);
  }
  std::string output;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) output.append(buf, n);
  ::pclose(pipe);
  std::filesystem::remove(path);
  SolveResult res = import_model(output, f.num_vars());
  if (res.sat() && !satisfies(f, res.model)) throw std::runtime_error("external solver model violates a clause");
  return res;
}

}  // namespace tpt
