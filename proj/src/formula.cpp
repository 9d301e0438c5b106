// SPDX-License-Identifier: MIT
#include "tpt/formula.hpp"

#include <cctype>
#include <functional>
#include <map>
#include <unordered_set>

namespace tpt {

namespace {

enum class Tok { Var, True, False, Not, And, Or, Imp, Iff, LParen, RParen, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t col;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto starts = [&](std::string_view w) { return s.substr(i, w.size()) == w; };
  while (i < s.size()) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    std::size_t col = i;
    if (std::isalpha(c)) {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      std::string w(s.substr(i, j - i));
      i = j;
      if (w == "true") out.push_back({Tok::True, w, col});
      else if (w == "false") out.push_back({Tok::False, w, col});
      else if (std::isupper(static_cast<unsigned char>(w[0])) && w.find('_') == std::string::npos)
        out.push_back({Tok::Var, w, col});
      else throw FormulaError("unknown word '" + w + "'", col);
      continue;
    }
    if (c == '0' || c == '1') {
      if (i + 1 < s.size() && std::isalnum(static_cast<unsigned char>(s[i + 1])))
        throw FormulaError("unexpected number", col);
      out.push_back({c == '1' ? Tok::True : Tok::False, std::string(1, s[i]), col});
      ++i;
      continue;
    }
    if (starts("<->")) {
      out.push_back({Tok::Iff, "<->", col});
      i += 3;
    } else if (starts("->")) {
      out.push_back({Tok::Imp, "->", col});
      i += 2;
    } else if (starts("⊤")) {
      out.push_back({Tok::True, "⊤", col});
      i += 3;
    } else if (starts("⊥")) {
      out.push_back({Tok::False, "⊥", col});
      i += 3;
    } else if (c == '!' || c == '&' || c == '|' || c == '(' || c == ')') {
      Tok k = c == '!' ? Tok::Not : c == '&' ? Tok::And : c == '|' ? Tok::Or : c == '(' ? Tok::LParen : Tok::RParen;
      out.push_back({k, std::string(1, s[i]), col});
      ++i;
    } else {
      throw FormulaError(std::string("unexpected character '") + s[i] + "'", col);
    }
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

class Parser {
public:
  Parser(std::vector<Token> toks, const FormulaOptions& opts) : toks_(std::move(toks)), opts_(opts) {}

  Tree parse() {
    Tree t = iff();
    if (peek().kind != Tok::End) throw FormulaError("unexpected '" + peek().text + "'", peek().col);
    return t;
  }

private:
  const Token& peek() const { return toks_[pos_]; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    ++pos_;
    return true;
  }

  Tree iff() {
    Tree lhs = imp();
    if (!accept(Tok::Iff)) return lhs;
    Tree rhs = imp();
    if (peek().kind == Tok::Iff) throw FormulaError("ambiguous chain of <->", peek().col);
    return Tree("iff", {lhs, rhs});
  }

  Tree imp() {
    Tree lhs = disj();
    if (!accept(Tok::Imp)) return lhs;
    return Tree("imp", {lhs, imp()});
  }

  Tree chain(Tok op, const std::string& label, Tree (Parser::*next)()) {
    std::vector<Tree> items{(this->*next)()};
    while (accept(op)) items.push_back((this->*next)());
    if (items.size() == 1) return items[0];
    if (opts_.nary) return Tree(label, std::move(items));
    Tree acc = items[0];
    for (std::size_t i = 1; i < items.size(); ++i) acc = Tree(label, {acc, items[i]});
    return acc;
  }

  Tree disj() { return chain(Tok::Or, "or", &Parser::conj); }
  Tree conj() { return chain(Tok::And, "and", &Parser::unary); }

  Tree unary() {
    if (accept(Tok::Not)) return Tree("not", {unary()});
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Var:
        ++pos_;
        return Tree(t.text);
      case Tok::True:
        ++pos_;
        return Tree("true");
      case Tok::False:
        ++pos_;
        return Tree("false");
      case Tok::LParen: {
        ++pos_;
        Tree inner = iff();
        if (!accept(Tok::RParen)) throw FormulaError("expected ')'", peek().col);
        return inner;
      }
      case Tok::End:
        throw FormulaError("unexpected end of formula", t.col);
      default:
        throw FormulaError("unexpected '" + t.text + "'", t.col);
    }
  }

  std::vector<Token> toks_;
  FormulaOptions opts_;
  std::size_t pos_ = 0;
};

int precedence(const std::string& label) {
  if (label == "iff") return 1;
  if (label == "imp") return 2;
  if (label == "or") return 3;
  if (label == "and") return 4;
  if (label == "not") return 5;
  return 6;
}

void print_node(const Tree& t, std::string& out) {
  const std::string& l = t.label();
  int p = precedence(l);
  auto sub = [&](const Tree& c, bool paren) {
    if (paren) out += '(';
    print_node(c, out);
    if (paren) out += ')';
  };
  if (p == 6) {
    out += l;
    return;
  }
  if (p == 5) {
    out += '!';
    sub(t.child(0), precedence(t.child(0).label()) < 5);
    return;
  }
  const char* op = p == 1 ? " <-> " : p == 2 ? " -> " : p == 3 ? " | " : " & ";
  int n = t.degree();
  for (int i = 0; i < n; ++i) {
    if (i) out += op;
    int cp = precedence(t.child(i).label());
    bool paren;
    if (p == 1) paren = cp <= 1;
    else if (p == 2) paren = i == 0 ? cp <= 2 : cp < 2;
    else if (n > 2) paren = cp <= p;
    else paren = i == 0 ? cp < p : cp <= p;
    sub(t.child(i), paren);
  }
}

}  // namespace

bool is_proposition(const std::string& label) {
  if (label.empty() || !std::isupper(static_cast<unsigned char>(label[0]))) return false;
  for (char c : label)
    if (!std::isalnum(static_cast<unsigned char>(c))) return false;
  return true;
}

Tree parse_formula(std::string_view text, const FormulaOptions& opts) {
  return Parser(tokenize(text), opts).parse();
}

std::string print_formula(const Tree& t) {
  if (!is_formula_tree(t)) throw std::invalid_argument("not a formula tree: " + serialize_tree(t));
  std::string out;
  print_node(t, out);
  return out;
}

bool is_formula_tree(const Tree& t) {
  const std::string& l = t.label();
  int d = t.degree();
  bool ok;
  if (l == "not") ok = d == 1;
  else if (l == "imp" || l == "iff") ok = d == 2;
  else if (l == "and" || l == "or") ok = d >= 2;
  else ok = d == 0 && (l == "true" || l == "false" || is_proposition(l));
  if (!ok) return false;
  for (const auto& c : t.children())
    if (!is_formula_tree(c)) return false;
  return true;
}

FormulaPair unify_variables(const FormulaPair& pair) {
  std::map<std::string, std::string> names;
  std::function<void(const Tree&)> collect = [&](const Tree& t) {
    if (t.degree() == 0 && is_proposition(t.label()) && !names.count(t.label()))
      names.emplace(t.label(), "P" + std::to_string(names.size() + 1));
    for (const auto& c : t.children()) collect(c);
  };
  collect(pair.second);
  collect(pair.first);
  std::function<Tree(const Tree&)> rename = [&](const Tree& t) {
    if (t.degree() == 0) {
      auto it = names.find(t.label());
      return it == names.end() ? t : Tree(it->second);
    }
    std::vector<Tree> kids;
    for (const auto& c : t.children()) kids.push_back(rename(c));
    return Tree(t.label(), std::move(kids));
  };
  return {rename(pair.first), rename(pair.second)};
}

std::vector<FormulaPair> unify_variables(const std::vector<FormulaPair>& pairs) {
  std::vector<FormulaPair> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(unify_variables(p));
  return out;
}

std::vector<FormulaPair> distinct_pairs(const std::vector<FormulaPair>& pairs) {
  std::unordered_set<std::string> seen;
  std::vector<FormulaPair> out;
  for (const auto& p : pairs)
    if (seen.insert(serialize_tree(p.first) + "\n" + serialize_tree(p.second)).second) out.push_back(p);
  return out;
}

std::vector<FormulaPair> parse_dataset(std::string_view text, const FormulaOptions& opts) {
  std::vector<FormulaPair> out;
  std::size_t start = 0;
  int line_no = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos || line[first] == '#') continue;
    std::size_t sep = line.find(":::");
    if (sep == std::string_view::npos) throw ParseError("missing ':::' separator", line_no, 1);
    try {
      out.emplace_back(parse_formula(line.substr(0, sep), opts), parse_formula(line.substr(sep + 3), opts));
    } catch (const FormulaError& e) {
      throw ParseError(e.what(), line_no, 1);
    }
  }
  return out;
}

LearningInstance ingest_dataset(std::string_view text, const IngestOptions& opts) {
  auto pairs = parse_dataset(text, opts.formula);
  if (opts.unify) pairs = unify_variables(pairs);
  if (opts.dedupe) pairs = distinct_pairs(pairs);
  LearningInstance inst;
  inst.pairs = std::move(pairs);
  inst.steps = opts.steps;
  inst.rules = opts.rules;
  inst.ratio = opts.ratio;
  validate_instance(inst);
  return inst;
}

std::string either_or_dataset() {
  return R"(# attempt ::: solution
# operator in place of the exclusive or
A & B ::: !(A <-> B)
A | (B & C) ::: !(A <-> B & C)
(A -> B) -> C ::: !((A -> B) <-> C)
(A | B) <-> C ::: !(A | B <-> C)
A | !B ::: !(A <-> !B)
(A & B) & (C & D) ::: !(A & B <-> C & D)
# operator with a negated right operand
A & !B ::: !(A <-> B)
A | !(B | C) ::: !(A <-> B | C)
(A & B) & !C ::: !(A & B <-> C)
A -> !(B & C) ::: !(A <-> B & C)
!A | !B ::: !(!A <-> B)
# both directions spelled out with the wrong connectives
(A | !B) & (B | !A) ::: !(A <-> B)
(A -> !B) & (B -> !A) ::: !(A <-> B)
((A & C) | !B) & (B | !(A & C)) ::: !(A & C <-> B)
(A -> !(B | C)) & ((B | C) -> !A) ::: !(A <-> B | C)
# negation outside instead of inside
!(A & !B) ::: !(A <-> B)
!(A | !(B & C)) ::: !(A <-> B & C)
!((A -> C) -> !B) ::: !(A -> C <-> B)
!(!A & !B) ::: !(!A <-> B)
# repeats under other names
S & I ::: !(S <-> I)
Q & !R ::: !(Q <-> R)
!(X & !Y) ::: !(X <-> Y)
)";
}

}  // namespace tpt
