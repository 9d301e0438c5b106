// SPDX-License-Identifier: MIT
#include "tpt/lexer.hpp"

#include <cctype>

namespace tpt::detail {

bool is_bare_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

void Lexer::skip_ws() {
  while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
}

bool Lexer::at_end() {
  skip_ws();
  return pos_ >= text_.size();
}

char Lexer::peek() {
  skip_ws();
  return pos_ < text_.size() ? text_[pos_] : '\0';
}

bool Lexer::accept(char c) {
  if (peek() == c && pos_ < text_.size()) {
    ++pos_;
    return true;
  }
  return false;
}

bool Lexer::accept(std::string_view s) {
  skip_ws();
  if (text_.substr(pos_, s.size()) == s) {
    pos_ += s.size();
    return true;
  }
  return false;
}

void Lexer::expect(char c) {
  if (!accept(c)) {
    if (pos_ >= text_.size()) fail(std::string("expected '") + c + "' but reached end of input");
    fail(std::string("expected '") + c + "' but found '" + text_[pos_] + "'");
  }
}

std::string Lexer::label(bool& quoted) {
  skip_ws();
  quoted = false;
  if (pos_ >= text_.size()) fail("expected a label but reached end of input");
  char c = text_[pos_];
  if (c == '"') {
    quoted = true;
    ++pos_;
    std::string out;
    while (true) {
      if (pos_ >= text_.size()) fail("unterminated quoted label");
      char d = text_[pos_++];
      if (d == '"') break;
      if (d == '\\') {
        if (pos_ >= text_.size()) fail("unterminated escape in quoted label");
        char e = text_[pos_++];
        if (e != '"' && e != '\\') fail(std::string("invalid escape '\\") + e + "'");
        out.push_back(e);
      } else {
        out.push_back(d);
      }
    }
    if (out.empty()) fail("empty label");
    return out;
  }
  if (c == '?' || c == '$' || c == '@') fail(std::string("reserved sigil '") + c + "' used as a plain label");
  std::size_t start = pos_;
  while (pos_ < text_.size() && is_bare_char(text_[pos_])) ++pos_;
  if (start == pos_) fail(std::string("unexpected character '") + c + "'");
  return std::string(text_.substr(start, pos_ - start));
}

std::string Lexer::bare_run() {
  std::size_t start = pos_;
  while (pos_ < text_.size() && is_bare_char(text_[pos_])) ++pos_;
  return std::string(text_.substr(start, pos_ - start));
}

void Lexer::fail(const std::string& msg) const {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) {
    if (text_[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  throw ParseError(msg, line, col);
}

}  // namespace tpt::detail
