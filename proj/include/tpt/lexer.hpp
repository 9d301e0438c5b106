// SPDX-License-Identifier: MIT
#pragma once

#include <string>
#include <string_view>

#include "tpt/tree.hpp"

namespace tpt::detail {

// Shared scanner for the tree, pattern and rule text formats.
class Lexer {
public:
  explicit Lexer(std::string_view text) : text_(text) {}

  void skip_ws();
  bool at_end();
  char peek();
  bool accept(char c);
  bool accept(std::string_view s);
  void expect(char c);
  // Reads a bare or quoted label; sets quoted accordingly.
  std::string label(bool& quoted);
  // Bare characters at the cursor, without skipping whitespace.
  std::string bare_run();
  [[noreturn]] void fail(const std::string& msg) const;
  std::size_t offset() const { return pos_; }

private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

bool is_bare_char(char c);

}  // namespace tpt::detail
