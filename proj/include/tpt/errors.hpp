// SPDX-License-Identifier: MIT
#pragma once

#include <stdexcept>
#include <string>

namespace tpt {

// Raised when a configured search budget runs out before an answer is known.
class BudgetExceeded : public std::runtime_error {
public:
  explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tpt
