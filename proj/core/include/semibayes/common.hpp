#pragma once

#include <stdexcept>
#include <string>

namespace semibayes {

// Error categories map onto the CLI exit-code contract:
// invalid_input -> 2, numeric_error -> 3, budget_exceeded -> 4.
class invalid_input : public std::runtime_error {
 public:
  explicit invalid_input(const std::string& msg) : std::runtime_error(msg) {}
};

class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

class budget_exceeded : public std::runtime_error {
 public:
  explicit budget_exceeded(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace semibayes
