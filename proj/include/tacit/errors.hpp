#pragma once

#include <stdexcept>
#include <string>

namespace tacit {

// Invalid or inconsistent user input (shapes, ranges, malformed files).
class input_error : public std::runtime_error {
 public:
  explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

// A requested computation exceeds the configured work budget.
class budget_error : public std::runtime_error {
 public:
  explicit budget_error(const std::string& what) : std::runtime_error(what) {}
};

// Internal numerical failure (lost hermiticity, failed convergence, ...).
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tacit
