// SPDX-License-Identifier: Apache-2.0
#ifndef CQA_ERRORS_HPP
#define CQA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cqa {

/// Malformed input text (CSV, constraint DSL, query DSL). Carries a
/// 1-based line and column when known; 0 means "not applicable".
class ParseError : public std::runtime_error {
public:
  ParseError(std::string msg, std::size_t line = 0, std::size_t column = 0)
      : std::runtime_error(format(msg, line, column)),
        line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

private:
  static std::string format(const std::string& msg, std::size_t line,
                            std::size_t column) {
    if (line == 0) return msg;
    std::string s = "line " + std::to_string(line);
    if (column != 0) s += ", column " + std::to_string(column);
    return s + ": " + msg;
  }

  std::size_t line_;
  std::size_t column_;
};

/// Ill-typed term, atom or formula (Sym/Num mismatch, order comparison on
/// symbols, constant in a position of the wrong type, ...).
class TypeError : public std::runtime_error {
public:
  explicit TypeError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A caller broke an operation's contract (non-independent seed set,
/// strategy/fragment mismatch, missing binding, ...).
class InvalidArgument : public std::invalid_argument {
public:
  explicit InvalidArgument(const std::string& msg)
      : std::invalid_argument(msg) {}
};

/// An exact computation would exceed its configured resource budget.
/// Raised instead of returning a possibly wrong or partial answer.
class BudgetError : public std::runtime_error {
public:
  explicit BudgetError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace cqa

#endif  // CQA_ERRORS_HPP
