#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "edbc/ast.hpp"

namespace edbc {

/// Syntax, placement or contract-validation error in a source text.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& message)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}
  /// For checks on the AST, which carries no source positions.
  explicit ParseError(const std::string& message) : std::runtime_error(message), line_(0), column_(0) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Parses one `.edl` module. Contract directives are attached to the
/// function they annotate, `-spec` attributes become Spec contracts and the
/// result is validated (see validate_module).
ModuleAst parse_module(std::string_view source);

/// Parses a single expression, e.g. a CLI argument term.
ExprRef parse_expr(std::string_view source);

/// Parses a comma-separated sequence of expressions (possibly empty).
std::vector<ExprRef> parse_expr_list(std::string_view source);

/// Post-parse checks on contract bodies: `?P(i)` only inside contract
/// functions with 1 <= i <= arity, `?R` only in postconditions, decreasing
/// parameters distinct and in range. Throws ParseError.
void validate_module(const ModuleAst& m);

}  // namespace edbc
