#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "chr/ast.hpp"

namespace chr {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, ast::SourceLoc loc);

  ast::SourceLoc where() const { return loc_; }
  // Message without the "line:col: " prefix.
  const std::string& reason() const { return reason_; }

 private:
  std::string reason_;
  ast::SourceLoc loc_;
};

// Grammar (see docs/grammar.md):
//   Name @ H <=> G | B.      simplification
//   Name @ H ==> G | B.      propagation
//   Name @ K \ R <=> G | B.  simpagation
// `Name @` and `G |` are optional; `%` starts a line comment.
ast::Program parse_program(std::string_view text);

// Comma-separated goal terminated by `.`. Variables are shared by name.
ast::Query parse_query(std::string_view text);

struct Warning {
  enum class Kind { ArityMismatch, DeadRule, UnboundVariable };
  Kind kind;
  std::size_t rule_index;  // rules.size() when not tied to a rule
  std::string message;
};

std::vector<Warning> validate_program(const ast::Program& program);

}  // namespace chr
