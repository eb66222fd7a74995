#pragma once

#include "zar/command.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace zar {

/// Parses a cpGCL program. Throws SyntaxError (kind SyntaxError or
/// ArityError) with a 1-based line and column.
Command parse_program(std::string_view text);
Expr parse_expr(std::string_view text);

/// Canonical text; `parse_program(pretty_print(c)) == c` for every AST.
std::string pretty_print(const Command& c);
std::string pretty_print(const Expr& e);

/// A `.zar` file: the program plus its header pragmas.
///
///   #param p = 2/3     default binding in the initial state
///   #out h             variable reported by sampling commands
struct SourceFile {
  Command program;
  std::vector<std::pair<Symbol, Value>> params;
  std::optional<Symbol> out;

  // Pragma defaults with `overrides` applied on top, as an initial state.
  State initial_state(const std::vector<std::pair<Symbol, Value>>& overrides = {}) const;
};

SourceFile parse_source(std::string_view text);

// Parses "name=value" as given to --param.
std::pair<Symbol, Value> parse_binding(std::string_view text);

}  // namespace zar
