#pragma once

#include <string_view>

#include "fcc/ast.hpp"

namespace fcc {

/// Parses a program file:
///
///   semiring fuzzy;
///   domain {lo, hi};
///   vars {x, y};
///   constraint c on (x) default 0 { (hi) -> 0.8 };
///   proc p(x) = tell(c) ->[1/2] success;
///   init par(p(x), ask(c) -> success)
///
/// Throws ParseError with the offending line and column for syntax errors,
/// unresolved names, arity mismatches and unknown domain values.
Program parse_program(std::string_view text);

}  // namespace fcc
