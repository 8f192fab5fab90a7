#pragma once

#include <string>

#include "simdsl/ast.hpp"

namespace simdsl {

// Canonical, deterministic formatting: one statement per line, four-space
// indentation, a single space around '=' and binary/comparison operators,
// '(' attached to its keyword, '{' at end of line, '}' on its own line.
// Negated literals print without a space after the minus sign.
std::string pretty_print(const Program& program);

}  // namespace simdsl
