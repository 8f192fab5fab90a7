#pragma once

#include <optional>
#include <string>
#include <vector>

#include "simdsl/ast.hpp"
#include "simdsl/diagnostics.hpp"
#include "simdsl/lexer.hpp"

namespace simdsl {

struct ParseResult {
  std::optional<Program> program;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return program.has_value() && diagnostics.empty(); }
};

// Recursive-descent parse of a token stream. Grammar violations become
// diagnostics, never exceptions; on error the parser synchronizes at the
// next ';' or '}' to report further problems.
ParseResult parse(const std::vector<Token>& tokens);

// tokenize + parse in one step. Lex errors surface as diagnostics.
ParseResult parse_source(const std::string& source,
                         const LexOptions& options = {});

}  // namespace simdsl
