#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "simdsl/diagnostics.hpp"
#include "simdsl/token.hpp"

namespace simdsl {

struct LexOptions {
  // Upper bound on a single program's token count; bounds parser and
  // decoder work during synthesis.
  std::size_t max_tokens = 4096;
};

struct LexResult {
  std::vector<Token> tokens;
  std::optional<Diagnostic> error;

  bool ok() const { return !error.has_value(); }
};

// Whitespace-insensitive maximal-munch lexer ('>=' and '//' are single
// tokens). Stops at the first unknown character and reports its span.
LexResult tokenize(const std::string& source, const LexOptions& options = {});

// Lexeme sequence of a source text, e.g. the unit BLEU operates on.
// Numeric literals are single tokens; a lex error propagates via `error`.
struct TokenStringsResult {
  std::vector<std::string> tokens;
  std::optional<Diagnostic> error;

  bool ok() const { return !error.has_value(); }
};

TokenStringsResult program_tokens(const std::string& source,
                                  const LexOptions& options = {});

}  // namespace simdsl
