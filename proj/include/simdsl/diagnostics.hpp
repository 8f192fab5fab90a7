#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "simdsl/span.hpp"

namespace simdsl {

enum class Severity { Error };

struct Diagnostic {
  std::string message;
  Span span;
  Severity severity = Severity::Error;
};

// Maps byte offsets to 1-based line/column pairs.
class LineMap {
 public:
  explicit LineMap(const std::string& source);

  struct Position {
    std::size_t line = 1;
    std::size_t column = 1;
  };

  Position locate(std::size_t offset) const;

 private:
  std::vector<std::size_t> line_starts_;
};

// Renders "<file>:<line>:<col>: error: <message>".
std::string format_diagnostic(const std::string& file, const LineMap& lines,
                              const Diagnostic& diag);

}  // namespace simdsl
