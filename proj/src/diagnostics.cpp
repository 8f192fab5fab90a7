#include "simdsl/diagnostics.hpp"

#include <algorithm>

namespace simdsl {

LineMap::LineMap(const std::string& source) {
  line_starts_.push_back(0);
  for (std::size_t i = 0; i < source.size(); ++i) {
    if (source[i] == '\n') {
      line_starts_.push_back(i + 1);
    }
  }
}

LineMap::Position LineMap::locate(std::size_t offset) const {
  auto it = std::upper_bound(line_starts_.begin(), line_starts_.end(), offset);
  std::size_t line = static_cast<std::size_t>(it - line_starts_.begin());
  std::size_t col = offset - line_starts_[line - 1] + 1;
  return Position{line, col};
}

std::string format_diagnostic(const std::string& file, const LineMap& lines,
                              const Diagnostic& diag) {
  auto pos = lines.locate(diag.span.begin);
  return file + ":" + std::to_string(pos.line) + ":" + std::to_string(pos.column) +
         ": error: " + diag.message;
}

}  // namespace simdsl
