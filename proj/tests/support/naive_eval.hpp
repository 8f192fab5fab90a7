#pragma once

#include <map>
#include <optional>
#include <string>

#include "simdsl/ast.hpp"
#include "simdsl/value.hpp"

namespace simdsl::testsupport {

// Independent evaluator for straight-line programs (top-level assignments
// and an optional final return; no repeat/if). Written separately from the
// interpreter: arithmetic goes through __int128 range checks and floor
// division uses the remainder identity.
struct NaiveResult {
  std::map<std::string, Value> final_state;  // state after the last completed
                                             // instruction, __ret__ included
  bool errored = false;
  std::string error_kind;  // "division-by-zero" | "int-overflow" |
                           // "undefined-variable"
  std::optional<Value> returned;
};

NaiveResult naive_eval_straight_line(const Program& program);

}  // namespace simdsl::testsupport
