#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "simdsl/ast.hpp"
#include "simdsl/value.hpp"

#include "json.hpp"

namespace simdsl {

// Variable bindings at one point of execution. An identifier absent from
// the map has never been assigned; reading it is a runtime error.
using State = std::map<std::string, Value>;

// Reserved binding recording the returned value in the final snapshot.
// User identifiers cannot start with an underscore, so it never collides.
inline constexpr const char* kReturnSlot = "__ret__";

enum class RecordKind { Assign, Return };

// One executed memory-changing instruction and the state after it.
struct InstructionRecord {
  RecordKind kind = RecordKind::Assign;
  std::uint64_t step = 0;  // consecutive from 0
  Span statement_span;
  State state;
};

struct ExecutionTrace {
  std::vector<InstructionRecord> records;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
};

enum class RuntimeErrorKind {
  DivisionByZero,
  IntOverflow,
  UndefinedVariable,
  StepLimitExceeded,
};

std::string runtime_error_name(RuntimeErrorKind kind);

struct Returned {
  Value value;
};
struct NoReturn {};
struct RuntimeFault {
  RuntimeErrorKind kind;
  std::uint64_t step = 0;  // index of the instruction that faulted
  Span span;
  std::string detail;
};

using ExecStatus = std::variant<Returned, NoReturn, RuntimeFault>;

struct ExecutionOutcome {
  ExecStatus status = NoReturn{};
  ExecutionTrace trace;
  std::uint64_t steps_executed = 0;  // == trace.records.size()

  bool returned() const { return std::holds_alternative<Returned>(status); }
  bool faulted() const { return std::holds_alternative<RuntimeFault>(status); }
  const RuntimeFault* fault() const {
    return std::get_if<RuntimeFault>(&status);
  }
};

struct ExecLimits {
  // Counts dynamically executed statements (assignments, returns, if
  // evaluations and repeat headers), so loops that only test conditions
  // still terminate promptly.
  std::uint64_t max_steps = 1'000'000;
};

// Tree-walking evaluation. Records one state snapshot per executed
// assignment; 'return' stops execution and binds kReturnSlot in the final
// snapshot. Condition evaluation and loop bookkeeping do not produce
// records. Runtime errors truncate the trace to the completed prefix.
ExecutionOutcome execute(const Program& program, const ExecLimits& limits = {});

// Trace projected onto its state snapshots; a faulting program yields the
// truncated prefix.
std::vector<State> execute_and_get_state(const Program& program,
                                         const ExecLimits& limits = {});

// Returned value widened to double, or nullopt for no-return / fault.
std::optional<double> answer_of(const ExecutionOutcome& outcome);

// Number of executed assignments (return excluded); counts the completed
// prefix when execution faults.
std::uint64_t count_state_changes(const Program& program,
                                  const ExecLimits& limits = {});

// JSON array of {"t": ..., "kind": "assign"|"return", "state": {...}};
// Ints serialize without a decimal point, Reals with one.
nlohmann::json trace_to_json(const ExecutionTrace& trace);

std::string describe_fault(const RuntimeFault& fault);

}  // namespace simdsl
