#include "simdsl/interpreter.hpp"

#include <charconv>
#include <cmath>

namespace simdsl {

std::string runtime_error_name(RuntimeErrorKind kind) {
  switch (kind) {
    case RuntimeErrorKind::DivisionByZero: return "division-by-zero";
    case RuntimeErrorKind::IntOverflow: return "int-overflow";
    case RuntimeErrorKind::UndefinedVariable: return "undefined-variable";
    case RuntimeErrorKind::StepLimitExceeded: return "step-limit-exceeded";
  }
  return "runtime-error";
}

std::string value_to_string(const Value& value) {
  if (value.is_int()) return std::to_string(value.as_int());
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value.as_real());
  std::string out(buf, ptr);
  if (out.find('.') == std::string::npos && out.find('e') == std::string::npos &&
      out.find("inf") == std::string::npos && out.find("nan") == std::string::npos) {
    out += ".0";
  }
  return out;
}

namespace {

class Executor {
 public:
  explicit Executor(const ExecLimits& limits) : limits_(limits) {}

  ExecutionOutcome run(const Program& program) {
    Flow flow = exec_list(program.body);
    ExecutionOutcome outcome;
    if (flow == Flow::Fault) {
      outcome.status = *fault_;
    } else if (flow == Flow::Returned) {
      outcome.status = Returned{*returned_};
    } else {
      outcome.status = NoReturn{};
    }
    outcome.trace = std::move(trace_);
    outcome.steps_executed = outcome.trace.records.size();
    return outcome;
  }

 private:
  enum class Flow { Continue, Returned, Fault };

  Flow exec_list(const StatementList& list) {
    for (const Statement& stmt : list.statements) {
      Flow flow = exec_stmt(stmt);
      if (flow != Flow::Continue) return flow;
    }
    return Flow::Continue;
  }

  Flow exec_stmt(const Statement& stmt) {
    if (!charge(stmt.span())) return Flow::Fault;
    if (const auto* assign = std::get_if<AssignStmt>(&stmt.node)) {
      return exec_assign(*assign);
    }
    if (const auto* ret = std::get_if<ReturnStmt>(&stmt.node)) {
      return exec_return(*ret);
    }
    if (const auto* rep = std::get_if<RepeatStmt>(&stmt.node)) {
      for (std::int64_t i = 0; i < rep->count; ++i) {
        Flow flow = exec_list(rep->body);
        if (flow != Flow::Continue) return flow;
      }
      return Flow::Continue;
    }
    const auto& iff = std::get<IfStmt>(stmt.node);
    std::optional<bool> taken = eval_cond(iff.cond);
    if (!taken) return Flow::Fault;
    if (*taken) return exec_list(iff.body);
    return Flow::Continue;
  }

  Flow exec_assign(const AssignStmt& stmt) {
    std::optional<Value> value;
    if (const auto* expr = std::get_if<Expression>(&stmt.rhs)) {
      value = eval(*expr);
    } else {
      const auto& bin = std::get<BinaryExpr>(stmt.rhs);
      std::optional<Value> lhs = eval(bin.lhs);
      if (!lhs) return Flow::Fault;
      std::optional<Value> rhs = eval(bin.rhs);
      if (!rhs) return Flow::Fault;
      value = apply(bin.op, *lhs, *rhs, stmt.span);
    }
    if (!value) return Flow::Fault;
    state_[stmt.target] = *value;
    record(RecordKind::Assign, stmt.span);
    return Flow::Continue;
  }

  Flow exec_return(const ReturnStmt& stmt) {
    std::optional<Value> value = eval(stmt.expr);
    if (!value) return Flow::Fault;
    state_[kReturnSlot] = *value;
    record(RecordKind::Return, stmt.span);
    returned_ = *value;
    return Flow::Returned;
  }

  // One unit per dynamically executed statement. Loops whose bodies only
  // test conditions still hit the cap.
  bool charge(Span span) {
    if (work_ >= limits_.max_steps) {
      fail(RuntimeErrorKind::StepLimitExceeded, span,
           "step limit of " + std::to_string(limits_.max_steps) + " exceeded");
      return false;
    }
    ++work_;
    return true;
  }

  void record(RecordKind kind, Span span) {
    InstructionRecord rec;
    rec.kind = kind;
    rec.step = trace_.records.size();
    rec.statement_span = span;
    rec.state = state_;
    trace_.records.push_back(std::move(rec));
  }

  void fail(RuntimeErrorKind kind, Span span, std::string detail) {
    fault_ = RuntimeFault{kind, trace_.records.size(), span, std::move(detail)};
  }

  std::optional<Value> eval(const Expression& expr) {
    if (expr.kind == Expression::Kind::Identifier) {
      auto it = state_.find(expr.name);
      if (it == state_.end()) {
        fail(RuntimeErrorKind::UndefinedVariable, expr.span,
             "variable '" + expr.name + "' read before assignment");
        return std::nullopt;
      }
      return it->second;
    }
    if (expr.kind == Expression::Kind::IntLiteral) {
      return Value{expr.negated ? -expr.int_value : expr.int_value};
    }
    return Value{expr.negated ? -expr.real_value : expr.real_value};
  }

  std::optional<Value> apply(ArithOp op, Value a, Value b, Span span) {
    const bool both_int = a.is_int() && b.is_int();
    switch (op) {
      case ArithOp::Add:
      case ArithOp::Sub:
      case ArithOp::Mul: {
        if (both_int) {
          std::int64_t out = 0;
          bool overflow = false;
          if (op == ArithOp::Add) {
            overflow = __builtin_add_overflow(a.as_int(), b.as_int(), &out);
          } else if (op == ArithOp::Sub) {
            overflow = __builtin_sub_overflow(a.as_int(), b.as_int(), &out);
          } else {
            overflow = __builtin_mul_overflow(a.as_int(), b.as_int(), &out);
          }
          if (overflow) {
            fail(RuntimeErrorKind::IntOverflow, span,
                 "integer arithmetic overflows 64 bits");
            return std::nullopt;
          }
          return Value{out};
        }
        double x = a.widen(), y = b.widen();
        if (op == ArithOp::Add) return Value{x + y};
        if (op == ArithOp::Sub) return Value{x - y};
        return Value{x * y};
      }
      case ArithOp::Div: {
        if (is_zero(b)) {
          fail(RuntimeErrorKind::DivisionByZero, span, "division by zero");
          return std::nullopt;
        }
        return Value{a.widen() / b.widen()};
      }
      case ArithOp::FloorDiv: {
        if (is_zero(b)) {
          fail(RuntimeErrorKind::DivisionByZero, span, "division by zero");
          return std::nullopt;
        }
        if (both_int) {
          std::int64_t x = a.as_int(), y = b.as_int();
          if (x == INT64_MIN && y == -1) {
            fail(RuntimeErrorKind::IntOverflow, span,
                 "integer arithmetic overflows 64 bits");
            return std::nullopt;
          }
          std::int64_t q = x / y;
          std::int64_t r = x % y;
          if (r != 0 && ((r < 0) != (y < 0))) --q;
          return Value{q};
        }
        return Value{std::floor(a.widen() / b.widen())};
      }
    }
    return std::nullopt;
  }

  static bool is_zero(const Value& v) {
    return v.is_int() ? v.as_int() == 0 : v.as_real() == 0.0;
  }

  std::optional<bool> eval_cond(const Condition& cond) {
    auto it = state_.find(cond.lhs);
    if (it == state_.end()) {
      fail(RuntimeErrorKind::UndefinedVariable, cond.lhs_span,
           "variable '" + cond.lhs + "' read before assignment");
      return std::nullopt;
    }
    std::optional<Value> rhs = eval(cond.rhs);
    if (!rhs) return std::nullopt;
    const Value& a = it->second;
    const Value& b = *rhs;
    if (a.is_int() && b.is_int()) {
      return compare(cond.op, a.as_int(), b.as_int());
    }
    return compare(cond.op, a.widen(), b.widen());
  }

  template <typename T>
  static bool compare(CmpOp op, T a, T b) {
    switch (op) {
      case CmpOp::Lt: return a < b;
      case CmpOp::Gt: return a > b;
      case CmpOp::Ge: return a >= b;
      case CmpOp::Le: return a <= b;
      case CmpOp::Ne: return a != b;
      case CmpOp::Eq: return a == b;
    }
    return false;
  }

  const ExecLimits& limits_;
  State state_;
  ExecutionTrace trace_;
  std::uint64_t work_ = 0;
  std::optional<Value> returned_;
  std::optional<RuntimeFault> fault_;
};

}  // namespace

ExecutionOutcome execute(const Program& program, const ExecLimits& limits) {
  return Executor(limits).run(program);
}

std::vector<State> execute_and_get_state(const Program& program,
                                         const ExecLimits& limits) {
  ExecutionOutcome outcome = execute(program, limits);
  std::vector<State> states;
  states.reserve(outcome.trace.records.size());
  for (InstructionRecord& rec : outcome.trace.records) {
    states.push_back(std::move(rec.state));
  }
  return states;
}

std::optional<double> answer_of(const ExecutionOutcome& outcome) {
  if (const auto* ret = std::get_if<Returned>(&outcome.status)) {
    return ret->value.widen();
  }
  return std::nullopt;
}

std::uint64_t count_state_changes(const Program& program,
                                  const ExecLimits& limits) {
  ExecutionOutcome outcome = execute(program, limits);
  std::uint64_t count = 0;
  for (const InstructionRecord& rec : outcome.trace.records) {
    if (rec.kind == RecordKind::Assign) ++count;
  }
  return count;
}

nlohmann::json trace_to_json(const ExecutionTrace& trace) {
  nlohmann::json arr = nlohmann::json::array();
  for (const InstructionRecord& rec : trace.records) {
    nlohmann::json state = nlohmann::json::object();
    for (const auto& [name, value] : rec.state) {
      if (value.is_int()) {
        state[name] = value.as_int();
      } else {
        state[name] = value.as_real();
      }
    }
    arr.push_back({{"t", rec.step},
                   {"kind", rec.kind == RecordKind::Assign ? "assign" : "return"},
                   {"state", std::move(state)}});
  }
  return arr;
}

std::string describe_fault(const RuntimeFault& fault) {
  return runtime_error_name(fault.kind) + " at step " +
         std::to_string(fault.step) +
         (fault.detail.empty() ? "" : ": " + fault.detail);
}

}  // namespace simdsl
