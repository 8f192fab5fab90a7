#include "support/naive_eval.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <variant>

namespace simdsl::testsupport {

namespace {

struct EvalError {
  std::string kind;
};

bool in_int64_range(__int128 v) {
  return v >= static_cast<__int128>(INT64_MIN) &&
         v <= static_cast<__int128>(INT64_MAX);
}

Value read_atom(const std::map<std::string, Value>& state, const Expression& e) {
  if (e.kind == Expression::Kind::Identifier) {
    auto it = state.find(e.name);
    if (it == state.end()) throw EvalError{"undefined-variable"};
    return it->second;
  }
  if (e.kind == Expression::Kind::IntLiteral) {
    return Value{e.negated ? -e.int_value : e.int_value};
  }
  return Value{e.negated ? -e.real_value : e.real_value};
}

Value combine(ArithOp op, const Value& a, const Value& b) {
  bool ints = a.is_int() && b.is_int();
  switch (op) {
    case ArithOp::Add:
    case ArithOp::Sub:
    case ArithOp::Mul: {
      if (ints) {
        __int128 x = a.as_int();
        __int128 y = b.as_int();
        __int128 r = op == ArithOp::Add ? x + y : op == ArithOp::Sub ? x - y : x * y;
        if (!in_int64_range(r)) throw EvalError{"int-overflow"};
        return Value{static_cast<std::int64_t>(r)};
      }
      double x = a.widen(), y = b.widen();
      if (op == ArithOp::Add) return Value{x + y};
      if (op == ArithOp::Sub) return Value{x - y};
      return Value{x * y};
    }
    case ArithOp::Div: {
      bool zero = b.is_int() ? b.as_int() == 0 : b.as_real() == 0.0;
      if (zero) throw EvalError{"division-by-zero"};
      return Value{a.widen() / b.widen()};
    }
    case ArithOp::FloorDiv: {
      bool zero = b.is_int() ? b.as_int() == 0 : b.as_real() == 0.0;
      if (zero) throw EvalError{"division-by-zero"};
      if (ints) {
        std::int64_t x = a.as_int(), y = b.as_int();
        if (x == INT64_MIN && y == -1) throw EvalError{"int-overflow"};
        // floor(x/y) = (x - mod) / y with mod the least non-negative-ish
        // remainder that has y's sign
        std::int64_t mod = ((x % y) + y) % y;
        return Value{(x - mod) / y};
      }
      return Value{std::floor(a.widen() / b.widen())};
    }
  }
  throw std::logic_error("unreachable arithmetic op");
}

}  // namespace

NaiveResult naive_eval_straight_line(const Program& program) {
  NaiveResult result;
  for (const Statement& stmt : program.body.statements) {
    try {
      if (const auto* assign = std::get_if<AssignStmt>(&stmt.node)) {
        Value value;
        if (const auto* atom = std::get_if<Expression>(&assign->rhs)) {
          value = read_atom(result.final_state, *atom);
        } else {
          const auto& bin = std::get<BinaryExpr>(assign->rhs);
          value = combine(bin.op, read_atom(result.final_state, bin.lhs),
                          read_atom(result.final_state, bin.rhs));
        }
        result.final_state[assign->target] = value;
      } else if (const auto* ret = std::get_if<ReturnStmt>(&stmt.node)) {
        Value value = read_atom(result.final_state, ret->expr);
        result.final_state["__ret__"] = value;
        result.returned = value;
        return result;
      } else {
        throw std::invalid_argument(
            "naive_eval_straight_line: program is not straight-line");
      }
    } catch (const EvalError& error) {
      result.errored = true;
      result.error_kind = error.kind;
      return result;
    }
  }
  return result;
}

}  // namespace simdsl::testsupport
