#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "simdsl/span.hpp"

namespace simdsl {

enum class ArithOp { Add, Sub, Mul, Div, FloorDiv };
enum class CmpOp { Lt, Gt, Ge, Le, Ne, Eq };

std::string_view arith_op_lexeme(ArithOp op);
std::string_view cmp_op_lexeme(CmpOp op);

// Atomic expression: an identifier or a (possibly negated) literal.
// Literal lexemes are preserved verbatim so printing round-trips exactly
// (e.g. "3.50" stays "3.50").
struct Expression {
  enum class Kind { Identifier, IntLiteral, RealLiteral };

  Kind kind = Kind::IntLiteral;
  bool negated = false;         // literals only; the grammar has no unary
                                // minus on identifiers
  std::string name;             // Identifier
  std::string literal_lexeme;   // IntLiteral / RealLiteral, without sign
  std::int64_t int_value = 0;   // IntLiteral, unsigned magnitude as written
  double real_value = 0.0;      // RealLiteral, magnitude as written
  Span span;
};

struct BinaryExpr {
  Expression lhs;
  ArithOp op = ArithOp::Add;
  Expression rhs;
};

// identifier op_c e
struct Condition {
  std::string lhs;
  Span lhs_span;
  CmpOp op = CmpOp::Lt;
  Expression rhs;
  Span span;
};

struct Statement;

struct StatementList {
  std::vector<Statement> statements;
  Span span;
};

// identifier = e  |  identifier = e op e
struct AssignStmt {
  std::string target;
  Span target_span;
  std::variant<Expression, BinaryExpr> rhs;
  Span span;
};

struct ReturnStmt {
  Expression expr;
  Span span;
};

// repeat(n) { s } — the count is an integer literal, never an identifier.
struct RepeatStmt {
  std::int64_t count = 0;
  std::string count_lexeme;  // as written, so printing round-trips
  Span count_span;
  StatementList body;
  Span span;
};

struct IfStmt {
  Condition cond;
  StatementList body;
  Span span;
};

struct Statement {
  std::variant<AssignStmt, ReturnStmt, RepeatStmt, IfStmt> node;

  Span span() const;
};

// func simulation() { s }
struct Program {
  StatementList body;
  Span span;
};

// Structural equality, ignoring spans.
bool ast_equal(const Expression& a, const Expression& b);
bool ast_equal(const Condition& a, const Condition& b);
bool ast_equal(const Statement& a, const Statement& b);
bool ast_equal(const StatementList& a, const StatementList& b);
bool ast_equal(const Program& a, const Program& b);

// Static counts over the tree (if/repeat nodes, not dynamic executions).
int count_if_statements(const Program& program);
int count_repeat_statements(const Program& program);

}  // namespace simdsl
