#include "simdsl/ast.hpp"

namespace simdsl {

std::string_view arith_op_lexeme(ArithOp op) {
  switch (op) {
    case ArithOp::Add: return "+";
    case ArithOp::Sub: return "-";
    case ArithOp::Mul: return "*";
    case ArithOp::Div: return "/";
    case ArithOp::FloorDiv: return "//";
  }
  return "?";
}

std::string_view cmp_op_lexeme(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
    case CmpOp::Le: return "<=";
    case CmpOp::Ne: return "!=";
    case CmpOp::Eq: return "==";
  }
  return "?";
}

Span Statement::span() const {
  return std::visit([](const auto& s) { return s.span; }, node);
}

bool ast_equal(const Expression& a, const Expression& b) {
  if (a.kind != b.kind || a.negated != b.negated) return false;
  if (a.kind == Expression::Kind::Identifier) return a.name == b.name;
  return a.literal_lexeme == b.literal_lexeme;
}

bool ast_equal(const Condition& a, const Condition& b) {
  return a.lhs == b.lhs && a.op == b.op && ast_equal(a.rhs, b.rhs);
}

namespace {

bool ast_equal(const std::variant<Expression, BinaryExpr>& a,
               const std::variant<Expression, BinaryExpr>& b) {
  if (a.index() != b.index()) return false;
  if (const auto* ea = std::get_if<Expression>(&a)) {
    return ast_equal(*ea, std::get<Expression>(b));
  }
  const auto& ba = std::get<BinaryExpr>(a);
  const auto& bb = std::get<BinaryExpr>(b);
  return ba.op == bb.op && ast_equal(ba.lhs, bb.lhs) && ast_equal(ba.rhs, bb.rhs);
}

}  // namespace

bool ast_equal(const Statement& a, const Statement& b) {
  if (a.node.index() != b.node.index()) return false;
  if (const auto* sa = std::get_if<AssignStmt>(&a.node)) {
    const auto& sb = std::get<AssignStmt>(b.node);
    return sa->target == sb.target && ast_equal(sa->rhs, sb.rhs);
  }
  if (const auto* sa = std::get_if<ReturnStmt>(&a.node)) {
    return ast_equal(sa->expr, std::get<ReturnStmt>(b.node).expr);
  }
  if (const auto* sa = std::get_if<RepeatStmt>(&a.node)) {
    const auto& sb = std::get<RepeatStmt>(b.node);
    return sa->count_lexeme == sb.count_lexeme && ast_equal(sa->body, sb.body);
  }
  const auto& ia = std::get<IfStmt>(a.node);
  const auto& ib = std::get<IfStmt>(b.node);
  return ast_equal(ia.cond, ib.cond) && ast_equal(ia.body, ib.body);
}

bool ast_equal(const StatementList& a, const StatementList& b) {
  if (a.statements.size() != b.statements.size()) return false;
  for (std::size_t i = 0; i < a.statements.size(); ++i) {
    if (!ast_equal(a.statements[i], b.statements[i])) return false;
  }
  return true;
}

bool ast_equal(const Program& a, const Program& b) {
  return ast_equal(a.body, b.body);
}

namespace {

void count_nodes(const StatementList& list, int& ifs, int& repeats) {
  for (const Statement& stmt : list.statements) {
    if (const auto* rep = std::get_if<RepeatStmt>(&stmt.node)) {
      ++repeats;
      count_nodes(rep->body, ifs, repeats);
    } else if (const auto* iff = std::get_if<IfStmt>(&stmt.node)) {
      ++ifs;
      count_nodes(iff->body, ifs, repeats);
    }
  }
}

}  // namespace

int count_if_statements(const Program& program) {
  int ifs = 0, repeats = 0;
  count_nodes(program.body, ifs, repeats);
  return ifs;
}

int count_repeat_statements(const Program& program) {
  int ifs = 0, repeats = 0;
  count_nodes(program.body, ifs, repeats);
  return repeats;
}

}  // namespace simdsl
