#include "simdsl/printer.hpp"

#include <string>

namespace simdsl {

namespace {

void print_expression(std::string& out, const Expression& expr) {
  if (expr.kind == Expression::Kind::Identifier) {
    out += expr.name;
    return;
  }
  if (expr.negated) out += '-';
  out += expr.literal_lexeme;
}

void print_indent(std::string& out, int depth) {
  out.append(static_cast<std::size_t>(depth) * 4, ' ');
}

void print_statements(std::string& out, const StatementList& list, int depth);

void print_statement(std::string& out, const Statement& stmt, int depth) {
  print_indent(out, depth);
  if (const auto* assign = std::get_if<AssignStmt>(&stmt.node)) {
    out += assign->target;
    out += " = ";
    if (const auto* expr = std::get_if<Expression>(&assign->rhs)) {
      print_expression(out, *expr);
    } else {
      const auto& bin = std::get<BinaryExpr>(assign->rhs);
      print_expression(out, bin.lhs);
      out += ' ';
      out += arith_op_lexeme(bin.op);
      out += ' ';
      print_expression(out, bin.rhs);
    }
    out += ";\n";
  } else if (const auto* ret = std::get_if<ReturnStmt>(&stmt.node)) {
    out += "return ";
    print_expression(out, ret->expr);
    out += ";\n";
  } else if (const auto* rep = std::get_if<RepeatStmt>(&stmt.node)) {
    out += "repeat(";
    out += rep->count_lexeme;
    out += ") {\n";
    print_statements(out, rep->body, depth + 1);
    print_indent(out, depth);
    out += "}\n";
  } else {
    const auto& iff = std::get<IfStmt>(stmt.node);
    out += "if(";
    out += iff.cond.lhs;
    out += ' ';
    out += cmp_op_lexeme(iff.cond.op);
    out += ' ';
    print_expression(out, iff.cond.rhs);
    out += ") {\n";
    print_statements(out, iff.body, depth + 1);
    print_indent(out, depth);
    out += "}\n";
  }
}

void print_statements(std::string& out, const StatementList& list, int depth) {
  for (const Statement& stmt : list.statements) {
    print_statement(out, stmt, depth);
  }
}

}  // namespace

std::string pretty_print(const Program& program) {
  std::string out = "func simulation() {\n";
  print_statements(out, program.body, 1);
  out += "}\n";
  return out;
}

}  // namespace simdsl
