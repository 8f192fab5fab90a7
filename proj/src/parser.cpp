#include "simdsl/parser.hpp"

#include <charconv>
#include <cstdlib>

namespace simdsl {

namespace {

constexpr std::size_t kMaxDiagnostics = 25;

class Parser {
 public:
  explicit Parser(const std::vector<Token>& tokens) : toks_(tokens) {}

  ParseResult run() {
    ParseResult result;
    std::optional<Program> program = parse_program();
    result.diagnostics = std::move(diags_);
    if (result.diagnostics.empty()) {
      result.program = std::move(program);
    }
    return result;
  }

 private:
  bool at_end() const { return pos_ >= toks_.size(); }

  const Token& current() const { return toks_[pos_]; }

  Span here() const {
    if (!at_end()) return current().span;
    if (toks_.empty()) return Span{0, 0};
    std::size_t end = toks_.back().span.end;
    return Span{end, end};
  }

  bool check(TokenKind kind) const { return !at_end() && current().kind == kind; }

  const Token* accept(TokenKind kind) {
    if (!check(kind)) return nullptr;
    return &toks_[pos_++];
  }

  void error(std::string message, Span span) {
    if (diags_.size() < kMaxDiagnostics) {
      diags_.push_back(Diagnostic{std::move(message), span});
    }
  }

  const Token* expect(TokenKind kind, const std::string& what) {
    if (const Token* tok = accept(kind)) return tok;
    if (at_end()) {
      error("expected " + what + " but reached end of input", here());
    } else {
      error("expected " + what + " but found '" + current().lexeme + "'",
            current().span);
    }
    return nullptr;
  }

  // Skip to just past the next ';', or stop before '}' / end of input.
  void synchronize() {
    while (!at_end()) {
      if (current().kind == TokenKind::Semicolon) {
        ++pos_;
        return;
      }
      if (current().kind == TokenKind::RBrace) return;
      ++pos_;
    }
  }

  std::optional<Program> parse_program() {
    const Token* kw_func = expect(TokenKind::KwFunc, "'func'");
    expect(TokenKind::KwSimulation, "'simulation'");
    expect(TokenKind::LParen, "'('");
    expect(TokenKind::RParen, "')'");
    std::optional<StatementList> body = parse_block();
    if (!at_end()) {
      error("unexpected tokens after the program", current().span);
    }
    if (!kw_func || !body) return std::nullopt;
    Program program;
    program.body = std::move(*body);
    program.span = join(kw_func->span, program.body.span);
    return program;
  }

  std::optional<StatementList> parse_block() {
    const Token* lbrace = expect(TokenKind::LBrace, "'{'");
    if (!lbrace) return std::nullopt;
    StatementList list;
    while (!at_end() && current().kind != TokenKind::RBrace) {
      if (diags_.size() >= kMaxDiagnostics) break;
      std::size_t before = pos_;
      std::optional<Statement> stmt = parse_statement();
      if (stmt) {
        list.statements.push_back(std::move(*stmt));
      } else {
        synchronize();
        if (pos_ == before) ++pos_;  // guarantee progress
      }
    }
    const Token* rbrace = expect(TokenKind::RBrace, "'}'");
    if (list.statements.empty()) {
      error("a block requires at least one statement",
            rbrace ? rbrace->span : here());
    }
    list.span = join(lbrace->span, rbrace ? rbrace->span : here());
    return list;
  }

  std::optional<Statement> parse_statement() {
    if (at_end()) {
      error("expected a statement but reached end of input", here());
      return std::nullopt;
    }
    switch (current().kind) {
      case TokenKind::KwRepeat: return parse_repeat();
      case TokenKind::KwIf: return parse_if();
      case TokenKind::KwReturn: return parse_return();
      case TokenKind::Identifier: return parse_assign();
      default:
        error("expected a statement but found '" + current().lexeme + "'",
              current().span);
        return std::nullopt;
    }
  }

  std::optional<Statement> parse_repeat() {
    const Token* kw = accept(TokenKind::KwRepeat);
    expect(TokenKind::LParen, "'('");
    const Token* count = accept(TokenKind::IntLiteral);
    if (!count) {
      error("repeat count must be an integer literal", here());
      return std::nullopt;
    }
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(
        count->lexeme.data(), count->lexeme.data() + count->lexeme.size(), value);
    if (ec != std::errc{}) {
      error("repeat count '" + count->lexeme + "' is too large", count->span);
      return std::nullopt;
    }
    expect(TokenKind::RParen, "')'");
    std::optional<StatementList> body = parse_block();
    if (!body) return std::nullopt;
    RepeatStmt stmt;
    stmt.count = value;
    stmt.count_lexeme = count->lexeme;
    stmt.count_span = count->span;
    stmt.body = std::move(*body);
    stmt.span = join(kw->span, stmt.body.span);
    return Statement{std::move(stmt)};
  }

  std::optional<Statement> parse_if() {
    const Token* kw = accept(TokenKind::KwIf);
    expect(TokenKind::LParen, "'('");
    std::optional<Condition> cond = parse_condition();
    expect(TokenKind::RParen, "')'");
    std::optional<StatementList> body = parse_block();
    if (!cond || !body) return std::nullopt;
    IfStmt stmt;
    stmt.cond = std::move(*cond);
    stmt.body = std::move(*body);
    stmt.span = join(kw->span, stmt.body.span);
    return Statement{std::move(stmt)};
  }

  std::optional<Statement> parse_return() {
    const Token* kw = accept(TokenKind::KwReturn);
    std::optional<Expression> expr = parse_expression();
    const Token* semi = expect(TokenKind::Semicolon, "';'");
    if (!expr) return std::nullopt;
    ReturnStmt stmt;
    stmt.expr = std::move(*expr);
    stmt.span = join(kw->span, semi ? semi->span : stmt.expr.span);
    return Statement{std::move(stmt)};
  }

  std::optional<Statement> parse_assign() {
    const Token* target = accept(TokenKind::Identifier);
    expect(TokenKind::Assign, "'='");
    std::optional<Expression> first = parse_expression();
    if (!first) return std::nullopt;
    AssignStmt stmt;
    stmt.target = target->lexeme;
    stmt.target_span = target->span;
    if (const Token* op = accept(TokenKind::ArithOp)) {
      std::optional<Expression> second = parse_expression();
      if (!second) return std::nullopt;
      if (check(TokenKind::ArithOp)) {
        // the grammar allows a single operator per assignment
        error("at most one operator is allowed on the right-hand side",
              current().span);
        return std::nullopt;
      }
      BinaryExpr bin;
      bin.lhs = std::move(*first);
      bin.op = arith_op_from(op->lexeme);
      bin.rhs = std::move(*second);
      stmt.rhs = std::move(bin);
    } else {
      stmt.rhs = std::move(*first);
    }
    const Token* semi = expect(TokenKind::Semicolon, "';'");
    stmt.span = join(target->span, semi ? semi->span : here());
    return Statement{std::move(stmt)};
  }

  std::optional<Condition> parse_condition() {
    if (check(TokenKind::IntLiteral) || check(TokenKind::RealLiteral)) {
      error("the left-hand side of a condition must be an identifier",
            current().span);
      return std::nullopt;
    }
    const Token* lhs = expect(TokenKind::Identifier, "an identifier");
    const Token* op = expect(TokenKind::ComparisonOp, "a comparison operator");
    std::optional<Expression> rhs = parse_expression();
    if (!lhs || !op || !rhs) return std::nullopt;
    Condition cond;
    cond.lhs = lhs->lexeme;
    cond.lhs_span = lhs->span;
    cond.op = cmp_op_from(op->lexeme);
    cond.rhs = std::move(*rhs);
    cond.span = join(lhs->span, cond.rhs.span);
    return cond;
  }

  std::optional<Expression> parse_expression() {
    if (at_end()) {
      error("expected an expression but reached end of input", here());
      return std::nullopt;
    }
    const Token& tok = current();
    if (tok.kind == TokenKind::Identifier) {
      ++pos_;
      Expression expr;
      expr.kind = Expression::Kind::Identifier;
      expr.name = tok.lexeme;
      expr.span = tok.span;
      return expr;
    }
    if (tok.kind == TokenKind::IntLiteral || tok.kind == TokenKind::RealLiteral) {
      ++pos_;
      return make_literal(tok, false, tok.span);
    }
    if (tok.kind == TokenKind::ArithOp && tok.lexeme == "-") {
      ++pos_;
      if (at_end() || (current().kind != TokenKind::IntLiteral &&
                       current().kind != TokenKind::RealLiteral)) {
        error("'-' may only negate a numeric literal", tok.span);
        return std::nullopt;
      }
      const Token& lit = current();
      if (lit.span.begin != tok.span.end) {
        error("no whitespace is allowed between '-' and the literal", tok.span);
        return std::nullopt;
      }
      ++pos_;
      return make_literal(lit, true, join(tok.span, lit.span));
    }
    error("expected an expression but found '" + tok.lexeme + "'", tok.span);
    return std::nullopt;
  }

  std::optional<Expression> make_literal(const Token& tok, bool negated,
                                         Span span) {
    Expression expr;
    expr.negated = negated;
    expr.literal_lexeme = tok.lexeme;
    expr.span = span;
    if (tok.kind == TokenKind::IntLiteral) {
      expr.kind = Expression::Kind::IntLiteral;
      auto [ptr, ec] = std::from_chars(
          tok.lexeme.data(), tok.lexeme.data() + tok.lexeme.size(), expr.int_value);
      if (ec != std::errc{}) {
        error("integer literal '" + tok.lexeme + "' does not fit in 64 bits",
              tok.span);
        return std::nullopt;
      }
    } else {
      expr.kind = Expression::Kind::RealLiteral;
      expr.real_value = std::strtod(tok.lexeme.c_str(), nullptr);
    }
    return expr;
  }

  static ArithOp arith_op_from(const std::string& lexeme) {
    if (lexeme == "+") return ArithOp::Add;
    if (lexeme == "-") return ArithOp::Sub;
    if (lexeme == "*") return ArithOp::Mul;
    if (lexeme == "//") return ArithOp::FloorDiv;
    return ArithOp::Div;
  }

  static CmpOp cmp_op_from(const std::string& lexeme) {
    if (lexeme == "<") return CmpOp::Lt;
    if (lexeme == ">") return CmpOp::Gt;
    if (lexeme == ">=") return CmpOp::Ge;
    if (lexeme == "<=") return CmpOp::Le;
    if (lexeme == "!=") return CmpOp::Ne;
    return CmpOp::Eq;
  }

  const std::vector<Token>& toks_;
  std::size_t pos_ = 0;
  std::vector<Diagnostic> diags_;
};

}  // namespace

ParseResult parse(const std::vector<Token>& tokens) {
  return Parser(tokens).run();
}

ParseResult parse_source(const std::string& source, const LexOptions& options) {
  LexResult lexed = tokenize(source, options);
  if (!lexed.ok()) {
    ParseResult result;
    result.diagnostics.push_back(*lexed.error);
    return result;
  }
  return parse(lexed.tokens);
}

}  // namespace simdsl
