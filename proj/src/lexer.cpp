#include "simdsl/lexer.hpp"

#include <cctype>

namespace simdsl {

std::string_view token_kind_name(TokenKind kind) {
  switch (kind) {
    case TokenKind::KwFunc: return "func";
    case TokenKind::KwSimulation: return "simulation";
    case TokenKind::KwRepeat: return "repeat";
    case TokenKind::KwIf: return "if";
    case TokenKind::KwReturn: return "return";
    case TokenKind::Identifier: return "identifier";
    case TokenKind::IntLiteral: return "integer literal";
    case TokenKind::RealLiteral: return "real literal";
    case TokenKind::ComparisonOp: return "comparison operator";
    case TokenKind::ArithOp: return "arithmetic operator";
    case TokenKind::Assign: return "'='";
    case TokenKind::LParen: return "'('";
    case TokenKind::RParen: return "')'";
    case TokenKind::LBrace: return "'{'";
    case TokenKind::RBrace: return "'}'";
    case TokenKind::Semicolon: return "';'";
  }
  return "token";
}

namespace {

bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

bool is_ident_char(char c) {
  return is_ident_start(c) || (c >= '0' && c <= '9') || c == '_';
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

TokenKind keyword_or_identifier(const std::string& lexeme) {
  if (lexeme == "func") return TokenKind::KwFunc;
  if (lexeme == "simulation") return TokenKind::KwSimulation;
  if (lexeme == "repeat") return TokenKind::KwRepeat;
  if (lexeme == "if") return TokenKind::KwIf;
  if (lexeme == "return") return TokenKind::KwReturn;
  return TokenKind::Identifier;
}

}  // namespace

LexResult tokenize(const std::string& source, const LexOptions& options) {
  LexResult result;
  std::size_t i = 0;
  const std::size_t n = source.size();

  auto push = [&](TokenKind kind, std::size_t begin, std::size_t end) {
    result.tokens.push_back(
        Token{kind, source.substr(begin, end - begin), Span{begin, end}});
  };

  while (i < n) {
    char c = source[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
      continue;
    }
    if (result.tokens.size() >= options.max_tokens) {
      result.error = Diagnostic{
          "program exceeds the maximum of " +
              std::to_string(options.max_tokens) + " tokens",
          Span{i, i + 1}};
      return result;
    }

    std::size_t begin = i;
    if (is_ident_start(c)) {
      while (i < n && is_ident_char(source[i])) ++i;
      push(keyword_or_identifier(source.substr(begin, i - begin)), begin, i);
      continue;
    }
    if (is_digit(c)) {
      while (i < n && is_digit(source[i])) ++i;
      // maximal munch: digits '.' digits is one real literal
      if (i + 1 < n && source[i] == '.' && is_digit(source[i + 1])) {
        ++i;
        while (i < n && is_digit(source[i])) ++i;
        push(TokenKind::RealLiteral, begin, i);
      } else {
        push(TokenKind::IntLiteral, begin, i);
      }
      continue;
    }
    switch (c) {
      case '(': push(TokenKind::LParen, begin, ++i); continue;
      case ')': push(TokenKind::RParen, begin, ++i); continue;
      case '{': push(TokenKind::LBrace, begin, ++i); continue;
      case '}': push(TokenKind::RBrace, begin, ++i); continue;
      case ';': push(TokenKind::Semicolon, begin, ++i); continue;
      case '+':
      case '-':
      case '*':
        push(TokenKind::ArithOp, begin, ++i);
        continue;
      case '/':
        ++i;
        if (i < n && source[i] == '/') ++i;  // floor division
        push(TokenKind::ArithOp, begin, i);
        continue;
      case '<':
      case '>':
        ++i;
        if (i < n && source[i] == '=') ++i;
        push(TokenKind::ComparisonOp, begin, i);
        continue;
      case '=':
        ++i;
        if (i < n && source[i] == '=') {
          ++i;
          push(TokenKind::ComparisonOp, begin, i);
        } else {
          push(TokenKind::Assign, begin, i);
        }
        continue;
      case '!':
        if (i + 1 < n && source[i + 1] == '=') {
          i += 2;
          push(TokenKind::ComparisonOp, begin, i);
          continue;
        }
        result.error = Diagnostic{"unexpected character '!'", Span{begin, begin + 1}};
        return result;
      default:
        result.error = Diagnostic{
            std::string("unexpected character '") + c + "'",
            Span{begin, begin + 1}};
        return result;
    }
  }
  return result;
}

TokenStringsResult program_tokens(const std::string& source,
                                  const LexOptions& options) {
  TokenStringsResult out;
  LexResult lexed = tokenize(source, options);
  if (!lexed.ok()) {
    out.error = lexed.error;
    return out;
  }
  out.tokens.reserve(lexed.tokens.size());
  for (const Token& tok : lexed.tokens) {
    out.tokens.push_back(tok.lexeme);
  }
  return out;
}

}  // namespace simdsl
