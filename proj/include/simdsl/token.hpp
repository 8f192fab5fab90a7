#pragma once

#include <string>
#include <string_view>

#include "simdsl/span.hpp"

namespace simdsl {

enum class TokenKind {
  KwFunc,
  KwSimulation,
  KwRepeat,
  KwIf,
  KwReturn,
  Identifier,
  IntLiteral,
  RealLiteral,
  ComparisonOp,  // < > >= <= != ==
  ArithOp,       // + - * / //
  Assign,        // =
  LParen,
  RParen,
  LBrace,
  RBrace,
  Semicolon,
};

struct Token {
  TokenKind kind;
  std::string lexeme;
  Span span;
};

std::string_view token_kind_name(TokenKind kind);

inline bool is_keyword(TokenKind kind) {
  switch (kind) {
    case TokenKind::KwFunc:
    case TokenKind::KwSimulation:
    case TokenKind::KwRepeat:
    case TokenKind::KwIf:
    case TokenKind::KwReturn:
      return true;
    default:
      return false;
  }
}

}  // namespace simdsl
