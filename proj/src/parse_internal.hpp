#pragma once

// Shared lexer/expression-parser internals for expr.cpp and metric.cpp.

#include <cctype>
#include <cstdlib>
#include <string>

#include "forge/errors.hpp"
#include "forge/expr.hpp"

namespace forge::parse_detail {

struct Lexer {
  const std::string& src;
  size_t pos = 0;
  int line = 1;
  int col = 1;

  explicit Lexer(const std::string& s) : src(s) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, line, col);
  }

  void advance(size_t n) {
    for (size_t i = 0; i < n && pos < src.size(); ++i, ++pos) {
      if (src[pos] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  }

  void skip_ws() {
    while (pos < src.size() &&
           std::isspace(static_cast<unsigned char>(src[pos])))
      advance(1);
  }

  char peek() {
    skip_ws();
    return pos < src.size() ? src[pos] : '\0';
  }

  bool eat(char c) {
    if (peek() == c) {
      advance(1);
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }

  bool ident_ahead() {
    char c = peek();
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
  }

  std::string ident() {
    skip_ws();
    size_t start = pos;
    while (pos < src.size() &&
           (std::isalnum(static_cast<unsigned char>(src[pos])) ||
            src[pos] == '_'))
      advance(1);
    if (start == pos) fail("expected identifier");
    return src.substr(start, pos - start);
  }

  double number() {
    skip_ws();
    size_t start = pos;
    while (pos < src.size() &&
           (std::isdigit(static_cast<unsigned char>(src[pos])) ||
            src[pos] == '.'))
      advance(1);
    if (pos < src.size() && (src[pos] == 'e' || src[pos] == 'E')) {
      const size_t save_pos = pos;
      const int save_line = line, save_col = col;
      advance(1);
      if (pos < src.size() && (src[pos] == '+' || src[pos] == '-')) advance(1);
      if (pos < src.size() &&
          std::isdigit(static_cast<unsigned char>(src[pos]))) {
        while (pos < src.size() &&
               std::isdigit(static_cast<unsigned char>(src[pos])))
          advance(1);
      } else {
        // "2e" with no exponent digits: leave 'e' to the caller
        pos = save_pos;
        line = save_line;
        col = save_col;
      }
    }
    if (start == pos) fail("expected number");
    const std::string tok = src.substr(start, pos - start);
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size())
      fail("malformed number '" + tok + "'");
    return v;
  }

  // Signed unit literal: +1 or -1 (sign optional).
  int sign_literal() {
    int s = 1;
    if (eat('-'))
      s = -1;
    else
      eat('+');
    if (number() != 1.0) fail("expected +1 or -1");
    return s;
  }
};

// Parses one expression starting at the lexer cursor; stops at any token
// that cannot extend the expression (',', ';', ')').
ExprPtr parse_expression(Lexer& lx);

}  // namespace forge::parse_detail
