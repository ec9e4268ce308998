#include <cctype>
#include <charconv>
#include <string>

#include "phaseplane/error.hpp"
#include "phaseplane/expr.hpp"

namespace phaseplane {
namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse_all() {
    skip_ws();
    if (at_end()) throw ParseError("empty expression", pos_);
    Expr e = parse_expr();
    skip_ws();
    if (!at_end()) throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    return e;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (!at_end() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = Expr::binary(BinaryOp::Add, lhs, parse_term());
      } else if (accept('-')) {
        lhs = Expr::binary(BinaryOp::Sub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_term() {
    Expr lhs = parse_factor();
    for (;;) {
      if (accept('*')) {
        lhs = Expr::binary(BinaryOp::Mul, lhs, parse_factor());
      } else if (accept('/')) {
        lhs = Expr::binary(BinaryOp::Div, lhs, parse_factor());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_factor() {
    if (accept('-')) return Expr::negate(parse_factor());
    Expr base = parse_atom();
    if (accept('^')) return Expr::binary(BinaryOp::Pow, base, parse_factor());
    return base;
  }

  Expr parse_atom() {
    skip_ws();
    if (at_end()) throw ParseError("unexpected end of input", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr inner = parse_expr();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return inner;
    }
    if (is_digit(c)) return parse_number();
    if (is_ident_start(c)) {
      const std::size_t start = pos_;
      while (!at_end() && is_ident_char(text_[pos_])) ++pos_;
      std::string name(text_.substr(start, pos_ - start));
      skip_ws();
      if (!at_end() && text_[pos_] == '(') {
        auto fn = function_from_name(name);
        if (!fn) throw UnknownFunctionError(name, start);
        ++pos_;
        Expr arg = parse_expr();
        if (!accept(')')) throw ParseError("expected ')'", pos_);
        return Expr::call(*fn, arg);
      }
      return Expr::identifier(std::move(name));
    }
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  // digits ["." digits] [("e"|"E") ["+"|"-"] digits]
  Expr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      const std::size_t from = pos_;
      while (!at_end() && is_digit(text_[pos_])) ++pos_;
      return pos_ > from;
    };
    digits();
    if (!at_end() && text_[pos_] == '.') {
      ++pos_;
      if (!digits()) throw ParseError("expected digits after '.'", pos_);
    }
    if (!at_end() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      ++pos_;
      if (!at_end() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (!digits()) throw ParseError("expected exponent digits", pos_);
    }
    double value = 0.0;
    const char* first = text_.data() + start;
    const char* last = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) throw ParseError("malformed number", start);
    return Expr::number(value);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text) { return Parser(text).parse_all(); }

}  // namespace phaseplane
