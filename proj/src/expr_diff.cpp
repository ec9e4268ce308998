#include <cmath>

#include "phaseplane/expr.hpp"

namespace phaseplane {
namespace {

// Builders that fold constants and drop additive zeros / multiplicative ones.
Expr num(double v) { return Expr::number(v); }

Expr neg(const Expr& a) {
  if (a.is_number()) return num(-a.value());
  if (a.kind() == Expr::Kind::Negate) return a.operand();
  return Expr::negate(a);
}

Expr add(const Expr& a, const Expr& b) {
  if (a.is_number() && b.is_number()) return num(a.value() + b.value());
  if (a.is_number(0.0)) return b;
  if (b.is_number(0.0)) return a;
  return Expr::binary(BinaryOp::Add, a, b);
}

Expr sub(const Expr& a, const Expr& b) {
  if (a.is_number() && b.is_number()) return num(a.value() - b.value());
  if (b.is_number(0.0)) return a;
  if (a.is_number(0.0)) return neg(b);
  return Expr::binary(BinaryOp::Sub, a, b);
}

Expr mul(const Expr& a, const Expr& b) {
  if (a.is_number() && b.is_number()) return num(a.value() * b.value());
  if (a.is_number(0.0) || b.is_number(0.0)) return num(0.0);
  if (a.is_number(1.0)) return b;
  if (b.is_number(1.0)) return a;
  if (a.is_number(-1.0)) return neg(b);
  if (b.is_number(-1.0)) return neg(a);
  return Expr::binary(BinaryOp::Mul, a, b);
}

Expr div(const Expr& a, const Expr& b) {
  if (a.is_number() && b.is_number() && b.value() != 0.0) return num(a.value() / b.value());
  if (a.is_number(0.0)) return num(0.0);
  if (b.is_number(1.0)) return a;
  return Expr::binary(BinaryOp::Div, a, b);
}

Expr pow(const Expr& a, const Expr& b) {
  if (b.is_number(1.0)) return a;
  if (b.is_number(0.0)) return num(1.0);
  if (a.is_number() && b.is_number() && a.value() > 0.0) return num(std::pow(a.value(), b.value()));
  return Expr::binary(BinaryOp::Pow, a, b);
}

Expr fn(Function f, const Expr& a) { return Expr::call(f, a); }

Expr d(const Expr& e, std::string_view var);

Expr d_call(const Expr& e, std::string_view var) {
  const Expr& u = e.operand();
  Expr du = d(u, var);
  if (du.is_number(0.0)) return num(0.0);
  switch (e.function()) {
    case Function::Sin:
      return mul(fn(Function::Cos, u), du);
    case Function::Cos:
      return mul(neg(fn(Function::Sin, u)), du);
    case Function::Tan:
      return div(du, pow(fn(Function::Cos, u), num(2.0)));
    case Function::Exp:
      return mul(e, du);
    case Function::Ln:
      return div(du, u);
    case Function::Sqrt:
      return div(du, mul(num(2.0), e));
    case Function::Abs:
      return mul(div(u, e), du);
  }
  return num(0.0);
}

Expr d_pow(const Expr& e, std::string_view var) {
  const Expr& u = e.lhs();
  const Expr& v = e.rhs();
  const bool base_varies = u.depends_on(var);
  const bool exponent_varies = v.depends_on(var);
  if (!exponent_varies) {
    if (!base_varies) return num(0.0);
    // v * u^(v-1) * u'
    return mul(mul(v, pow(u, sub(v, num(1.0)))), d(u, var));
  }
  if (!base_varies) {
    // u^v * ln(u) * v'
    return mul(mul(e, fn(Function::Ln, u)), d(v, var));
  }
  // u^v = exp(v ln u):  u^v * (v' ln u + v u'/u)
  return mul(e, add(mul(d(v, var), fn(Function::Ln, u)), div(mul(v, d(u, var)), u)));
}

Expr d(const Expr& e, std::string_view var) {
  switch (e.kind()) {
    case Expr::Kind::Number:
      return num(0.0);
    case Expr::Kind::Identifier:
      return num(e.name() == var ? 1.0 : 0.0);
    case Expr::Kind::Negate:
      return neg(d(e.operand(), var));
    case Expr::Kind::Call:
      return d_call(e, var);
    case Expr::Kind::Binary: {
      const Expr& a = e.lhs();
      const Expr& b = e.rhs();
      switch (e.op()) {
        case BinaryOp::Add:
          return add(d(a, var), d(b, var));
        case BinaryOp::Sub:
          return sub(d(a, var), d(b, var));
        case BinaryOp::Mul:
          return add(mul(d(a, var), b), mul(a, d(b, var)));
        case BinaryOp::Div: {
          Expr da = d(a, var);
          Expr db = d(b, var);
          if (db.is_number(0.0)) return div(da, b);
          return div(sub(mul(da, b), mul(a, db)), pow(b, num(2.0)));
        }
        case BinaryOp::Pow:
          return d_pow(e, var);
      }
    }
  }
  return num(0.0);
}

}  // namespace

Expr differentiate(const Expr& e, std::string_view var) { return d(e, var); }

}  // namespace phaseplane
