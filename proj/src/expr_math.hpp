#pragma once

#include <cmath>

#include "phaseplane/error.hpp"
#include "phaseplane/expr.hpp"

namespace phaseplane::detail {

inline double apply_binary(BinaryOp op, double a, double b) {
  switch (op) {
    case BinaryOp::Add:
      return a + b;
    case BinaryOp::Sub:
      return a - b;
    case BinaryOp::Mul:
      return a * b;
    case BinaryOp::Div:
      if (b == 0.0) throw DomainError("division", b);
      return a / b;
    case BinaryOp::Pow:
      if (a == 0.0 && b < 0.0) throw DomainError("power", a);
      if (a < 0.0 && b != std::trunc(b)) throw DomainError("power", a);
      return std::pow(a, b);
  }
  return 0.0;
}

inline double apply_function(Function f, double x) {
  switch (f) {
    case Function::Sin:
      return std::sin(x);
    case Function::Cos:
      return std::cos(x);
    case Function::Tan:
      return std::tan(x);
    case Function::Exp:
      return std::exp(x);
    case Function::Ln:
      if (x <= 0.0) throw DomainError("ln", x);
      return std::log(x);
    case Function::Sqrt:
      if (x < 0.0) throw DomainError("sqrt", x);
      return std::sqrt(x);
    case Function::Abs:
      return std::fabs(x);
  }
  return 0.0;
}

}  // namespace phaseplane::detail
