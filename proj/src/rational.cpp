#include <cmath>

#include "phaseplane/error.hpp"
#include "phaseplane/expr.hpp"

namespace phaseplane {
namespace {

// sum_k coeffs[k] * x^(low + k)
struct Laurent {
  int low = 0;
  std::vector<double> coeffs;

  static Laurent constant(double c) { return {0, {c}}; }

  bool is_zero() const {
    for (double c : coeffs) {
      if (c != 0.0) return false;
    }
    return true;
  }
};

Laurent normalize(Laurent p) {
  while (!p.coeffs.empty() && p.coeffs.back() == 0.0) p.coeffs.pop_back();
  std::size_t lead = 0;
  while (lead < p.coeffs.size() && p.coeffs[lead] == 0.0) ++lead;
  if (lead > 0) {
    p.coeffs.erase(p.coeffs.begin(), p.coeffs.begin() + static_cast<std::ptrdiff_t>(lead));
    p.low += static_cast<int>(lead);
  }
  if (p.coeffs.empty()) p.low = 0;
  return p;
}

Laurent operator*(const Laurent& a, const Laurent& b) {
  if (a.coeffs.empty() || b.coeffs.empty()) return {};
  Laurent out{a.low + b.low, std::vector<double>(a.coeffs.size() + b.coeffs.size() - 1, 0.0)};
  for (std::size_t i = 0; i < a.coeffs.size(); ++i) {
    for (std::size_t j = 0; j < b.coeffs.size(); ++j) out.coeffs[i + j] += a.coeffs[i] * b.coeffs[j];
  }
  return normalize(out);
}

Laurent combine(const Laurent& a, const Laurent& b, double sign) {
  if (a.coeffs.empty()) {
    Laurent out = b;
    for (double& c : out.coeffs) c *= sign;
    return normalize(out);
  }
  if (b.coeffs.empty()) return a;
  const int low = std::min(a.low, b.low);
  const int high = std::max(a.low + static_cast<int>(a.coeffs.size()),
                            b.low + static_cast<int>(b.coeffs.size()));
  Laurent out{low, std::vector<double>(static_cast<std::size_t>(high - low), 0.0)};
  for (std::size_t i = 0; i < a.coeffs.size(); ++i) {
    out.coeffs[static_cast<std::size_t>(a.low - low) + i] += a.coeffs[i];
  }
  for (std::size_t i = 0; i < b.coeffs.size(); ++i) {
    out.coeffs[static_cast<std::size_t>(b.low - low) + i] += sign * b.coeffs[i];
  }
  return normalize(out);
}

struct Ratio {
  Laurent num;
  Laurent den;
};

Ratio power(const Ratio& r, long k) {
  Ratio out{Laurent::constant(1.0), Laurent::constant(1.0)};
  const Ratio base = k >= 0 ? r : Ratio{r.den, r.num};
  for (long i = 0; i < std::labs(k); ++i) {
    out.num = out.num * base.num;
    out.den = out.den * base.den;
  }
  return out;
}

Ratio convert(const Expr& e, std::string_view var, const Binding& params) {
  if (!e.depends_on(var)) return {Laurent::constant(evaluate(e, params)), Laurent::constant(1.0)};
  switch (e.kind()) {
    case Expr::Kind::Number:
      return {Laurent::constant(e.value()), Laurent::constant(1.0)};
    case Expr::Kind::Identifier:
      return {Laurent{1, {1.0}}, Laurent::constant(1.0)};
    case Expr::Kind::Negate: {
      Ratio r = convert(e.operand(), var, params);
      r.num = combine({}, r.num, -1.0);
      return r;
    }
    case Expr::Kind::Call:
      throw NotRationalError("function " + std::string(function_name(e.function())) +
                             " is not rational in " + std::string(var));
    case Expr::Kind::Binary: {
      if (e.op() == BinaryOp::Pow) {
        if (e.rhs().depends_on(var)) {
          throw NotRationalError("exponent depends on " + std::string(var));
        }
        const double k = evaluate(e.rhs(), params);
        if (k != std::trunc(k)) throw NotRationalError("non-integer power of " + std::string(var));
        return power(convert(e.lhs(), var, params), static_cast<long>(k));
      }
      Ratio a = convert(e.lhs(), var, params);
      Ratio b = convert(e.rhs(), var, params);
      switch (e.op()) {
        case BinaryOp::Add:
          return {combine(a.num * b.den, b.num * a.den, 1.0), a.den * b.den};
        case BinaryOp::Sub:
          return {combine(a.num * b.den, b.num * a.den, -1.0), a.den * b.den};
        case BinaryOp::Mul:
          return {a.num * b.num, a.den * b.den};
        case BinaryOp::Div:
          return {a.num * b.den, a.den * b.num};
        case BinaryOp::Pow:
          break;
      }
    }
  }
  throw NotRationalError("unsupported expression");
}

double eval_poly(int low, const std::vector<double>& coeffs, double x) {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc * std::pow(x, low);
}

// Index of the highest nonzero coefficient, or -1 if all zero.
int top_index(const std::vector<double>& c) {
  for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i) {
    if (c[static_cast<std::size_t>(i)] != 0.0) return i;
  }
  return -1;
}

}  // namespace

double RationalFunctionCoeffs::operator()(double x) const {
  return eval_poly(numerator_lowest_power, numerator, x) /
         eval_poly(denominator_lowest_power, denominator, x);
}

LimitResult rational_limit_at_infinity(const RationalFunctionCoeffs& r, LimitMode mode) {
  const int top_den = top_index(r.denominator);
  if (top_den < 0) throw Error("denominator is identically zero");
  const int top_num = top_index(r.numerator);
  if (top_num < 0) return LimitResult::finite(0.0);

  // Multiplying both parts by x^m to clear negative powers shifts both
  // degrees equally, so comparing the shifted degrees directly is enough.
  const int deg_num = r.numerator_lowest_power + top_num;
  const int deg_den = r.denominator_lowest_power + top_den;
  const double lead_num = r.numerator[static_cast<std::size_t>(top_num)];
  const double lead_den = r.denominator[static_cast<std::size_t>(top_den)];

  if (deg_num < deg_den) return LimitResult::finite(0.0);
  if (deg_num == deg_den) return LimitResult::finite(lead_num / lead_den);
  if (mode == LimitMode::FiniteOnly) return {LimitResult::Kind::NoFiniteLimit, 0.0};
  return {(lead_num > 0.0) == (lead_den > 0.0) ? LimitResult::Kind::PlusInfinity
                                               : LimitResult::Kind::MinusInfinity,
          0.0};
}

RationalFunctionCoeffs to_rational(const Expr& e, std::string_view var, const Binding& params) {
  Ratio r = convert(e, var, params);
  r.num = normalize(r.num);
  r.den = normalize(r.den);
  if (r.den.is_zero()) throw Error("denominator is identically zero");
  return {r.num.low, r.num.coeffs, r.den.low, r.den.coeffs};
}

AffineApprox2D linear_approx_2d(const Expr& f, double x0, double y0, const Binding& env,
                                std::string_view xname, std::string_view yname) {
  Binding at = env;
  at.insert_or_assign(std::string(xname), x0);
  at.insert_or_assign(std::string(yname), y0);
  AffineApprox2D out;
  out.x0 = x0;
  out.y0 = y0;
  out.base = evaluate(f, at);
  out.slope_x = evaluate(differentiate(f, xname), at);
  out.slope_y = evaluate(differentiate(f, yname), at);
  return out;
}

}  // namespace phaseplane
