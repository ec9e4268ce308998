#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace phaseplane {

enum class BinaryOp { Add, Sub, Mul, Div, Pow };

enum class Function { Sin, Cos, Tan, Exp, Ln, Sqrt, Abs };

std::string_view function_name(Function f);
std::optional<Function> function_from_name(std::string_view name);

/// Identifier -> value map used for evaluation.
using Binding = std::map<std::string, double, std::less<>>;

/// Immutable expression tree. Copies share structure; every node is const
/// once built, so an Expr may be read from any number of threads.
class Expr {
 public:
  enum class Kind { Number, Identifier, Negate, Binary, Call };

  /// The number 0.
  Expr();

  static Expr number(double value);
  static Expr identifier(std::string name);
  static Expr negate(Expr operand);
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs);
  static Expr call(Function f, Expr argument);

  Kind kind() const;
  double value() const;             // Number
  const std::string& name() const;  // Identifier
  BinaryOp op() const;              // Binary
  Function function() const;        // Call
  const Expr& operand() const;      // Negate, Call
  const Expr& lhs() const;          // Binary
  const Expr& rhs() const;          // Binary

  bool is_number() const { return kind() == Kind::Number; }
  bool is_number(double v) const { return is_number() && value() == v; }

  std::set<std::string> identifiers() const;
  bool depends_on(std::string_view var) const;

  /// Infix text that parses back to an identical tree.
  std::string render() const;
  /// Prefix form, e.g. "(+ (* 2 x) 1)"; handy for checking tree shape.
  std::string sexpr() const;

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Parses infix text. Grammar:
///   expr   := term (("+"|"-") term)*
///   term   := factor (("*"|"/") factor)*
///   factor := "-" factor | atom ("^" factor)?
///   atom   := NUMBER | IDENT | IDENT "(" expr ")" | "(" expr ")"
/// Power is right-associative; unary minus binds looser than power and
/// tighter than the binary operators, so "-x^2" is -(x^2).
Expr parse(std::string_view text);

/// Tree-walking evaluation. Throws UnboundIdentifierError or DomainError.
double evaluate(const Expr& e, const Binding& env);

/// Symbolic partial derivative; identifiers other than `var` are constants.
/// Only constant folding is applied to the result.
Expr differentiate(const Expr& e, std::string_view var);

/// Flattened postfix program with identifiers resolved to slot indices.
/// Used on hot paths (root finding, integration) where map lookups per
/// node would dominate.
class CompiledExpr {
 public:
  CompiledExpr() = default;
  /// Every identifier in `e` must appear in `slots`.
  CompiledExpr(const Expr& e, std::span<const std::string> slots);

  double operator()(std::span<const double> values) const;

 private:
  enum class OpCode { Const, Slot, Neg, Add, Sub, Mul, Div, Pow, Call };
  struct Instr {
    OpCode code;
    double constant = 0.0;
    std::size_t slot = 0;
    Function function = Function::Sin;
  };
  void emit(const Expr& e, std::span<const std::string> slots, std::size_t depth);

  std::vector<Instr> code_;
  std::size_t max_depth_ = 0;
};

// Rational functions and limits at infinity

/// p(x)/q(x) with coefficients by ascending power. The lowest-power fields
/// allow Laurent terms such as b/N: coefficient k of the numerator multiplies
/// x^(numerator_lowest_power + k).
struct RationalFunctionCoeffs {
  int numerator_lowest_power = 0;
  std::vector<double> numerator;
  int denominator_lowest_power = 0;
  std::vector<double> denominator;

  double operator()(double x) const;
};

struct LimitResult {
  enum class Kind { Finite, PlusInfinity, MinusInfinity, NoFiniteLimit };
  Kind kind = Kind::NoFiniteLimit;
  double value = 0.0;  // only meaningful for Finite

  static LimitResult finite(double v) { return {Kind::Finite, v}; }
  bool is_finite() const { return kind == Kind::Finite; }
};

/// FiniteOnly collapses the two infinite cases into NoFiniteLimit.
enum class LimitMode { Extended, FiniteOnly };

/// Limit as x -> +infinity by comparing highest powers.
/// Throws Error when the denominator is identically zero.
LimitResult rational_limit_at_infinity(const RationalFunctionCoeffs& r,
                                       LimitMode mode = LimitMode::Extended);

/// Converts a polynomial-ratio expression in `var` to coefficient form.
/// Other identifiers must be bound in `params`. Throws NotRationalError for
/// function calls or non-integer powers of `var`.
RationalFunctionCoeffs to_rational(const Expr& e, std::string_view var, const Binding& params);

// Linear approximation

struct AffineApprox2D {
  double base = 0.0;  // f(x0, y0)
  double slope_x = 0.0;
  double slope_y = 0.0;
  double x0 = 0.0;
  double y0 = 0.0;

  double operator()(double x, double y) const {
    return base + slope_x * (x - x0) + slope_y * (y - y0);
  }
  /// Constant term c of the form c + slope_x*x + slope_y*y.
  double intercept() const { return base - slope_x * x0 - slope_y * y0; }
};

AffineApprox2D linear_approx_2d(const Expr& f, double x0, double y0, const Binding& env,
                                std::string_view xname = "x", std::string_view yname = "y");

}  // namespace phaseplane
