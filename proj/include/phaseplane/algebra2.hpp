#pragma once

#include <utility>
#include <variant>

namespace phaseplane {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double k, Vec2 v) { return {k * v.x, k * v.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;

  double norm_inf() const;
};

/// a.x*b.y - a.y*b.x; zero iff the vectors are collinear.
double cross(Vec2 a, Vec2 b);

/// Complex scalar re + i*im.
struct ComplexNumber {
  double re = 0.0;
  double im = 0.0;

  ComplexNumber conj() const { return {re, -im}; }
  double modulus() const;
  double modulus_squared() const { return re * re + im * im; }

  friend ComplexNumber operator+(ComplexNumber a, ComplexNumber b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend ComplexNumber operator-(ComplexNumber a, ComplexNumber b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend ComplexNumber operator*(ComplexNumber a, ComplexNumber b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  /// Multiplies through by the conjugate of the divisor. Throws on 0.
  friend ComplexNumber operator/(ComplexNumber a, ComplexNumber b);
  friend bool operator==(ComplexNumber a, ComplexNumber b) = default;
};

/// Row-major 2x2 real matrix [[a, b], [c, d]].
struct Mat2 {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;

  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  /// Matrix with the given vectors as columns.
  static Mat2 from_columns(Vec2 first, Vec2 second) { return {first.x, second.x, first.y, second.y}; }

  double det() const { return a * d - c * b; }
  double trace() const { return a + d; }
  double discriminant() const { return trace() * trace() - 4.0 * det(); }
  /// Max absolute row sum.
  double norm_inf() const;

  Vec2 operator*(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
  friend bool operator==(const Mat2&, const Mat2&) = default;
};

struct RealDistinct {
  double lo;  // lo < hi
  double hi;
};
struct RealDouble {
  double value;
};
/// The pair alpha +/- i*beta with beta > 0.
struct ComplexConjugate {
  double alpha;
  double beta;
};
using RootPair = std::variant<RealDistinct, RealDouble, ComplexConjugate>;

/// Real parts of both roots, ascending for real cases.
std::pair<double, double> real_parts(const RootPair& roots);
/// Roots as complex numbers; conjugate pairs come back as (alpha+i beta, alpha-i beta).
std::pair<ComplexNumber, ComplexNumber> as_complex(const RootPair& roots);

/// Roots of lambda^2 + p*lambda + q = 0. A discriminant within 1e-12
/// (relative to p^2 and 4|q|) of zero collapses to RealDouble.
RootPair quadratic_roots(double p, double q);

/// Roots of the characteristic equation lambda^2 - tr*lambda + det = 0.
RootPair eigenvalues(const Mat2& m);

/// Eigen data in the unnormalized form given by the closed-form formulas.
/// Real cases: v1 belongs to the smaller eigenvalue (both slots hold the same
/// vector for a non-scalar double root). Complex case: v = vr + i*vi is the
/// eigenvector of alpha + i*beta.
struct EigenSystem {
  RootPair values;
  Vec2 v1;
  Vec2 v2;
  Vec2 vr;
  Vec2 vi;

  bool is_complex() const { return std::holds_alternative<ComplexConjugate>(values); }
};

/// Eigenvector of a real eigenvalue by the express formula (-b, a - lambda),
/// falling back to (d - lambda, -c) when the first vanishes.
Vec2 express_eigenvector(const Mat2& m, double lambda);

EigenSystem eigenvectors(const Mat2& m, const RootPair& values);
inline EigenSystem eigen_system(const Mat2& m) { return eigenvectors(m, eigenvalues(m)); }

/// Cramer's rule. Throws SingularMatrixError when |det| <= 1e-12 * ||A||^2.
Vec2 cramer_solve(const Mat2& a, Vec2 rhs);

}  // namespace phaseplane
