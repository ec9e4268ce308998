#include "phaseplane/algebra2.hpp"

#include <algorithm>
#include <cmath>

#include "phaseplane/error.hpp"

namespace phaseplane {

double Vec2::norm_inf() const { return std::max(std::fabs(x), std::fabs(y)); }

double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

double ComplexNumber::modulus() const { return std::hypot(re, im); }

ComplexNumber operator/(ComplexNumber a, ComplexNumber b) {
  const double denom = b.modulus_squared();
  if (denom == 0.0) throw DomainError("complex division", 0.0);
  const ComplexNumber num = a * b.conj();
  return {num.re / denom, num.im / denom};
}

double Mat2::norm_inf() const {
  return std::max(std::fabs(a) + std::fabs(b), std::fabs(c) + std::fabs(d));
}

std::pair<double, double> real_parts(const RootPair& roots) {
  if (const auto* r = std::get_if<RealDistinct>(&roots)) return {r->lo, r->hi};
  if (const auto* r = std::get_if<RealDouble>(&roots)) return {r->value, r->value};
  const auto& z = std::get<ComplexConjugate>(roots);
  return {z.alpha, z.alpha};
}

std::pair<ComplexNumber, ComplexNumber> as_complex(const RootPair& roots) {
  if (const auto* z = std::get_if<ComplexConjugate>(&roots)) {
    return {{z->alpha, z->beta}, {z->alpha, -z->beta}};
  }
  auto [lo, hi] = real_parts(roots);
  return {{lo, 0.0}, {hi, 0.0}};
}

RootPair quadratic_roots(double p, double q) {
  const double disc = p * p - 4.0 * q;
  const double window = 1e-12 * std::max(p * p, 4.0 * std::fabs(q));
  if (std::fabs(disc) <= window) return RealDouble{-p / 2.0};
  if (disc < 0.0) return ComplexConjugate{-p / 2.0, std::sqrt(-disc) / 2.0};
  // Avoids cancellation between -p and the square root.
  const double s = -(p + std::copysign(std::sqrt(disc), p)) / 2.0;
  const double r1 = s;
  const double r2 = q / s;
  return RealDistinct{std::min(r1, r2), std::max(r1, r2)};
}

RootPair eigenvalues(const Mat2& m) { return quadratic_roots(-m.trace(), m.det()); }

Vec2 express_eigenvector(const Mat2& m, double lambda) {
  const double tiny = 1e-12 * m.norm_inf();
  const Vec2 primary{-m.b, m.a - lambda};
  if (primary.norm_inf() > tiny) return primary;
  const Vec2 fallback{m.d - lambda, -m.c};
  if (fallback.norm_inf() > tiny) return fallback;
  throw InternalInconsistency("both eigenvector formulas vanish");
}

namespace {

// m == lambda * I up to rounding: every vector is an eigenvector.
bool is_scalar_multiple_of_identity(const Mat2& m, double lambda) {
  const double tiny = 1e-12 * std::max(1.0, m.norm_inf());
  return std::fabs(m.a - lambda) <= tiny && std::fabs(m.d - lambda) <= tiny &&
         std::fabs(m.b) <= tiny && std::fabs(m.c) <= tiny;
}

}  // namespace

EigenSystem eigenvectors(const Mat2& m, const RootPair& values) {
  EigenSystem out{values, {}, {}, {}, {}};
  if (const auto* r = std::get_if<RealDistinct>(&values)) {
    out.v1 = express_eigenvector(m, r->lo);
    out.v2 = express_eigenvector(m, r->hi);
  } else if (const auto* r = std::get_if<RealDouble>(&values)) {
    if (is_scalar_multiple_of_identity(m, r->value)) {
      out.v1 = {1.0, 0.0};
      out.v2 = {0.0, 1.0};
    } else {
      out.v1 = express_eigenvector(m, r->value);
      out.v2 = out.v1;
    }
  } else {
    const auto& z = std::get<ComplexConjugate>(values);
    const double tiny = 1e-12 * m.norm_inf();
    // (-b, a - alpha - i beta)
    out.vr = {-m.b, m.a - z.alpha};
    out.vi = {0.0, -z.beta};
    if (std::max(out.vr.norm_inf(), out.vi.norm_inf()) <= tiny) {
      // (d - alpha - i beta, -c)
      out.vr = {m.d - z.alpha, -m.c};
      out.vi = {-z.beta, 0.0};
    }
    if (std::max(out.vr.norm_inf(), out.vi.norm_inf()) <= tiny) {
      throw InternalInconsistency("both eigenvector formulas vanish");
    }
  }
  return out;
}

Vec2 cramer_solve(const Mat2& a, Vec2 rhs) {
  const double det = a.det();
  const double norm = a.norm_inf();
  if (std::fabs(det) <= 1e-12 * norm * norm) throw SingularMatrixError("matrix is singular");
  const double det_x = rhs.x * a.d - a.b * rhs.y;
  const double det_y = a.a * rhs.y - rhs.x * a.c;
  return {det_x / det, det_y / det};
}

}  // namespace phaseplane
