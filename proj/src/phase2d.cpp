#include "phaseplane/phase2d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "phaseplane/error.hpp"
#include "phaseplane/format.hpp"

namespace phaseplane {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string where(Vec2 p) { return "(" + format_shortest(p.x) + ", " + format_shortest(p.y) + ")"; }

Vec2 solve_newton_step(const Mat2& j, Vec2 f) {
  const double det = j.det();
  return {(-j.d * f.x + j.b * f.y) / det, (j.c * f.x - j.a * f.y) / det};
}

double norm2_squared(Vec2 v) { return v.x * v.x + v.y * v.y; }

// Intersection of segments ab and cd, if they cross (endpoints included).
std::optional<Vec2> segment_intersection(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const Vec2 r = b - a;
  const Vec2 s = d - c;
  const double denom = cross(r, s);
  if (denom == 0.0) return std::nullopt;
  const double t = cross(c - a, s) / denom;
  const double u = cross(c - a, r) / denom;
  if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return std::nullopt;
  return a + t * r;
}

Sign sign_of(double v, double zero) {
  if (std::fabs(v) <= zero) return Sign::Zero;
  return v > 0.0 ? Sign::Pos : Sign::Neg;
}

// Sign algebra used by classify_from_signs; Unknown means either sign is
// possible for some choice of magnitudes.
enum class S { Neg, Zero, Pos, Unknown };

S lift(Sign s) {
  switch (s) {
    case Sign::Neg:
      return S::Neg;
    case Sign::Zero:
      return S::Zero;
    case Sign::Pos:
      return S::Pos;
  }
  return S::Unknown;
}

S negate(S a) {
  if (a == S::Neg) return S::Pos;
  if (a == S::Pos) return S::Neg;
  return a;
}

S mul(S a, S b) {
  if (a == S::Zero || b == S::Zero) return S::Zero;
  if (a == S::Unknown || b == S::Unknown) return S::Unknown;
  return a == b ? S::Pos : S::Neg;
}

S add(S a, S b) {
  if (a == S::Zero) return b;
  if (b == S::Zero) return a;
  if (a == b) return a;
  return S::Unknown;
}

}  // namespace

double Rect::diagonal() const { return std::hypot(width(), height()); }

void Model2D::validate() const {
  if (!(domain.x_lo < domain.x_hi) || !(domain.y_lo < domain.y_hi)) {
    throw ModelError("domain must satisfy x_lo < x_hi and y_lo < y_hi");
  }
  if (x_name == y_name) throw ModelError("the two variables need distinct names");
  for (const Expr* e : {&f, &g}) {
    for (const auto& name : e->identifiers()) {
      if (name != x_name && name != y_name && !params.count(name)) {
        throw ModelError("undeclared identifier " + name);
      }
    }
  }
}

Model2D Model2D::with_param(const std::string& name, double value) const {
  Model2D out = *this;
  out.params.insert_or_assign(name, value);
  return out;
}

VectorField2D::VectorField2D(const Model2D& m) {
  m.validate();
  slots_ = {m.x_name, m.y_name};
  values_ = {0.0, 0.0};
  for (const auto& [name, value] : m.params) {
    if (name == m.x_name || name == m.y_name) continue;
    slots_.push_back(name);
    values_.push_back(value);
  }
  f_ = CompiledExpr(m.f, slots_);
  g_ = CompiledExpr(m.g, slots_);
  fx_ = CompiledExpr(differentiate(m.f, m.x_name), slots_);
  fy_ = CompiledExpr(differentiate(m.f, m.y_name), slots_);
  gx_ = CompiledExpr(differentiate(m.g, m.x_name), slots_);
  gy_ = CompiledExpr(differentiate(m.g, m.y_name), slots_);
}

double VectorField2D::eval(const CompiledExpr& c, Vec2 p) const {
  thread_local std::vector<double> scratch;
  scratch = values_;
  scratch[0] = p.x;
  scratch[1] = p.y;
  return c(scratch);
}

Vec2 VectorField2D::operator()(Vec2 p) const { return {eval(f_, p), eval(g_, p)}; }

Mat2 VectorField2D::jacobian(Vec2 p) const {
  return {eval(fx_, p), eval(fy_, p), eval(gx_, p), eval(gy_, p)};
}

double field_scale(const Model2D& m) {
  const VectorField2D field(m);
  const Rect& d = m.domain;
  double scale = 1.0;
  constexpr int n = 32;
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      try {
        const Vec2 v = field({d.x_lo + d.width() * i / n, d.y_lo + d.height() * j / n});
        if (std::isfinite(v.x)) scale = std::max(scale, std::fabs(v.x));
        if (std::isfinite(v.y)) scale = std::max(scale, std::fabs(v.y));
      } catch (const DomainError&) {
      }
    }
  }
  return scale;
}

// A couple of full Newton steps past the tolerance, each kept only if it
// lowers the residual; removes the leftover 1e-13 noise at exact roots.
Vec2 polish(const VectorField2D& field, Vec2 p, Vec2 fp) {
  for (int k = 0; k < 3 && fp.norm_inf() > 0.0; ++k) {
    try {
      const Mat2 j = field.jacobian(p);
      const double nj = j.norm_inf();
      if (!(std::fabs(j.det()) > 1e-14 * nj * nj)) break;
      const Vec2 q = p + solve_newton_step(j, fp);
      const Vec2 fq = field(q);
      if (!(fq.norm_inf() < fp.norm_inf())) break;
      p = q;
      fp = fq;
    } catch (const DomainError&) {
      break;
    }
  }
  return p;
}

std::optional<Vec2> newton_2d(const VectorField2D& field, Vec2 seed, double tolerance) {
  Vec2 p = seed;
  Vec2 fp;
  try {
    fp = field(p);
  } catch (const DomainError&) {
    return std::nullopt;
  }
  for (int it = 0; it <= 50; ++it) {
    if (!std::isfinite(fp.x) || !std::isfinite(fp.y)) return std::nullopt;
    if (fp.norm_inf() <= tolerance) return polish(field, p, fp);
    if (it == 50) break;
    Mat2 j;
    try {
      j = field.jacobian(p);
    } catch (const DomainError&) {
      return std::nullopt;
    }
    const double nj = j.norm_inf();
    Vec2 step;
    if (std::isfinite(j.det()) && std::fabs(j.det()) > 1e-14 * nj * nj && nj > 0.0) {
      step = solve_newton_step(j, fp);
    } else {
      // Steepest descent on |F|^2 / 2, with the step length that minimises
      // the linearised residual along the gradient.
      const Vec2 grad{j.a * fp.x + j.c * fp.y, j.b * fp.x + j.d * fp.y};
      const double gg = norm2_squared(grad);
      if (gg == 0.0) return std::nullopt;
      const double jg = norm2_squared(j * grad);
      step = (jg > 0.0 ? -gg / jg : -1.0) * grad;
    }
    const double r0 = norm2_squared(fp);
    double lambda = 1.0;
    bool moved = false;
    for (int k = 0; k < 30; ++k, lambda *= 0.5) {
      const Vec2 q = p + lambda * step;
      try {
        const Vec2 fq = field(q);
        if (norm2_squared(fq) < r0 * (1.0 - 1e-4 * lambda)) {
          p = q;
          fp = fq;
          moved = true;
          break;
        }
      } catch (const DomainError&) {
      }
    }
    if (!moved) return std::nullopt;
  }
  return std::nullopt;
}

std::vector<Vec2> find_equilibria_2d(const Model2D& m, EquilibriumSearchOptions options) {
  if (options.grid < 2) throw Error("equilibrium search needs a grid of at least 2");
  const VectorField2D field(m);
  const Rect& d = m.domain;
  const int n = options.grid;
  const double tolerance = 1e-10 * field_scale(m);

  std::vector<Vec2> values(static_cast<std::size_t>((n + 1) * (n + 1)));
  auto at = [&](int i, int j) -> Vec2& { return values[static_cast<std::size_t>(i * (n + 1) + j)]; };
  auto node = [&](int i, int j) {
    return Vec2{i == n ? d.x_hi : d.x_lo + d.width() * i / n, j == n ? d.y_hi : d.y_lo + d.height() * j / n};
  };
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      try {
        at(i, j) = field(node(i, j));
      } catch (const DomainError& e) {
        throw EvaluationError(where(node(i, j)), e);
      }
    }
  }

  std::vector<Vec2> seeds;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Vec2 c[4] = {at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)};
      double fmin = c[0].x, fmax = c[0].x, gmin = c[0].y, gmax = c[0].y;
      for (const Vec2& v : c) {
        fmin = std::min(fmin, v.x);
        fmax = std::max(fmax, v.x);
        gmin = std::min(gmin, v.y);
        gmax = std::max(gmax, v.y);
      }
      if (fmin <= 0.0 && fmax >= 0.0 && gmin <= 0.0 && gmax >= 0.0) {
        seeds.push_back(0.5 * (node(i, j) + node(i + 1, j + 1)));
      }
    }
  }

  const NullClineSet clines = extract_nullclines(m, n);
  for (const auto& a : clines.polylines) {
    if (a.kind != ClineKind::X) continue;
    for (const auto& b : clines.polylines) {
      if (b.kind != ClineKind::Y) continue;
      for (std::size_t i = 0; i + 1 < a.points.size(); ++i) {
        for (std::size_t k = 0; k + 1 < b.points.size(); ++k) {
          if (auto p = segment_intersection(a.points[i], a.points[i + 1], b.points[k], b.points[k + 1])) {
            seeds.push_back(*p);
          }
        }
      }
    }
  }

  const double slack = 1e-9 * d.diagonal();
  std::vector<Vec2> found;
  for (const Vec2& s : seeds) {
    auto p = newton_2d(field, s, tolerance);
    if (!p || !d.contains(*p, slack)) continue;
    found.push_back(*p);
  }

  std::sort(found.begin(), found.end(), [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  const double radius = 1e-6 * d.diagonal();
  std::vector<Vec2> unique;
  for (const Vec2& p : found) {
    const bool seen = std::any_of(unique.begin(), unique.end(), [&](Vec2 q) {
      return std::hypot(p.x - q.x, p.y - q.y) <= radius;
    });
    if (!seen) unique.push_back(p);
  }
  return unique;
}

Mat2 jacobian_at(const Model2D& m, Vec2 p) {
  const VectorField2D field(m);
  try {
    return field.jacobian(p);
  } catch (const DomainError& e) {
    throw EvaluationError(where(p), e);
  }
}

EquilibriumReport classify_equilibrium_2d(const Model2D& m, Vec2 p) {
  const VectorField2D field(m);
  Vec2 residual;
  try {
    residual = field(p);
  } catch (const DomainError& e) {
    throw EvaluationError(where(p), e);
  }
  if (!(residual.norm_inf() <= 1e-8 * field_scale(m))) {
    throw NotEquilibriumError(where(p) + " is not an equilibrium: residual " +
                              format_shortest(residual.norm_inf()));
  }
  EquilibriumReport r;
  r.location = p;
  r.jacobian = jacobian_at(m, p);
  r.det = r.jacobian.det();
  r.tr = r.jacobian.trace();
  r.discriminant = r.tr * r.tr - 4.0 * r.det;
  r.eigen = eigen_system(r.jacobian);
  r.classification = classify_linear(r.jacobian);
  return r;
}

std::string_view to_string(PartialClass c) {
  switch (c) {
    case PartialClass::Saddle:
      return "saddle";
    case PartialClass::StableNode:
      return "stable_node";
    case PartialClass::UnstableNode:
      return "unstable_node";
    case PartialClass::StableNodeOrSpiral:
      return "stable_node_or_spiral";
    case PartialClass::UnstableNodeOrSpiral:
      return "unstable_node_or_spiral";
    case PartialClass::Center:
      return "center";
    case PartialClass::UnstableUnknown:
      return "unstable_unknown";
    case PartialClass::Indeterminate:
      return "indeterminate";
  }
  return "?";
}

SignMat2 derive_sign_matrix(const Model2D& m, Vec2 eq, double h) {
  if (!(h > 0.0)) throw Error("probe offset h must be positive");
  const VectorField2D field(m);
  const Vec2 probes[2] = {{eq.x + h, eq.y}, {eq.x, eq.y + h}};
  Vec2 at[2];
  for (int k = 0; k < 2; ++k) {
    if (!m.domain.contains(probes[k])) throw Error("probe " + where(probes[k]) + " lies outside the domain");
    try {
      at[k] = field(probes[k]);
    } catch (const DomainError& e) {
      throw EvaluationError(where(probes[k]), e);
    }
  }
  const double scale = std::max({std::fabs(at[0].x), std::fabs(at[0].y), std::fabs(at[1].x), std::fabs(at[1].y)});
  const double zero = 1e-9 * scale;

  for (int k = 0; k < 2; ++k) {
    const Sign fs = sign_of(at[k].x, zero);
    const Sign gs = sign_of(at[k].y, zero);
    for (int s = 1; s < 8; ++s) {
      const Vec2 q = eq + (s / 8.0) * (probes[k] - eq);
      Vec2 v;
      try {
        v = field(q);
      } catch (const DomainError& e) {
        throw EvaluationError(where(q), e);
      }
      const Sign qf = sign_of(v.x, zero);
      const Sign qg = sign_of(v.y, zero);
      const bool f_flips = (qf == Sign::Pos && fs == Sign::Neg) || (qf == Sign::Neg && fs == Sign::Pos);
      const bool g_flips = (qg == Sign::Pos && gs == Sign::Neg) || (qg == Sign::Neg && gs == Sign::Pos);
      if (f_flips || g_flips) {
        throw NullclineCrossingError("probe towards " + where(probes[k]) +
                                     " crosses a null-cline; use a smaller h than " + format_shortest(h));
      }
    }
  }
  return {sign_of(at[0].x, zero), sign_of(at[1].x, zero), sign_of(at[0].y, zero), sign_of(at[1].y, zero)};
}

PartialClass classify_from_signs(const SignMat2& s) {
  const S a = lift(s.fx), b = lift(s.fy), c = lift(s.gx), d = lift(s.gy);
  const S det = add(mul(a, d), negate(mul(b, c)));
  const S tr = add(a, d);
  // D = (a - d)^2 + 4bc, so it is certainly non-negative when bc >= 0.
  const S bc = mul(b, c);
  const bool real_roots = bc == S::Pos || bc == S::Zero;

  if (det == S::Neg) return PartialClass::Saddle;
  if (det == S::Pos) {
    if (tr == S::Neg) return real_roots ? PartialClass::StableNode : PartialClass::StableNodeOrSpiral;
    if (tr == S::Pos) return real_roots ? PartialClass::UnstableNode : PartialClass::UnstableNodeOrSpiral;
    if (tr == S::Zero) return PartialClass::Center;
    return PartialClass::Indeterminate;
  }
  if (det == S::Unknown && tr == S::Pos) return PartialClass::UnstableUnknown;
  return PartialClass::Indeterminate;
}

}  // namespace phaseplane
