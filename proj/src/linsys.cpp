#include "phaseplane/linsys.hpp"

#include <algorithm>
#include <cmath>

#include "phaseplane/error.hpp"

namespace phaseplane {

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::Saddle:
      return "saddle";
    case Classification::StableNode:
      return "stable_node";
    case Classification::UnstableNode:
      return "unstable_node";
    case Classification::StableSpiral:
      return "stable_spiral";
    case Classification::UnstableSpiral:
      return "unstable_spiral";
    case Classification::Center:
      return "center";
    case Classification::Degenerate:
      return "degenerate";
  }
  return "degenerate";
}

bool is_stable(Classification c) {
  return c == Classification::StableNode || c == Classification::StableSpiral;
}

Classification classify_linear(const Mat2& m) {
  const double norm = m.norm_inf();
  const double eps = 1e-9 * std::max(1.0, norm * norm);
  const double det = m.det();
  const double tr = m.trace();
  if (std::fabs(det) <= eps) return Classification::Degenerate;
  if (det < 0.0) return Classification::Saddle;
  if (std::fabs(tr) <= eps) return Classification::Center;
  const double disc = tr * tr - 4.0 * det;
  if (disc >= 0.0) return tr > 0.0 ? Classification::UnstableNode : Classification::StableNode;
  return tr > 0.0 ? Classification::UnstableSpiral : Classification::StableSpiral;
}

LinearSolution general_solution(const Mat2& m) {
  const EigenSystem eig = eigen_system(m);
  if (const auto* z = std::get_if<ComplexConjugate>(&eig.values)) {
    return {ComplexModes{z->alpha, z->beta, eig.vr, eig.vi}, m};
  }
  auto [lo, hi] = real_parts(eig.values);
  return {RealModes{lo, hi, eig.v1, eig.v2}, m};
}

std::pair<Vec2, Vec2> LinearSolution::basis(double t) const {
  if (const auto* r = std::get_if<RealModes>(&modes)) {
    for (double l : {r->lambda1, r->lambda2}) {
      if (std::fabs(l * t) > 700.0) throw OverflowError("exponent exceeds 700");
    }
    return {std::exp(r->lambda1 * t) * r->v1, std::exp(r->lambda2 * t) * r->v2};
  }
  const auto& z = std::get<ComplexModes>(modes);
  if (std::fabs(z.alpha * t) > 700.0) throw OverflowError("exponent exceeds 700");
  const double growth = std::exp(z.alpha * t);
  const double cs = std::cos(z.beta * t);
  const double sn = std::sin(z.beta * t);
  return {growth * (cs * z.vr - sn * z.vi), growth * (sn * z.vr + cs * z.vi)};
}

IVPCoefficients solve_ivp(const Mat2& m, Vec2 init) {
  LinearSolution sol = general_solution(m);
  auto [b1, b2] = sol.basis(0.0);
  const double scale = std::max(1.0, b1.norm_inf() * b2.norm_inf());
  if (std::fabs(cross(b1, b2)) <= 1e-12 * scale) {
    throw DefectiveMatrixError("repeated eigenvalue with a one-dimensional eigenspace");
  }
  const Vec2 c = cramer_solve(Mat2::from_columns(b1, b2), init);
  return {c.x, c.y, sol, init};
}

Vec2 eval_solution(const IVPCoefficients& sol, double t) {
  auto [b1, b2] = sol.solution.basis(t);
  return sol.c1 * b1 + sol.c2 * b2;
}

}  // namespace phaseplane
