#pragma once

#include <string_view>
#include <variant>

#include "phaseplane/algebra2.hpp"

namespace phaseplane {

enum class Classification {
  Saddle,
  StableNode,
  UnstableNode,
  StableSpiral,
  UnstableSpiral,
  Center,
  Degenerate,
};

/// Wire names: "saddle", "stable_node", ... "degenerate".
std::string_view to_string(Classification c);
bool is_stable(Classification c);

/// Determinant-trace classification of the equilibrium of dv/dt = m v.
/// Uses eps = 1e-9 * max(1, ||m||^2) for the Degenerate (|det| <= eps) and
/// Center (|tr| <= eps) windows.
Classification classify_linear(const Mat2& m);

/// General solution C1 v1 e^(l1 t) + C2 v2 e^(l2 t) for real eigenvalues.
struct RealModes {
  double lambda1;
  double lambda2;
  Vec2 v1;
  Vec2 v2;
};

/// Real solutions y1 = e^(at)(vr cos bt - vi sin bt), y2 = e^(at)(vr sin bt + vi cos bt).
struct ComplexModes {
  double alpha;
  double beta;
  Vec2 vr;
  Vec2 vi;
};

struct LinearSolution {
  std::variant<RealModes, ComplexModes> modes;
  Mat2 matrix;

  bool is_complex() const { return std::holds_alternative<ComplexModes>(modes); }
  /// The two basis solutions at time t (no constants applied).
  std::pair<Vec2, Vec2> basis(double t) const;
};

struct IVPCoefficients {
  double c1 = 0.0;
  double c2 = 0.0;
  LinearSolution solution;
  Vec2 initial;
};

LinearSolution general_solution(const Mat2& m);

/// Fits C1, C2 to the initial point. Throws DefectiveMatrixError when the
/// two basis vectors are collinear (repeated eigenvalue, 1D eigenspace).
IVPCoefficients solve_ivp(const Mat2& m, Vec2 init);

/// Closed-form value at time t. Throws OverflowError if |lambda t| > 700.
Vec2 eval_solution(const IVPCoefficients& sol, double t);

}  // namespace phaseplane
