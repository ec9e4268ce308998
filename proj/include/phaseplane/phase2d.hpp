#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "phaseplane/algebra2.hpp"
#include "phaseplane/expr.hpp"
#include "phaseplane/linsys.hpp"

namespace phaseplane {

struct Rect {
  double x_lo = 0.0;
  double x_hi = 1.0;
  double y_lo = 0.0;
  double y_hi = 1.0;

  double width() const { return x_hi - x_lo; }
  double height() const { return y_hi - y_lo; }
  double diagonal() const;
  bool contains(Vec2 p, double slack = 0.0) const {
    return p.x >= x_lo - slack && p.x <= x_hi + slack && p.y >= y_lo - slack && p.y <= y_hi + slack;
  }
};

/// dx/dt = f(x, y), dy/dt = g(x, y) on a rectangular domain.
struct Model2D {
  Expr f;
  Expr g;
  std::string x_name = "x";
  std::string y_name = "y";
  Binding params;
  Rect domain;

  /// Throws ModelError on unbound identifiers or an empty domain.
  void validate() const;
  Model2D with_param(const std::string& name, double value) const;
};

/// f, g and their four partials compiled for repeated evaluation.
class VectorField2D {
 public:
  explicit VectorField2D(const Model2D& m);

  /// Throws DomainError where f or g is undefined.
  Vec2 operator()(Vec2 p) const;
  Mat2 jacobian(Vec2 p) const;

 private:
  double eval(const CompiledExpr& c, Vec2 p) const;

  std::vector<std::string> slots_;
  std::vector<double> values_;
  CompiledExpr f_, g_, fx_, fy_, gx_, gy_;
};

/// max(1, max |f|, |g|) over a 33x33 lattice of the domain, skipping points
/// where the model is undefined. All residual tolerances are relative to it.
double field_scale(const Model2D& m);

struct EquilibriumSearchOptions {
  int grid = 64;
};

/// Equilibria inside the domain, sorted by (x, y). Seeds come from grid cells
/// where both f and g take both signs and from null-cline intersections;
/// each is polished by Newton's method to max(|f|, |g|) <= 1e-10 * scale.
std::vector<Vec2> find_equilibria_2d(const Model2D& m, EquilibriumSearchOptions options = {});

/// Newton polish from `seed`; empty when it fails to converge in 50 steps.
std::optional<Vec2> newton_2d(const VectorField2D& field, Vec2 seed, double tolerance);

/// Symbolic partial derivatives evaluated at p.
Mat2 jacobian_at(const Model2D& m, Vec2 p);

struct EquilibriumReport {
  Vec2 location;
  Mat2 jacobian;
  double det = 0.0;
  double tr = 0.0;
  double discriminant = 0.0;
  EigenSystem eigen;
  Classification classification = Classification::Degenerate;
};

/// Throws NotEquilibriumError when max(|f|, |g|) at p exceeds 1e-8 * scale.
EquilibriumReport classify_equilibrium_2d(const Model2D& m, Vec2 p);

enum class Sign { Neg, Zero, Pos };

/// Signs of [df/dx, df/dy; dg/dx, dg/dy].
struct SignMat2 {
  Sign fx;
  Sign fy;
  Sign gx;
  Sign gy;
  friend bool operator==(const SignMat2&, const SignMat2&) = default;
};

enum class PartialClass {
  Saddle,
  StableNode,
  UnstableNode,
  StableNodeOrSpiral,
  UnstableNodeOrSpiral,
  Center,
  UnstableUnknown,
  Indeterminate,
};
std::string_view to_string(PartialClass c);

/// Signs of f and g at (x* + h, y*) and (x*, y* + h), read as the signs of
/// the partial derivatives. Throws NullclineCrossingError when f or g changes sign along a probe
/// segment (checked at 8 subsamples), and Error when a probe leaves the domain.
SignMat2 derive_sign_matrix(const Model2D& m, Vec2 eq, double h);

/// Class implied by the sign pattern alone, or Indeterminate.
PartialClass classify_from_signs(const SignMat2& s);

enum class ClineKind { X, Y };  // X: f = 0, Y: g = 0

struct Polyline {
  ClineKind kind;
  std::vector<Vec2> points;
  bool closed = false;
};

struct NullClineSet {
  std::vector<Polyline> polylines;
  std::size_t count(ClineKind kind) const;
};

/// Zero sets of f and g by marching squares on a grid x grid lattice.
NullClineSet extract_nullclines(const Model2D& m, int grid = 64);

enum class Direction { Negative, None, Positive };

struct FieldSample {
  Vec2 point;
  double f;
  double g;
  Direction horizontal;
  Direction vertical;
};

struct FieldSamples {
  std::vector<FieldSample> samples;
  std::vector<Vec2> skipped;  // lattice points where the model is undefined
};

/// (f, g) on a grid x grid lattice including the domain edges.
FieldSamples sample_vector_field(const Model2D& m, int grid);

struct TrajectoryPoint {
  double t;
  double x;
  double y;
};

enum class Termination { Completed, DomainExit, StepUnderflow };
std::string_view to_string(Termination t);

struct Trajectory {
  std::vector<TrajectoryPoint> samples;
  std::string method = "dopri5";
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  Termination termination = Termination::Completed;
  double exit_time = 0.0;  // set for DomainExit
};

struct TrajectoryOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  /// Upper bound on the time between consecutive samples.
  double max_step = std::numeric_limits<double>::infinity();
  /// Times (in (0, t_end]) that must appear among the samples exactly.
  std::vector<double> output_times;
  bool stop_at_domain_exit = true;
  /// Integrate dv/dt = -F(v); sample times still run forward from 0.
  bool reverse_time = false;
};

/// Adaptive Dormand-Prince integration from `start` until t_end, a domain
/// exit, or step-size underflow.
Trajectory integrate_trajectory(const Model2D& m, Vec2 start, double t_end,
                                const TrajectoryOptions& options = {});

}  // namespace phaseplane
