#pragma once

#include <optional>
#include <string>
#include <vector>

#include "phaseplane/expr.hpp"

namespace phaseplane {

/// dx/dt = f(x) analysed on [lo, hi].
struct Model1D {
  Expr f;
  std::string var = "x";
  Binding params;
  double lo = 0.0;
  double hi = 1.0;

  /// Throws ModelError if f mentions unbound names or lo >= hi.
  void validate() const;
  Model1D with_param(const std::string& name, double value) const;
  /// f at x. Domain errors propagate as EvaluationError.
  double rate(double x) const;
};

enum class Stability1D { Stable, Unstable, Degenerate };
std::string_view to_string(Stability1D s);

struct Equilibrium1D {
  double x;
  Stability1D stability;
  double slope;  // f'(x)
};

struct RootScanOptions {
  int cells = 1024;
};

/// Roots of f on [lo, hi] in ascending order, each with its stability.
/// Simple roots come from sign changes on the grid; tangent roots are caught at
/// critical points of f. A grid where two neighbouring cells both change sign
/// is rescanned at four times the resolution.
std::vector<Equilibrium1D> find_equilibria_1d(const Model1D& m, RootScanOptions options = {});

/// Sign of f'(x) when it clears the tolerance, otherwise the signs of f at
/// x -/+ 1e-4 (hi - lo).
Stability1D classify_equilibrium_1d(const Model1D& m, double x);

enum class Flow { Left, Right };

struct ArrowSegment {
  double lo;
  double hi;
  Flow direction;
};

/// Open interval of initial states that converge to `attractor`.
struct Basin {
  double attractor;
  double lo;
  double hi;
};

/// Interval whose orbits leave through one of the analysis bounds.
struct Escape {
  double lo;
  double hi;
  Flow direction;
};

struct PhaseLine {
  std::vector<Equilibrium1D> equilibria;
  std::vector<ArrowSegment> arrows;
  std::vector<Basin> basins;
  std::vector<Escape> escapes;
};

PhaseLine build_phase_line(const Model1D& m, RootScanOptions options = {});

/// Solution of dx/dt = a + b x through x(0) = x0, written
/// x_inf + A e^(b t), or x0 + a t when b = 0.
struct AffineSolution1D {
  double a = 0.0;
  double b = 0.0;
  double x0 = 0.0;
  double x_inf = 0.0;  // meaningful only when b != 0
  double amplitude = 0.0;

  bool linear_in_time() const { return b == 0.0; }
  double operator()(double t) const;
  double derivative(double t) const;
  /// Characteristic time 1/|b|; empty when b = 0.
  std::optional<double> characteristic_time() const;
  /// First t at which the solution equals `target`; empty if never.
  std::optional<double> time_to_reach(double target) const;
};

AffineSolution1D affine_solution_1d(double a, double b, double x0);

struct FoldResult {
  double critical;
  double bracket_lo;  // last parameter with the larger equilibrium count
  double bracket_hi;
  int count_before;
  int count_after;
};

/// Sweeps `param` over [p_lo, p_hi] in `steps` intervals and bisects the
/// first drop in the equilibrium count down to 1e-8 (p_hi - p_lo).
std::optional<FoldResult> fold_scan_1d(const Model1D& m, const std::string& param, double p_lo,
                                       double p_hi, int steps);

}  // namespace phaseplane
