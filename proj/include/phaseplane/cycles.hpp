#pragma once

#include <optional>
#include <string>
#include <vector>

#include "phaseplane/phase2d.hpp"

namespace phaseplane {

enum class CycleStability { Stable, Unstable, Neutral };
std::string_view to_string(CycleStability s);

struct CycleOptions {
  /// Probe start offset along +x, as a fraction of the domain width.
  double probe_offset = 0.1;
  /// Crossings are discarded until this much time has passed or
  /// `transient_returns` crossings have been seen, whichever comes first.
  double transient_time = 200.0;
  int transient_returns = 20;
  /// Budget for one probe.
  double max_time = 4000.0;
  int max_returns = 400;
  double rtol = 1e-10;
  double atol = 1e-12;
  /// |r_{n+1} - r_n| <= radius_tolerance * r_n for `consecutive` returns.
  double radius_tolerance = 1e-6;
  int consecutive = 3;
  /// Radii below this fraction of the domain size count as collapse onto the
  /// equilibrium.
  double min_radius = 1e-3;
  /// Two probes agree on the cycle when their radii differ by at most this
  /// fraction.
  double match_tolerance = 1e-4;
  bool search_unstable = true;
};

struct CycleReport {
  bool found = false;
  CycleStability stability = CycleStability::Neutral;
  /// One period starting on the section {y = y*, x > x*}.
  Trajectory orbit;
  double period = 0.0;
  /// Largest distance of the orbit from the interior equilibrium.
  double amplitude = 0.0;
  /// Distance of the cycle's section crossing from the equilibrium.
  double radius = 0.0;
  std::string reason;
};

/// Looks for a closed orbit around `interior_eq` with a Poincare return map
/// on the half-line {y = y*, x > x*}. A stable verdict needs probes from
/// both sides of the cycle to converge to the same radius; unstable cycles
/// are searched the same way in reversed time.
CycleReport detect_limit_cycle(const Model2D& m, Vec2 interior_eq, const CycleOptions& options = {});

struct HopfRow {
  double param;
  Vec2 location;
  double tr;
  double det;
};

struct HopfResult {
  double critical;
  double det_at_critical;
  Vec2 location;
  double bracket_lo;
  double bracket_hi;
  std::vector<HopfRow> path;
};

struct HopfScan {
  std::vector<HopfRow> path;
  std::optional<HopfResult> result;
  /// Set when continuation lost the equilibrium; `path` ends at the last
  /// parameter where it was still found.
  std::optional<std::string> failure;
};

/// Continues an equilibrium over `steps` intervals of [lo, hi] by Newton's
/// method from the previous location, then bisects the first sign change of
/// tr J with det J > 0 at both ends to 1e-8 (hi - lo). Without a seed the
/// scan starts from an equilibrium at `lo` with det > 0, preferring spirals.
HopfScan run_hopf_scan(const Model2D& m, const std::string& param, double lo, double hi, int steps,
                       std::optional<Vec2> seed = std::nullopt);

/// As run_hopf_scan, but throws ContinuationError when the equilibrium is lost.
std::optional<HopfResult> hopf_scan(const Model2D& m, const std::string& param, double lo, double hi,
                                    int steps, std::optional<Vec2> seed = std::nullopt);

}  // namespace phaseplane
