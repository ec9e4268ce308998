#include "phaseplane/cycles.hpp"

#include <algorithm>
#include <cmath>

#include "phaseplane/error.hpp"
#include "phaseplane/format.hpp"
#include "phaseplane/integrator.hpp"

namespace phaseplane {
namespace {

struct Probe {
  enum class Kind { Converged, Collapsed, Escaped, NoReturns, Budget, Underflow };
  Kind kind = Kind::NoReturns;
  double radius = 0.0;
  double period = 0.0;
};

std::string describe(const Probe& p) {
  switch (p.kind) {
    case Probe::Kind::Converged:
      return "return radii converged to " + format_shortest(p.radius);
    case Probe::Kind::Collapsed:
      return "orbit spirals into the equilibrium";
    case Probe::Kind::Escaped:
      return "orbit leaves the domain";
    case Probe::Kind::NoReturns:
      return "orbit never returns to the section";
    case Probe::Kind::Budget:
      return "return radii did not settle within the budget";
    case Probe::Kind::Underflow:
      return "step size underflow";
  }
  return "?";
}

double domain_size(const Rect& d) { return std::max(d.width(), d.height()); }

// Integrates from (x* + start_radius, y*) and records returns to the section
// {y = y*, x > x*} crossed in the first direction seen.
Probe run_probe(const Model2D& m, const VectorField2D& field, Vec2 eq, double start_radius, bool reverse,
                const CycleOptions& o) {
  const double direction = reverse ? -1.0 : 1.0;
  const double size = domain_size(m.domain);
  const double slack = 1e-12 * m.domain.diagonal();
  Dopri5 st([&](Vec2 p) { return direction * field(p); }, 0.0, {eq.x + start_radius, eq.y}, {o.rtol, o.atol});

  int sense = 0;
  int returns = 0;
  int agreeing = 0;
  std::vector<double> radii;
  std::vector<double> times;
  Probe out;
  while (st.t() < o.max_time) {
    if (st.step(o.max_time) == Dopri5::Status::Underflow) {
      out.kind = Probe::Kind::Underflow;
      return out;
    }
    const Vec2 a = st.y_prev();
    const Vec2 b = st.y();
    if (!m.domain.contains(b, slack)) {
      out.kind = Probe::Kind::Escaped;
      return out;
    }
    const double sa = a.y - eq.y;
    const double sb = b.y - eq.y;
    if (sa == 0.0 || !((sa < 0.0 && sb >= 0.0) || (sa > 0.0 && sb <= 0.0))) continue;

    double lo = st.t_prev();
    double hi = st.t();
    for (int it = 0; it < 80 && hi - lo > 0.0; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double sm = st.dense(mid).y - eq.y;
      if ((sm < 0.0) == (sa < 0.0) && sm != 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const double tc = 0.5 * (lo + hi);
    const Vec2 c = st.dense(tc);
    if (c.x <= eq.x) continue;
    const int d = sb > sa ? 1 : -1;
    if (sense == 0) sense = d;
    if (d != sense) continue;

    ++returns;
    if (tc < o.transient_time && returns < o.transient_returns) continue;
    const double r = c.x - eq.x;
    if (r < o.min_radius * size) {
      out.kind = Probe::Kind::Collapsed;
      return out;
    }
    if (!radii.empty()) {
      if (std::fabs(r - radii.back()) <= o.radius_tolerance * radii.back()) {
        ++agreeing;
      } else {
        agreeing = 0;
      }
    }
    radii.push_back(r);
    times.push_back(tc);
    if (agreeing >= o.consecutive) {
      out.kind = Probe::Kind::Converged;
      out.radius = r;
      const std::size_t n = times.size();
      out.period = (times[n - 1] - times[n - 1 - static_cast<std::size_t>(o.consecutive)]) / o.consecutive;
      return out;
    }
    if (static_cast<int>(radii.size()) >= o.max_returns) {
      out.kind = Probe::Kind::Budget;
      return out;
    }
  }
  out.kind = returns == 0 ? Probe::Kind::NoReturns : Probe::Kind::Budget;
  return out;
}

Trajectory one_period(const Model2D& m, Vec2 start, double period, bool reverse) {
  TrajectoryOptions opt;
  opt.rtol = 1e-10;
  opt.atol = 1e-12;
  opt.max_step = period / 200.0;
  opt.output_times = {period};
  opt.reverse_time = reverse;
  opt.stop_at_domain_exit = false;
  return integrate_trajectory(m, start, period, opt);
}

}  // namespace

std::string_view to_string(CycleStability s) {
  switch (s) {
    case CycleStability::Stable:
      return "stable";
    case CycleStability::Unstable:
      return "unstable";
    case CycleStability::Neutral:
      return "neutral";
  }
  return "?";
}

CycleReport detect_limit_cycle(const Model2D& m, Vec2 eq, const CycleOptions& o) {
  const VectorField2D field(m);
  if (!(field(eq).norm_inf() <= 1e-8 * field_scale(m))) {
    throw NotEquilibriumError("interior point is not an equilibrium");
  }
  const double s0 = o.probe_offset * m.domain.width();
  const double room = m.domain.x_hi - eq.x;

  CycleReport report;
  std::vector<std::string> reasons;
  auto attempt = [&](bool reverse) -> bool {
    const std::string label = reverse ? "reversed time: " : "forward time: ";
    const Probe a = run_probe(m, field, eq, s0, reverse, o);
    if (a.kind != Probe::Kind::Converged) {
      reasons.push_back(label + describe(a));
      return false;
    }
    // Second probe from the other side of the first probe's cycle.
    double s1 = s0 < a.radius ? 1.5 * a.radius : 0.5 * a.radius;
    if (s1 >= 0.95 * room) s1 = 0.5 * (a.radius + std::min(s1, 0.95 * room));
    const Probe b = run_probe(m, field, eq, s1, reverse, o);
    if (b.kind != Probe::Kind::Converged) {
      reasons.push_back(label + "second probe: " + describe(b));
      return false;
    }
    if (std::fabs(b.radius - a.radius) > o.match_tolerance * a.radius) {
      reasons.push_back(label + "probes settle on different closed orbits (radii " + format_shortest(a.radius) +
                        " and " + format_shortest(b.radius) + "), neutral family");
      report.stability = CycleStability::Neutral;
      report.radius = a.radius;
      report.period = a.period;
      return false;
    }
    report.found = true;
    report.stability = reverse ? CycleStability::Unstable : CycleStability::Stable;
    report.radius = a.radius;
    report.period = a.period;
    report.orbit = one_period(m, {eq.x + a.radius, eq.y}, a.period, reverse);
    for (const auto& s : report.orbit.samples) {
      report.amplitude = std::max(report.amplitude, std::hypot(s.x - eq.x, s.y - eq.y));
    }
    return true;
  };

  bool neutral = false;
  if (attempt(false)) return report;
  neutral = !reasons.empty() && reasons.back().find("neutral") != std::string::npos;
  if (!neutral && o.search_unstable && attempt(true)) return report;

  report.found = false;
  report.stability = CycleStability::Neutral;
  for (std::size_t i = 0; i < reasons.size(); ++i) report.reason += (i ? "; " : "") + reasons[i];
  return report;
}

HopfScan run_hopf_scan(const Model2D& m, const std::string& param, double lo, double hi, int steps,
                       std::optional<Vec2> seed) {
  if (!m.params.count(param)) throw ModelError("parameter " + param + " is not bound");
  if (!(lo < hi)) throw Error("scan range needs lo < hi");
  if (steps < 1) throw Error("scan needs at least one step");

  auto locate = [&](double p, Vec2 from) -> std::optional<Vec2> {
    const Model2D mp = m.with_param(param, p);
    const VectorField2D field(mp);
    auto found = newton_2d(field, from, 1e-10 * field_scale(mp));
    if (!found || !mp.domain.contains(*found, 1e-9 * mp.domain.diagonal())) return std::nullopt;
    return found;
  };
  auto row = [&](double p, Vec2 at) {
    const Mat2 j = jacobian_at(m.with_param(param, p), at);
    return HopfRow{p, at, j.trace(), j.det()};
  };

  HopfScan scan;
  Vec2 start;
  if (seed) {
    auto s = locate(lo, *seed);
    if (!s) throw ContinuationError("no equilibrium near the seed at " + param + " = " + format_shortest(lo), lo);
    start = *s;
  } else {
    const Model2D m0 = m.with_param(param, lo);
    std::optional<Vec2> spiral, positive;
    for (Vec2 p : find_equilibria_2d(m0)) {
      const Mat2 j = jacobian_at(m0, p);
      if (j.det() <= 0.0) continue;
      if (!positive) positive = p;
      if (!spiral && j.discriminant() < 0.0) spiral = p;
    }
    if (!spiral && !positive) {
      throw ContinuationError("no equilibrium with det J > 0 at " + param + " = " + format_shortest(lo), lo);
    }
    start = spiral ? *spiral : *positive;
  }

  Vec2 prev = start;
  for (int i = 0; i <= steps; ++i) {
    const double p = i == steps ? hi : lo + (hi - lo) * i / steps;
    auto at = locate(p, prev);
    if (!at) {
      scan.failure = "equilibrium lost at " + param + " = " + format_shortest(p);
      return scan;
    }
    scan.path.push_back(row(p, *at));
    prev = *at;
  }

  for (std::size_t i = 0; i + 1 < scan.path.size(); ++i) {
    const HopfRow& a = scan.path[i];
    const HopfRow& b = scan.path[i + 1];
    const bool flips = (a.tr < 0.0 && b.tr >= 0.0) || (a.tr > 0.0 && b.tr <= 0.0);
    if (!flips || !(a.det > 0.0 && b.det > 0.0)) continue;

    double p_lo = a.param;
    double p_hi = b.param;
    Vec2 at = a.location;
    const bool negative_below = a.tr < 0.0;
    const double tol = 1e-8 * (hi - lo);
    while (p_hi - p_lo > tol) {
      const double mid = 0.5 * (p_lo + p_hi);
      auto loc = locate(mid, at);
      if (!loc) {
        scan.failure = "equilibrium lost at " + param + " = " + format_shortest(mid);
        return scan;
      }
      const HopfRow r = row(mid, *loc);
      if ((r.tr < 0.0) == negative_below && r.tr != 0.0) {
        p_lo = mid;
        at = *loc;
      } else {
        p_hi = mid;
      }
    }
    const double c = 0.5 * (p_lo + p_hi);
    auto loc = locate(c, at);
    if (!loc) {
      scan.failure = "equilibrium lost at " + param + " = " + format_shortest(c);
      return scan;
    }
    const HopfRow r = row(c, *loc);
    scan.result = HopfResult{c, r.det, *loc, p_lo, p_hi, scan.path};
    return scan;
  }
  return scan;
}

std::optional<HopfResult> hopf_scan(const Model2D& m, const std::string& param, double lo, double hi, int steps,
                                    std::optional<Vec2> seed) {
  HopfScan s = run_hopf_scan(m, param, lo, hi, steps, seed);
  if (s.failure) {
    throw ContinuationError(*s.failure, s.path.empty() ? lo : s.path.back().param);
  }
  return s.result;
}

}  // namespace phaseplane
