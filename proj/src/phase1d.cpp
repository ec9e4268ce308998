#include "phaseplane/phase1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "phaseplane/error.hpp"
#include "phaseplane/format.hpp"

namespace phaseplane {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// f and f' compiled against the slot layout [var, params...].
class Rate1D {
 public:
  explicit Rate1D(const Model1D& m) {
    m.validate();
    slots_.push_back(m.var);
    values_.push_back(0.0);
    for (const auto& [name, value] : m.params) {
      if (name == m.var) continue;
      slots_.push_back(name);
      values_.push_back(value);
    }
    f_ = CompiledExpr(m.f, slots_);
    df_ = CompiledExpr(differentiate(m.f, m.var), slots_);
  }

  double f(double x) const {
    try {
      return eval(f_, x);
    } catch (const DomainError& e) {
      throw EvaluationError(m_var() + " = " + format_shortest(x), e);
    }
  }

  // NaN where f' is undefined.
  double df(double x) const {
    try {
      return eval(df_, x);
    } catch (const DomainError&) {
      return kNaN;
    }
  }

 private:
  std::string m_var() const { return slots_.front(); }

  double eval(const CompiledExpr& c, double x) const {
    thread_local std::vector<double> scratch;
    scratch = values_;
    scratch[0] = x;
    return c(scratch);
  }

  std::vector<std::string> slots_;
  std::vector<double> values_;
  CompiledExpr f_;
  CompiledExpr df_;
};

int sign(double v) { return (v > 0.0) - (v < 0.0); }

// Bracketed root of fn on [a, b] (opposite signs at the ends): Newton steps
// when they stay well inside the bracket, bisection otherwise.
template <class F, class DF>
double safeguarded_root(F&& fn, DF&& dfn, double a, double b, double fa) {
  double x = 0.5 * (a + b);
  for (int it = 0; it < 200; ++it) {
    const double fx = fn(x);
    if (fx == 0.0) return x;
    if (sign(fx) == sign(fa)) {
      a = x;
      fa = fx;
    } else {
      b = x;
    }
    const double mid = 0.5 * (a + b);
    if (mid == a || mid == b) return std::fabs(fn(a)) < std::fabs(fn(b)) ? a : b;
    const double d = dfn(x);
    const double newton = std::isfinite(d) && d != 0.0 ? x - fx / d : kNaN;
    const bool inside = std::isfinite(newton) && newton > std::min(a, b) && newton < std::max(a, b);
    const double next = inside ? newton : mid;
    if (std::fabs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(x))) {
      return std::fabs(fn(next)) <= std::fabs(fx) ? next : x;
    }
    x = next;
  }
  return x;
}

double scan_scale(const Rate1D& r, const Model1D& m, int samples) {
  double scale = 1.0;
  for (int i = 0; i <= samples; ++i) {
    const double x = m.lo + (m.hi - m.lo) * i / samples;
    scale = std::max(scale, std::fabs(r.f(x)));
  }
  return scale;
}

double slope_tolerance(const Model1D& m, double scale) {
  return 1e-8 * std::max(1.0, scale / (m.hi - m.lo));
}

Stability1D classify_with(const Rate1D& r, const Model1D& m, double x, double slope, double scale) {
  const double tol = slope_tolerance(m, scale);
  if (slope < -tol) return Stability1D::Stable;
  if (slope > tol) return Stability1D::Unstable;
  const double h = 1e-4 * (m.hi - m.lo);
  const int left = sign(r.f(x - h));
  const int right = sign(r.f(x + h));
  if (left > 0 && right < 0) return Stability1D::Stable;
  if (left < 0 && right > 0) return Stability1D::Unstable;
  return Stability1D::Degenerate;
}

struct ScanOutcome {
  std::vector<double> roots;
  bool close_roots = false;
  double scale = 1.0;
};

ScanOutcome scan(const Rate1D& r, const Model1D& m, int cells) {
  const double width = m.hi - m.lo;
  std::vector<double> xs(static_cast<std::size_t>(cells) + 1);
  for (int i = 0; i <= cells; ++i) xs[static_cast<std::size_t>(i)] = m.lo + width * i / cells;
  xs.back() = m.hi;

  // Critical points of f split cells so that two roots closer than a cell,
  // or a root where f only touches zero, still show up.
  std::vector<double> critical;
  std::vector<double> dfs(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) dfs[i] = r.df(xs[i]);
  auto df = [&](double x) { return r.df(x); };
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    if (dfs[i] == 0.0) critical.push_back(xs[i]);
    if (!std::isfinite(dfs[i]) || !std::isfinite(dfs[i + 1])) continue;
    if (sign(dfs[i]) * sign(dfs[i + 1]) < 0) {
      auto ddf = [&](double x) {
        const double h = 1e-7 * std::max(1.0, std::fabs(x));
        return (r.df(x + h) - r.df(x - h)) / (2.0 * h);
      };
      critical.push_back(safeguarded_root(df, ddf, xs[i], xs[i + 1], dfs[i]));
    }
  }
  if (dfs.back() == 0.0) critical.push_back(xs.back());

  std::vector<double> points = xs;
  points.insert(points.end(), critical.begin(), critical.end());
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  std::vector<double> fs(points.size());
  ScanOutcome out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    fs[i] = r.f(points[i]);
    out.scale = std::max(out.scale, std::fabs(fs[i]));
  }

  auto f = [&](double x) { return r.f(x); };
  bool previous_changed = false;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (fs[i] == 0.0) out.roots.push_back(points[i]);
    if (i + 1 == points.size()) break;
    const bool changed = sign(fs[i]) * sign(fs[i + 1]) < 0;
    if (changed) {
      out.roots.push_back(safeguarded_root(f, df, points[i], points[i + 1], fs[i]));
      if (previous_changed) out.close_roots = true;
    }
    previous_changed = changed;
  }
  // A critical point counts as a touching root only when f keeps its sign
  // across the neighbouring breakpoints; otherwise the roots beside it were
  // already found as sign changes.
  for (double c : critical) {
    const auto it = std::lower_bound(points.begin(), points.end(), c);
    const std::size_t i = static_cast<std::size_t>(it - points.begin());
    if (i >= points.size() || fs[i] == 0.0) continue;
    if (std::fabs(fs[i]) > 1e-10 * out.scale) continue;
    const int left = i > 0 ? sign(fs[i - 1]) : 0;
    const int right = i + 1 < points.size() ? sign(fs[i + 1]) : 0;
    if (left * sign(fs[i]) < 0 || right * sign(fs[i]) < 0) continue;
    out.roots.push_back(c);
  }
  return out;
}

}  // namespace

void Model1D::validate() const {
  if (!(lo < hi)) throw ModelError("analysis interval needs lo < hi");
  for (const auto& name : f.identifiers()) {
    if (name != var && !params.count(name)) throw ModelError("undeclared identifier " + name);
  }
}

Model1D Model1D::with_param(const std::string& name, double value) const {
  Model1D out = *this;
  out.params.insert_or_assign(name, value);
  return out;
}

double Model1D::rate(double x) const { return Rate1D(*this).f(x); }

std::string_view to_string(Stability1D s) {
  switch (s) {
    case Stability1D::Stable:
      return "stable";
    case Stability1D::Unstable:
      return "unstable";
    case Stability1D::Degenerate:
      return "degenerate";
  }
  return "?";
}

std::vector<Equilibrium1D> find_equilibria_1d(const Model1D& m, RootScanOptions options) {
  if (options.cells < 2) throw Error("root scan needs at least 2 cells");
  const Rate1D r(m);
  ScanOutcome s = scan(r, m, options.cells);
  if (s.close_roots) s = scan(r, m, options.cells * 4);

  std::sort(s.roots.begin(), s.roots.end());
  const double merge = 1e-8 * (m.hi - m.lo);
  std::vector<double> merged;
  for (double x : s.roots) {
    if (!merged.empty() && x - merged.back() <= merge) {
      if (std::fabs(r.f(x)) < std::fabs(r.f(merged.back()))) merged.back() = x;
      continue;
    }
    merged.push_back(x);
  }

  std::vector<Equilibrium1D> out;
  out.reserve(merged.size());
  for (double x : merged) {
    double slope = r.df(x);
    if (!std::isfinite(slope)) {
      const double h = 1e-6 * (m.hi - m.lo);
      slope = (r.f(x + h) - r.f(x - h)) / (2.0 * h);
    }
    out.push_back({x, classify_with(r, m, x, slope, s.scale), slope});
  }
  return out;
}

Stability1D classify_equilibrium_1d(const Model1D& m, double x) {
  const Rate1D r(m);
  double slope = r.df(x);
  if (!std::isfinite(slope)) {
    const double h = 1e-6 * (m.hi - m.lo);
    slope = (r.f(x + h) - r.f(x - h)) / (2.0 * h);
  }
  return classify_with(r, m, x, slope, scan_scale(r, m, 256));
}

PhaseLine build_phase_line(const Model1D& m, RootScanOptions options) {
  PhaseLine line;
  line.equilibria = find_equilibria_1d(m, options);

  std::vector<double> cuts{m.lo};
  for (const auto& e : line.equilibria) cuts.push_back(e.x);
  cuts.push_back(m.hi);

  std::vector<std::optional<Flow>> flows;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    std::optional<Flow> flow;
    if (cuts[i + 1] > cuts[i]) {
      const double v = m.rate(0.5 * (cuts[i] + cuts[i + 1]));
      if (v > 0.0) flow = Flow::Right;
      if (v < 0.0) flow = Flow::Left;
    }
    if (flow) line.arrows.push_back({cuts[i], cuts[i + 1], *flow});
    flows.push_back(flow);
  }

  if (flows.front() == Flow::Left) line.escapes.push_back({cuts[0], cuts[1], Flow::Left});
  if (flows.back() == Flow::Right) {
    line.escapes.push_back({cuts[cuts.size() - 2], cuts.back(), Flow::Right});
  }

  for (std::size_t k = 0; k < line.equilibria.size(); ++k) {
    const auto& e = line.equilibria[k];
    if (e.stability != Stability1D::Stable) continue;
    // Segment k lies left of equilibrium k, segment k+1 right of it.
    const double lo = flows[k] == Flow::Right ? cuts[k] : e.x;
    const double hi = flows[k + 1] == Flow::Left ? cuts[k + 2] : e.x;
    line.basins.push_back({e.x, lo, hi});
  }
  return line;
}

double AffineSolution1D::operator()(double t) const {
  if (linear_in_time()) return x0 + a * t;
  return x_inf + amplitude * std::exp(b * t);
}

double AffineSolution1D::derivative(double t) const {
  if (linear_in_time()) return a;
  return amplitude * b * std::exp(b * t);
}

std::optional<double> AffineSolution1D::characteristic_time() const {
  if (linear_in_time()) return std::nullopt;
  return 1.0 / std::fabs(b);
}

std::optional<double> AffineSolution1D::time_to_reach(double target) const {
  if (target == x0) return 0.0;
  if (linear_in_time()) {
    if (a == 0.0) return std::nullopt;
    const double t = (target - x0) / a;
    return t >= 0.0 ? std::optional<double>(t) : std::nullopt;
  }
  if (amplitude == 0.0) return std::nullopt;
  const double ratio = (target - x_inf) / amplitude;
  if (!(ratio > 0.0)) return std::nullopt;
  const double t = std::log(ratio) / b;
  return t >= 0.0 ? std::optional<double>(t) : std::nullopt;
}

AffineSolution1D affine_solution_1d(double a, double b, double x0) {
  AffineSolution1D s;
  s.a = a;
  s.b = b;
  s.x0 = x0;
  if (b != 0.0) {
    s.x_inf = -a / b;
    s.amplitude = x0 - s.x_inf;
  }
  return s;
}

std::optional<FoldResult> fold_scan_1d(const Model1D& m, const std::string& param, double p_lo,
                                       double p_hi, int steps) {
  if (steps < 2) throw Error("fold scan needs at least 2 steps");
  if (!m.params.count(param)) throw ModelError("parameter " + param + " is not bound");
  if (!(p_lo < p_hi)) throw Error("fold scan needs p_lo < p_hi");

  auto count = [&](double p) {
    return static_cast<int>(find_equilibria_1d(m.with_param(param, p)).size());
  };

  int previous = count(p_lo);
  double previous_p = p_lo;
  for (int i = 1; i <= steps; ++i) {
    const double p = i == steps ? p_hi : p_lo + (p_hi - p_lo) * i / steps;
    const int c = count(p);
    if (c < previous) {
      double lo = previous_p;
      double hi = p;
      const double tol = 1e-8 * (p_hi - p_lo);
      while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (count(mid) >= previous) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      return FoldResult{0.5 * (lo + hi), lo, hi, previous, c};
    }
    previous = c;
    previous_p = p;
  }
  return std::nullopt;
}

}  // namespace phaseplane
