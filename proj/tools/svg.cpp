#include "svg.hpp"

#include <cmath>
#include <cstdio>
#include <string_view>

#include "phaseplane/error.hpp"
#include "phaseplane/linsys.hpp"

namespace phaseplane::cli {
namespace {

constexpr double kSize = 640.0;
constexpr double kMargin = 48.0;
constexpr double kPlot = kSize - 2 * kMargin;
constexpr double kMarker = 5.0;

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s = buf;
  if (s == "-0.000") s = "0.000";
  return s;
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

struct Screen {
  Rect d;
  double x(double v) const { return kMargin + (v - d.x_lo) / d.width() * kPlot; }
  double y(double v) const { return kMargin + (d.y_hi - v) / d.height() * kPlot; }
  std::string pt(Vec2 p) const { return num(x(p.x)) + "," + num(y(p.y)); }
};

std::string header(double width, double height, const std::string& title) {
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" +
                    num(height) + "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\">\n";
  out += "<style>.frame{fill:none;stroke:#444}.xcline{fill:none;stroke:#1f5fbf;stroke-width:1.5;"
         "stroke-dasharray:6 4}.ycline{fill:none;stroke:#c0392b;stroke-width:1.5}"
         ".arrow{fill:none;stroke:#888;stroke-width:1}.trajectory{fill:none;stroke:#2e8b57;stroke-width:1.2}"
         ".flow{fill:#888}text{font-family:sans-serif;font-size:12px}</style>\n";
  out += "<rect width=\"" + num(width) + "\" height=\"" + num(height) + "\" fill=\"white\"/>\n";
  if (!title.empty()) {
    out += "<text class=\"title\" x=\"" + num(width / 2) + "\" y=\"" + num(kMargin / 2) +
           "\" text-anchor=\"middle\">" + escape(title) + "</text>\n";
  }
  return out;
}

std::string marker(double cx, double cy, std::string_view kind) {
  const std::string c = "cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(kMarker) + "\"";
  if (kind == "stable") return "<circle class=\"equilibrium stable\" " + c + " fill=\"black\"/>\n";
  if (kind == "saddle" || kind == "degenerate") {
    return "<g class=\"equilibrium " + std::string(kind) + "\"><circle " + c + " fill=\"white\" stroke=\"black\"/><path d=\"M" +
           num(cx - kMarker) + "," + num(cy) + " A" + num(kMarker) + "," + num(kMarker) + " 0 0 1 " +
           num(cx + kMarker) + "," + num(cy) + " Z\" fill=\"black\"/></g>\n";
  }
  return "<circle class=\"equilibrium " + std::string(kind) + "\" " + c + " fill=\"white\" stroke=\"black\"/>\n";
}

std::string_view marker_kind(Classification c) {
  switch (c) {
    case Classification::StableNode:
    case Classification::StableSpiral:
      return "stable";
    case Classification::Saddle:
      return "saddle";
    case Classification::UnstableNode:
    case Classification::UnstableSpiral:
      return "unstable";
    case Classification::Center:
    case Classification::Degenerate:
      return "neutral";
  }
  return "neutral";
}

int sign(Direction d) { return d == Direction::Positive ? 1 : d == Direction::Negative ? -1 : 0; }

std::string polyline(const std::string& cls, const std::vector<Vec2>& pts, bool closed, const Screen& s) {
  std::string out = closed ? "<polygon class=\"" + cls + "\" points=\"" : "<polyline class=\"" + cls + "\" points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) out += (i ? " " : "") + s.pt(pts[i]);
  return out + "\"/>\n";
}

}  // namespace

std::string portrait_svg(const Model2D& m, const PortraitOptions& o) {
  const Screen s{m.domain};
  std::string out = header(kSize, kSize, o.title);
  out += "<rect class=\"frame\" x=\"" + num(kMargin) + "\" y=\"" + num(kMargin) + "\" width=\"" + num(kPlot) +
         "\" height=\"" + num(kPlot) + "\"/>\n";
  const Rect& d = m.domain;
  out += "<text x=\"" + num(kMargin) + "\" y=\"" + num(kSize - kMargin / 2) + "\">" + num(d.x_lo) + "</text>\n";
  out += "<text x=\"" + num(kSize - kMargin) + "\" y=\"" + num(kSize - kMargin / 2) + "\" text-anchor=\"end\">" +
         num(d.x_hi) + "</text>\n";
  out += "<text x=\"" + num(kSize / 2) + "\" y=\"" + num(kSize - kMargin / 2) + "\" text-anchor=\"middle\">" +
         escape(m.x_name) + "</text>\n";
  out += "<text x=\"" + num(kMargin / 2) + "\" y=\"" + num(kSize / 2) + "\" text-anchor=\"middle\">" +
         escape(m.y_name) + "</text>\n";
  out += "<text x=\"" + num(kMargin - 4) + "\" y=\"" + num(kSize - kMargin) + "\" text-anchor=\"end\">" +
         num(d.y_lo) + "</text>\n";
  out += "<text x=\"" + num(kMargin - 4) + "\" y=\"" + num(kMargin + 12) + "\" text-anchor=\"end\">" + num(d.y_hi) +
         "</text>\n";

  // Arrow glyph per lattice point showing only the sign case of (f, g).
  out += "<g class=\"field\">\n";
  const double len = 0.4 * kPlot / std::max(1, o.arrows - 1);
  for (const auto& sample : sample_vector_field(m, o.arrows).samples) {
    const int sx = sign(sample.horizontal);
    const int sy = sign(sample.vertical);
    if (sx == 0 && sy == 0) continue;
    const double norm = std::hypot(sx, sy);
    const double ux = sx / norm;
    const double uy = -sy / norm;
    const double cx = s.x(sample.point.x);
    const double cy = s.y(sample.point.y);
    const double tx = cx + 0.5 * len * ux;
    const double ty = cy + 0.5 * len * uy;
    const double head = 0.35 * len;
    const double c = std::cos(2.6);
    const double sn = std::sin(2.6);
    out += "<path class=\"arrow\" d=\"M" + num(cx - 0.5 * len * ux) + "," + num(cy - 0.5 * len * uy) + " L" +
           num(tx) + "," + num(ty) + " M" + num(tx + head * (c * ux - sn * uy)) + "," +
           num(ty + head * (sn * ux + c * uy)) + " L" + num(tx) + "," + num(ty) + " L" +
           num(tx + head * (c * ux + sn * uy)) + "," + num(ty + head * (-sn * ux + c * uy)) + "\"/>\n";
  }
  out += "</g>\n";

  const NullClineSet clines = extract_nullclines(m, o.grid);
  for (const auto& line : clines.polylines) {
    out += polyline(line.kind == ClineKind::X ? "xcline" : "ycline", line.points, line.closed, s);
  }

  for (Vec2 start : o.starts) {
    TrajectoryOptions t;
    t.max_step = o.tmax / 400.0;
    const Trajectory traj = integrate_trajectory(m, start, o.tmax, t);
    std::vector<Vec2> pts;
    for (const auto& p : traj.samples) pts.push_back({p.x, p.y});
    out += polyline("trajectory", pts, false, s);
  }

  for (Vec2 p : find_equilibria_2d(m, {o.grid})) {
    const auto report = classify_equilibrium_2d(m, p);
    out += marker(s.x(p.x), s.y(p.y), marker_kind(report.classification));
  }
  out += "</svg>\n";
  return out;
}

std::string phaseline_svg(const Model1D& m, const PhaseLine& line, const std::string& title) {
  const double height = 160.0;
  const double axis = 100.0;
  auto x = [&](double v) { return kMargin + (v - m.lo) / (m.hi - m.lo) * kPlot; };
  std::string out = header(kSize, height, title);
  out += "<line class=\"axis\" x1=\"" + num(kMargin) + "\" y1=\"" + num(axis) + "\" x2=\"" + num(kSize - kMargin) +
         "\" y2=\"" + num(axis) + "\" stroke=\"black\"/>\n";
  out += "<text x=\"" + num(kMargin) + "\" y=\"" + num(axis + 24) + "\">" + num(m.lo) + "</text>\n";
  out += "<text x=\"" + num(kSize - kMargin) + "\" y=\"" + num(axis + 24) + "\" text-anchor=\"end\">" + num(m.hi) +
         "</text>\n";
  out += "<text x=\"" + num(kSize / 2) + "\" y=\"" + num(axis + 40) + "\" text-anchor=\"middle\">" +
         escape(m.var) + "</text>\n";
  for (const auto& a : line.arrows) {
    const double mid = 0.5 * (x(a.lo) + x(a.hi));
    const double dir = a.direction == Flow::Right ? 1.0 : -1.0;
    out += "<path class=\"flow\" d=\"M" + num(mid + 6 * dir) + "," + num(axis) + " L" + num(mid - 6 * dir) + "," +
           num(axis - 5) + " L" + num(mid - 6 * dir) + "," + num(axis + 5) + " Z\"/>\n";
  }
  for (const auto& e : line.equilibria) {
    const std::string_view kind = e.stability == Stability1D::Stable     ? "stable"
                                  : e.stability == Stability1D::Unstable ? "unstable"
                                                                         : "degenerate";
    out += marker(x(e.x), axis, kind);
    out += "<text x=\"" + num(x(e.x)) + "\" y=\"" + num(axis - 12) + "\" text-anchor=\"middle\">" + num(e.x) +
           "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace phaseplane::cli
