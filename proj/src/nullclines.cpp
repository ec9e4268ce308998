#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>

#include "phaseplane/error.hpp"
#include "phaseplane/phase2d.hpp"

namespace phaseplane {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Segment {
  Vec2 a;
  Vec2 b;
};

class Lattice {
 public:
  Lattice(const Rect& d, int n) : d_(d), n_(n) {}
  Vec2 node(int i, int j) const {
    return {i == n_ ? d_.x_hi : d_.x_lo + d_.width() * i / n_, j == n_ ? d_.y_hi : d_.y_lo + d_.height() * j / n_};
  }
  int n() const { return n_; }

 private:
  Rect d_;
  int n_;
};

// One scalar component of the field, NaN where undefined.
class Component {
 public:
  Component(const VectorField2D& field, ClineKind kind) : field_(field), kind_(kind) {}
  double operator()(Vec2 p) const {
    try {
      const Vec2 v = field_(p);
      return kind_ == ClineKind::X ? v.x : v.y;
    } catch (const DomainError&) {
      return kNaN;
    }
  }

 private:
  const VectorField2D& field_;
  ClineKind kind_;
};

// Zero crossing on the edge pq where vp > 0 differs in class from vq.
Vec2 refine(const Component& fn, Vec2 p, double vp, Vec2 q, double vq, double tolerance) {
  if (vp == 0.0) return p;
  if (vq == 0.0) return q;
  const bool p_pos = vp > 0.0;
  Vec2 lo = p, hi = q;
  for (int it = 0; it < 60; ++it) {
    const Vec2 mid = 0.5 * (lo + hi);
    const double v = fn(mid);
    if (!std::isfinite(v)) {
      // Fall back to linear interpolation between the original endpoints.
      return p + (vp / (vp - vq)) * (q - p);
    }
    if (v == 0.0 || std::fabs(v) <= tolerance) return mid;
    if ((v > 0.0) == p_pos) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<Segment> march(const Component& fn, const Lattice& lat, double tolerance) {
  const int n = lat.n();
  std::vector<double> v(static_cast<std::size_t>((n + 1) * (n + 1)));
  auto at = [&](int i, int j) { return v[static_cast<std::size_t>(i * (n + 1) + j)]; };
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) v[static_cast<std::size_t>(i * (n + 1) + j)] = fn(lat.node(i, j));
  }

  std::vector<Segment> out;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      // Corners counter-clockwise from bottom-left; edge k joins corner k and k+1.
      const Vec2 p[4] = {lat.node(i, j), lat.node(i + 1, j), lat.node(i + 1, j + 1), lat.node(i, j + 1)};
      const double c[4] = {at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)};
      if (!std::all_of(std::begin(c), std::end(c), [](double x) { return std::isfinite(x); })) continue;

      // Lattice-aligned zero lines: an edge with both ends exactly zero.
      if (c[0] == 0.0 && c[1] == 0.0) out.push_back({p[0], p[1]});
      if (c[3] == 0.0 && c[0] == 0.0) out.push_back({p[0], p[3]});
      if (i == n - 1 && c[1] == 0.0 && c[2] == 0.0) out.push_back({p[1], p[2]});
      if (j == n - 1 && c[2] == 0.0 && c[3] == 0.0) out.push_back({p[3], p[2]});

      bool pos[4];
      for (int k = 0; k < 4; ++k) pos[k] = c[k] > 0.0;
      std::vector<int> edges;
      for (int k = 0; k < 4; ++k) {
        if (pos[k] != pos[(k + 1) % 4]) edges.push_back(k);
      }
      auto vertex = [&](int k) {
        const int a = k, b = (k + 1) % 4;
        return refine(fn, p[a], c[a], p[b], c[b], tolerance);
      };
      if (edges.size() == 2) {
        out.push_back({vertex(edges[0]), vertex(edges[1])});
      } else if (edges.size() == 4) {
        const double center = fn(0.5 * (p[0] + p[2]));
        const bool joined = std::isfinite(center) && (center > 0.0) == pos[0];
        if (joined) {
          // Corners 0 and 2 connect through the middle: cut off 1 and 3.
          out.push_back({vertex(0), vertex(1)});
          out.push_back({vertex(2), vertex(3)});
        } else {
          out.push_back({vertex(3), vertex(0)});
          out.push_back({vertex(1), vertex(2)});
        }
      }
    }
  }
  return out;
}

using Key = std::pair<std::int64_t, std::int64_t>;

std::vector<Polyline> join(const std::vector<Segment>& raw, ClineKind kind, double quantum) {
  auto key = [&](Vec2 p) {
    return Key{static_cast<std::int64_t>(std::llround(p.x / quantum)),
               static_cast<std::int64_t>(std::llround(p.y / quantum))};
  };

  // Drop degenerate and duplicate segments.
  std::vector<Segment> segs;
  std::map<std::pair<Key, Key>, bool> seen;
  for (const auto& s : raw) {
    Key ka = key(s.a), kb = key(s.b);
    if (ka == kb) continue;
    auto id = ka < kb ? std::make_pair(ka, kb) : std::make_pair(kb, ka);
    if (seen.emplace(id, true).second) segs.push_back(s);
  }

  std::map<Key, std::vector<std::size_t>> incident;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    incident[key(segs[i].a)].push_back(i);
    incident[key(segs[i].b)].push_back(i);
  }
  std::vector<bool> used(segs.size(), false);

  auto walk = [&](std::size_t first, Vec2 start) {
    Polyline line{kind, {start}, false};
    std::size_t cur = first;
    Key start_key = key(start);
    Vec2 at = start;
    for (;;) {
      used[cur] = true;
      const Segment& s = segs[cur];
      const Vec2 next = key(s.a) == key(at) ? s.b : s.a;
      line.points.push_back(next);
      at = next;
      const Key k = key(next);
      if (k == start_key) {
        line.closed = true;
        break;
      }
      const auto& inc = incident[k];
      if (inc.size() != 2) break;  // open end or junction
      const std::size_t other = inc[0] == cur ? inc[1] : inc[0];
      if (used[other]) break;
      cur = other;
    }
    return line;
  };

  std::vector<Polyline> out;
  // Open chains start at ends and junctions.
  for (const auto& [k, inc] : incident) {
    if (inc.size() == 2) continue;
    for (std::size_t s : inc) {
      if (used[s]) continue;
      const Vec2 start = key(segs[s].a) == k ? segs[s].a : segs[s].b;
      out.push_back(walk(s, start));
    }
  }
  // What remains are closed loops.
  for (std::size_t s = 0; s < segs.size(); ++s) {
    if (!used[s]) out.push_back(walk(s, segs[s].a));
  }
  return out;
}

Direction direction(double v, double zero) {
  if (std::fabs(v) <= zero) return Direction::None;
  return v > 0.0 ? Direction::Positive : Direction::Negative;
}

}  // namespace

std::size_t NullClineSet::count(ClineKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(polylines.begin(), polylines.end(), [&](const Polyline& p) { return p.kind == kind; }));
}

NullClineSet extract_nullclines(const Model2D& m, int grid) {
  if (grid < 8) throw Error("null-cline grid must be at least 8");
  const VectorField2D field(m);
  const Lattice lat(m.domain, grid);
  const double tolerance = 1e-12 * field_scale(m);
  const double quantum = 1e-9 * m.domain.diagonal();

  NullClineSet out;
  for (ClineKind kind : {ClineKind::X, ClineKind::Y}) {
    const Component fn(field, kind);
    auto lines = join(march(fn, lat, tolerance), kind, quantum);
    out.polylines.insert(out.polylines.end(), lines.begin(), lines.end());
  }
  return out;
}

FieldSamples sample_vector_field(const Model2D& m, int grid) {
  if (grid < 2) throw Error("vector-field grid must be at least 2");
  const VectorField2D field(m);
  const Rect& d = m.domain;
  const double zero = 1e-14 * field_scale(m);
  FieldSamples out;
  for (int j = 0; j < grid; ++j) {
    for (int i = 0; i < grid; ++i) {
      const Vec2 p{i == grid - 1 ? d.x_hi : d.x_lo + d.width() * i / (grid - 1),
                   j == grid - 1 ? d.y_hi : d.y_lo + d.height() * j / (grid - 1)};
      try {
        const Vec2 v = field(p);
        out.samples.push_back({p, v.x, v.y, direction(v.x, zero), direction(v.y, zero)});
      } catch (const DomainError&) {
        out.skipped.push_back(p);
      }
    }
  }
  return out;
}

}  // namespace phaseplane
