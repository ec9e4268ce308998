#include "report.hpp"

#include <openssl/evp.h>

#include <cstdio>

#include "phaseplane/error.hpp"
#include "phaseplane/linsys.hpp"

namespace phaseplane::cli {

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 failed");
  }
  std::string out;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    out += buf;
  }
  return out;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json vec_json(Vec2 v) { return json::array({v.x, v.y}); }

namespace {

json complex_json(ComplexNumber z) { return {{"re", z.re}, {"im", z.im}}; }

json matrix_json(const Mat2& m) { return json::array({json::array({m.a, m.b}), json::array({m.c, m.d})}); }

}  // namespace

json eigen_json(const Mat2& m) {
  const EigenSystem e = eigen_system(m);
  const auto [l1, l2] = as_complex(e.values);
  json out = {
      {"matrix", matrix_json(m)},
      {"det", m.det()},
      {"tr", m.trace()},
      {"discriminant", m.discriminant()},
      {"eigenvalues", json::array({complex_json(l1), complex_json(l2)})},
      {"class", std::string(to_string(classify_linear(m)))},
  };
  if (e.is_complex()) {
    out["eigenvector"] = {{"re", vec_json(e.vr)}, {"im", vec_json(e.vi)}};
  } else {
    out["eigenvectors"] = json::array({vec_json(e.v1), vec_json(e.v2)});
  }
  return out;
}

json equilibrium_json(const EquilibriumReport& r) {
  const auto [l1, l2] = as_complex(r.eigen.values);
  return {
      {"x", r.location.x},
      {"y", r.location.y},
      {"jacobian", matrix_json(r.jacobian)},
      {"det", r.det},
      {"tr", r.tr},
      {"discriminant", r.discriminant},
      {"eigenvalues", json::array({complex_json(l1), complex_json(l2)})},
      {"class", std::string(to_string(r.classification))},
  };
}

json nullclines_json(const NullClineSet& set) {
  json out = json::object();
  for (ClineKind kind : {ClineKind::X, ClineKind::Y}) {
    json boxes = json::array();
    for (const auto& line : set.polylines) {
      if (line.kind != kind || line.points.empty()) continue;
      Vec2 lo = line.points.front();
      Vec2 hi = lo;
      for (Vec2 p : line.points) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
      }
      boxes.push_back({{"min", vec_json(lo)}, {"max", vec_json(hi)}, {"closed", line.closed},
                       {"points", line.points.size()}});
    }
    out[kind == ClineKind::X ? "x" : "y"] = {{"count", set.count(kind)}, {"polylines", boxes}};
  }
  return out;
}

json analyze_2d(const Model2D& m, int grid) {
  json eqs = json::array();
  for (Vec2 p : find_equilibria_2d(m, {grid})) eqs.push_back(equilibrium_json(classify_equilibrium_2d(m, p)));
  return {{"kind", "ode2"}, {"equilibria", eqs}, {"nullclines", nullclines_json(extract_nullclines(m, grid))}};
}

json analyze_1d(const Model1D& m) {
  const PhaseLine line = build_phase_line(m);
  json eqs = json::array();
  for (const auto& e : line.equilibria) {
    eqs.push_back({{"x", e.x}, {"slope", e.slope}, {"class", std::string(to_string(e.stability))}});
  }
  auto flow = [](Flow f) { return f == Flow::Left ? "left" : "right"; };
  json arrows = json::array();
  for (const auto& a : line.arrows) arrows.push_back({{"lo", a.lo}, {"hi", a.hi}, {"direction", flow(a.direction)}});
  json basins = json::array();
  for (const auto& b : line.basins) basins.push_back({{"attractor", b.attractor}, {"lo", b.lo}, {"hi", b.hi}});
  json escapes = json::array();
  for (const auto& e : line.escapes) escapes.push_back({{"lo", e.lo}, {"hi", e.hi}, {"direction", flow(e.direction)}});
  return {{"kind", "ode1"},
          {"equilibria", eqs},
          {"phase_line", {{"arrows", arrows}, {"basins", basins}, {"escapes", escapes}}}};
}

json cycle_json(const CycleReport& c) {
  json out = {{"found", c.found}, {"stability", std::string(to_string(c.stability))}};
  if (c.found) {
    out["period"] = c.period;
    out["amplitude"] = c.amplitude;
    out["radius"] = c.radius;
  } else {
    out["reason"] = c.reason;
  }
  return out;
}

json hopf_json(const HopfScan& s, const std::string& param) {
  json rows = json::array();
  for (const auto& r : s.path) {
    rows.push_back({{"param", r.param}, {"equilibrium", vec_json(r.location)}, {"tr", r.tr}, {"det", r.det}});
  }
  json out = {{"mode", "hopf"}, {"param", param}, {"rows", rows}, {"critical", nullptr}};
  if (s.result) {
    out["critical"] = s.result->critical;
    out["det_at_critical"] = s.result->det_at_critical;
    out["location"] = vec_json(s.result->location);
    out["bracket"] = json::array({s.result->bracket_lo, s.result->bracket_hi});
  }
  if (s.failure) out["failure"] = *s.failure;
  return out;
}

json fold_json(const Model1D& m, const std::string& param, double lo, double hi, int steps,
               const std::optional<FoldResult>& r) {
  json rows = json::array();
  for (int i = 0; i <= steps; ++i) {
    const double p = i == steps ? hi : lo + (hi - lo) * i / steps;
    json roots = json::array();
    for (const auto& e : find_equilibria_1d(m.with_param(param, p))) roots.push_back(e.x);
    rows.push_back({{"param", p}, {"equilibria", roots}});
  }
  json out = {{"mode", "fold"}, {"param", param}, {"rows", rows}, {"critical", nullptr}};
  if (r) {
    out["critical"] = r->critical;
    out["bracket"] = json::array({r->bracket_lo, r->bracket_hi});
    out["count_before"] = r->count_before;
    out["count_after"] = r->count_after;
  }
  return out;
}

json linsolve_json(const Mat2& m, std::optional<Vec2> init) {
  json out = eigen_json(m);
  const LinearSolution sol = general_solution(m);
  if (const auto* real = std::get_if<RealModes>(&sol.modes)) {
    out["modes"] = {{"lambda1", real->lambda1}, {"lambda2", real->lambda2}, {"v1", vec_json(real->v1)},
                    {"v2", vec_json(real->v2)}};
    out["form"] = "C1 v1 exp(lambda1 t) + C2 v2 exp(lambda2 t)";
  } else {
    const auto& c = std::get<ComplexModes>(sol.modes);
    out["modes"] = {{"alpha", c.alpha}, {"beta", c.beta}, {"vr", vec_json(c.vr)}, {"vi", vec_json(c.vi)}};
    out["form"] =
        "C1 exp(alpha t)(vr cos(beta t) - vi sin(beta t)) + C2 exp(alpha t)(vr sin(beta t) + vi cos(beta t))";
  }
  if (init) {
    const IVPCoefficients ivp = solve_ivp(m, *init);
    out["initial"] = vec_json(*init);
    out["C1"] = ivp.c1;
    out["C2"] = ivp.c2;
  }
  return out;
}

}  // namespace phaseplane::cli
