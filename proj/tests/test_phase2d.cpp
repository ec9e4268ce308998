#include <cmath>
#include <random>

#include "doctest.h"
#include "phaseplane/error.hpp"
#include "phaseplane/integrator.hpp"
#include "phaseplane/phase2d.hpp"

using namespace phaseplane;

namespace {

Model2D model(const char* f, const char* g, Rect domain, Binding params = {}) {
  Model2D m;
  m.f = parse(f);
  m.g = parse(g);
  m.params = std::move(params);
  m.domain = domain;
  return m;
}

Model2D ppour() { return model("3*x*(1-x) - 1.5*x*y", "0.5*x*y - 0.25*y", {0, 2, 0, 3}); }

double dist(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Distance from p to the segment ab.
double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = ab.x * ab.x + ab.y * ab.y;
  double t = len2 == 0 ? 0 : ((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return dist(p, a + t * ab);
}

double distance_to_clines(const NullClineSet& set, ClineKind kind, Vec2 p) {
  double best = 1e300;
  for (const auto& line : set.polylines) {
    if (line.kind != kind) continue;
    for (std::size_t i = 0; i + 1 < line.points.size(); ++i) {
      best = std::min(best, segment_distance(p, line.points[i], line.points[i + 1]));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("equilibria of worked examples") {
  const auto pp = find_equilibria_2d(ppour());
  REQUIRE(pp.size() == 3);
  CHECK(dist(pp[0], {0, 0}) <= 1e-8);
  CHECK(dist(pp[1], {0.5, 1}) <= 1e-8);
  CHECK(dist(pp[2], {1, 0}) <= 1e-8);

  const auto algae = find_equilibria_2d(model("2*x*(1-y)", "2-y-x^2", {0, 3, 0, 3}));
  REQUIRE(algae.size() == 2);
  CHECK(dist(algae[0], {0, 2}) <= 1e-8);
  CHECK(dist(algae[1], {1, 1}) <= 1e-8);

  const auto lv = find_equilibria_2d(model("4*x-2*x*y", "2*x*y-4*y", {0, 4, 0, 4}));
  REQUIRE(lv.size() == 2);
  CHECK(dist(lv[0], {0, 0}) <= 1e-8);
  CHECK(dist(lv[1], {2, 2}) <= 1e-8);

  CHECK(find_equilibria_2d(model("1", "x", {-1, 1, -1, 1})).empty());
  CHECK_THROWS_AS(find_equilibria_2d(model("ln(x)", "y", {-1, 1, -1, 1})), EvaluationError);
  CHECK_THROWS_AS(find_equilibria_2d(model("q*x", "y", {-1, 1, -1, 1})), ModelError);
}

TEST_CASE("reported equilibria pass the residual test") {
  const Model2D models[] = {ppour(), model("2*x*(1-y)", "2-y-x^2", {0, 3, 0, 3}),
                            model("sin(x)*cos(y)", "x^2-y", {-3, 3, -1, 4}),
                            model("x*(1-x)-x*y/(0.2+x)", "0.4*y*(1-y/x)", {0.05, 1.2, 0, 1})};
  for (const Model2D& m : models) {
    const VectorField2D field(m);
    const double scale = field_scale(m);
    const auto eqs = find_equilibria_2d(m);
    CHECK(!eqs.empty());
    for (Vec2 p : eqs) CHECK(field(p).norm_inf() <= 1e-10 * scale);
  }
}

TEST_CASE("jacobian fixtures and finite differences") {
  const Mat2 j = jacobian_at(ppour(), {0.5, 1});
  CHECK(std::fabs(j.a + 1.5) <= 1e-10);
  CHECK(std::fabs(j.b + 0.75) <= 1e-10);
  CHECK(std::fabs(j.c - 0.5) <= 1e-10);
  CHECK(std::fabs(j.d) <= 1e-10);
  CHECK(jacobian_at(model("4*x-2*x*y", "2*x*y-4*y", {0, 4, 0, 4}), {2, 2}) == Mat2{0, -4, 4, 0});

  const Model2D m = model("x*exp(-y) + sqrt(1+x^2*y^2)", "sin(x*y) - ln(2+x)", {-1, 1, -1, 1});
  const VectorField2D field(m);
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 100; ++i) {
    const Vec2 p{u(rng), u(rng)};
    const Mat2 jac = jacobian_at(m, p);
    const double h = 1e-5;
    const Vec2 dx = (1 / (2 * h)) * (field({p.x + h, p.y}) - field({p.x - h, p.y}));
    const Vec2 dy = (1 / (2 * h)) * (field({p.x, p.y + h}) - field({p.x, p.y - h}));
    CHECK(std::fabs(jac.a - dx.x) <= 1e-6 * std::max(1.0, std::fabs(jac.a)));
    CHECK(std::fabs(jac.c - dx.y) <= 1e-6 * std::max(1.0, std::fabs(jac.c)));
    CHECK(std::fabs(jac.b - dy.x) <= 1e-6 * std::max(1.0, std::fabs(jac.b)));
    CHECK(std::fabs(jac.d - dy.y) <= 1e-6 * std::max(1.0, std::fabs(jac.d)));
  }
}

TEST_CASE("classification of equilibria") {
  const Model2D pp = ppour();
  const EquilibriumReport origin = classify_equilibrium_2d(pp, {0, 0});
  CHECK(origin.classification == Classification::Saddle);
  CHECK(origin.det == doctest::Approx(3 * -0.25));

  const EquilibriumReport inner = classify_equilibrium_2d(pp, {0.5, 1});
  CHECK(inner.classification == Classification::StableNode);
  CHECK(inner.det == doctest::Approx(0.375));
  CHECK(inner.tr == doctest::Approx(-1.5));
  CHECK(inner.discriminant == doctest::Approx(0.75));
  CHECK(inner.discriminant == inner.tr * inner.tr - 4 * inner.det);
  const auto ev = std::get<RealDistinct>(inner.eigen.values);
  CHECK(ev.lo == doctest::Approx(-1.183).epsilon(1e-3));
  CHECK(ev.hi == doctest::Approx(-0.317).epsilon(1e-3));

  CHECK(classify_equilibrium_2d(pp, {1, 0}).classification == Classification::Saddle);

  const Model2D lv = model("a*N-b*N*P", "c*N*P-d*P", {0, 5, 0, 5}, {{"a", 1}, {"b", 0.5}, {"c", 0.5}, {"d", 1}});
  Model2D lv_named = lv;
  lv_named.x_name = "N";
  lv_named.y_name = "P";
  CHECK(classify_equilibrium_2d(lv_named, {1 / 0.5, 1 / 0.5}).classification == Classification::Center);

  CHECK_THROWS_AS(classify_equilibrium_2d(pp, {1, 1}), NotEquilibriumError);
}

TEST_CASE("linear models classify like their coefficient matrix") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int i = 0; i < 100; ++i) {
    const Mat2 a{u(rng), u(rng), u(rng), u(rng)};
    const Model2D m = model("a*x+b*y", "c*x+d*y", {-1, 1, -1, 1}, {{"a", a.a}, {"b", a.b}, {"c", a.c}, {"d", a.d}});
    CHECK(classify_equilibrium_2d(m, {0, 0}).classification == classify_linear(a));
  }
}

TEST_CASE("graphical jacobian") {
  using enum Sign;
  CHECK(classify_from_signs({Neg, Neg, Pos, Neg}) == PartialClass::StableNodeOrSpiral);
  CHECK(classify_from_signs({Neg, Zero, Zero, Neg}) == PartialClass::StableNode);
  CHECK(classify_from_signs({Pos, Zero, Zero, Neg}) == PartialClass::Saddle);
  CHECK(classify_from_signs({Pos, Pos, Pos, Neg}) == PartialClass::Saddle);
  CHECK(classify_from_signs({Pos, Pos, Neg, Neg}) == PartialClass::Indeterminate);
  CHECK(classify_from_signs({Pos, Pos, Pos, Pos}) == PartialClass::UnstableUnknown);
  CHECK(classify_from_signs({Neg, Neg, Pos, Zero}) == PartialClass::StableNodeOrSpiral);
  CHECK(classify_from_signs({Zero, Neg, Pos, Zero}) == PartialClass::Center);

  const Model2D pp = ppour();
  CHECK(derive_sign_matrix(pp, {0.5, 1}, 0.05) == SignMat2{Neg, Neg, Pos, Zero});
  CHECK(derive_sign_matrix(pp, {0, 0}, 0.05) == SignMat2{Pos, Zero, Zero, Neg});
  CHECK(derive_sign_matrix(pp, {1, 0}, 0.05) == SignMat2{Neg, Neg, Zero, Pos});
  // f = 3x(1 - x) changes sign at x = 1 on the way to (1.5, 0).
  CHECK_THROWS_AS(derive_sign_matrix(pp, {0, 0}, 1.5), NullclineCrossingError);
}

TEST_CASE("sign classes are realised by every positive instantiation") {
  // For each sign pattern, random magnitudes must give a det-tr class that
  // lies inside the partial class.
  const Sign all[] = {Sign::Neg, Sign::Zero, Sign::Pos};
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> mag(0.1, 5);
  auto value = [&](Sign s) { return s == Sign::Zero ? 0.0 : (s == Sign::Pos ? 1 : -1) * mag(rng); };
  for (Sign a : all)
    for (Sign b : all)
      for (Sign c : all)
        for (Sign d : all) {
          const PartialClass pc = classify_from_signs({a, b, c, d});
          for (int k = 0; k < 50; ++k) {
            const Mat2 m{value(a), value(b), value(c), value(d)};
            const Classification full = classify_linear(m);
            switch (pc) {
              case PartialClass::Saddle:
                CHECK(full == Classification::Saddle);
                break;
              case PartialClass::StableNode:
                CHECK(full == Classification::StableNode);
                break;
              case PartialClass::UnstableNode:
                CHECK(full == Classification::UnstableNode);
                break;
              case PartialClass::StableNodeOrSpiral:
                CHECK((full == Classification::StableNode || full == Classification::StableSpiral));
                break;
              case PartialClass::UnstableNodeOrSpiral:
                CHECK((full == Classification::UnstableNode || full == Classification::UnstableSpiral));
                break;
              case PartialClass::Center:
                CHECK(full == Classification::Center);
                break;
              case PartialClass::UnstableUnknown:
                CHECK(!is_stable(full));
                break;
              case PartialClass::Indeterminate:
                break;
            }
          }
        }
}

TEST_CASE("ppour null-clines follow the analytic lines") {
  const Model2D pp = ppour();
  const NullClineSet set = extract_nullclines(pp, 64);
  const double cell = std::hypot(2.0 / 64, 3.0 / 64);
  REQUIRE(set.count(ClineKind::X) >= 2);
  REQUIRE(set.count(ClineKind::Y) >= 2);
  bool saw_axis = false, saw_slope = false, saw_y0 = false, saw_half = false;
  const VectorField2D field(pp);
  const double scale = field_scale(pp);
  for (const auto& line : set.polylines) {
    for (Vec2 p : line.points) {
      const Vec2 v = field(p);
      if (line.kind == ClineKind::X) {
        const double d1 = std::fabs(p.x);
        const double d2 = std::fabs(2 * p.x + p.y - 2) / std::sqrt(5.0);
        CHECK(std::min(d1, d2) <= cell);
        saw_axis |= d1 <= cell;
        saw_slope |= d2 <= cell;
        CHECK(std::fabs(v.x) <= 1e-3 * scale);
      } else {
        const double d1 = std::fabs(p.y);
        const double d2 = std::fabs(p.x - 0.5);
        CHECK(std::min(d1, d2) <= cell);
        saw_y0 |= d1 <= cell;
        saw_half |= d2 <= cell;
        CHECK(std::fabs(v.y) <= 1e-3 * scale);
      }
    }
  }
  CHECK(saw_axis);
  CHECK(saw_slope);
  CHECK(saw_y0);
  CHECK(saw_half);
}

TEST_CASE("circle null-cline is one closed polyline") {
  const Model2D m = model("x^2+y^2-1", "1", {-2, 2, -2, 2});
  const NullClineSet set = extract_nullclines(m, 64);
  REQUIRE(set.count(ClineKind::X) == 1);
  CHECK(set.count(ClineKind::Y) == 0);
  const Polyline& c = set.polylines[0];
  CHECK(c.closed);
  const double cell = std::hypot(4.0 / 64, 4.0 / 64);
  for (Vec2 p : c.points) CHECK(std::fabs(std::hypot(p.x, p.y) - 1) <= cell);

  CHECK(extract_nullclines(model("x^2+y^2+1", "1", {-2, 2, -2, 2}), 32).polylines.empty());
}

TEST_CASE("equilibria sit on both kinds of null-cline") {
  const Model2D models[] = {ppour(), model("2*x*(1-y)", "2-y-x^2", {0, 3, 0, 3}),
                            model("4*x-2*x*y", "2*x*y-4*y", {0, 4, 0, 4})};
  for (const Model2D& m : models) {
    const NullClineSet set = extract_nullclines(m, 64);
    const double cell = std::hypot(m.domain.width() / 64, m.domain.height() / 64);
    for (Vec2 p : find_equilibria_2d(m)) {
      CHECK(distance_to_clines(set, ClineKind::X, p) <= cell);
      CHECK(distance_to_clines(set, ClineKind::Y, p) <= cell);
    }
  }
}

TEST_CASE("vector field samples") {
  const Model2D pp = ppour();
  const FieldSamples s = sample_vector_field(pp, 5);  // nodes at multiples of 0.5 and 0.75
  CHECK(s.samples.size() == 25);
  CHECK(s.skipped.empty());
  const auto at = [&](double x, double y) {
    return *std::find_if(s.samples.begin(), s.samples.end(),
                         [&](const FieldSample& f) { return f.point.x == x && f.point.y == y; });
  };
  CHECK(at(0, 0).horizontal == Direction::None);
  CHECK(at(0, 0).vertical == Direction::None);

  Model2D square = pp;
  square.domain = {0, 2, 0, 2};
  const FieldSample corner = sample_vector_field(square, 3).samples.back();
  REQUIRE(corner.point == Vec2{2, 2});
  CHECK(corner.horizontal == Direction::Negative);
  CHECK(corner.vertical == Direction::Positive);
  CHECK(sample_vector_field(square, 3).samples[4].f == -1.5);  // (1, 1)
  const VectorField2D field(pp);
  CHECK(field({2, 2}).x == -12.0);
  CHECK(field({2, 2}).y == 1.5);
  const FieldSamples two = sample_vector_field(pp, 2);
  CHECK(two.samples.size() == 4);
  CHECK(field({1, 1}).x == -1.5);
  CHECK(field({1, 1}).y == 0.25);

  const Model2D m = model("x*y", "1/x", {-1, 1, -1, 1});
  const FieldSamples u = sample_vector_field(m, 3);
  CHECK(u.skipped.size() == 3);
  CHECK(u.samples.size() == 6);
  const FieldSample first = u.samples.front();
  CHECK(first.horizontal == Direction::Positive);  // (-1)(-1) > 0
  CHECK(first.vertical == Direction::Negative);
}

TEST_CASE("dense output tracks the solution inside a step") {
  // dx/dt = y, dy/dt = -x from (1, 0): exact cos/sin.
  Dopri5 st([](Vec2 p) { return Vec2{p.y, -p.x}; }, 0.0, {1, 0}, {1e-10, 1e-12});
  while (st.t() < 5) {
    REQUIRE(st.step(5) == Dopri5::Status::Accepted);
    for (int k = 1; k < 4; ++k) {
      const double t = st.t_prev() + (st.t() - st.t_prev()) * k / 4;
      const Vec2 v = st.dense(t);
      CHECK(std::fabs(v.x - std::cos(t)) <= 1e-7);
      CHECK(std::fabs(v.y + std::sin(t)) <= 1e-7);
    }
  }
  CHECK(st.t() == 5.0);
}

TEST_CASE("trajectories against the closed form") {
  const Model2D lin = model("x+4*y", "x+y", {-1e6, 1e6, -1e6, 1e6});
  TrajectoryOptions opt;
  opt.output_times = {0.25, 0.5, 1.0};
  const Trajectory tr = integrate_trajectory(lin, {4, 6}, 1.0, opt);
  CHECK(tr.termination == Termination::Completed);
  const IVPCoefficients ivp = solve_ivp({1, 4, 1, 1}, {4, 6});
  int hits = 0;
  for (const auto& s : tr.samples) {
    for (double t : opt.output_times) {
      if (s.t != t) continue;
      ++hits;
      const Vec2 exact = eval_solution(ivp, t);
      CHECK(std::fabs(s.x - exact.x) <= 1e-6 * std::fabs(exact.x));
      CHECK(std::fabs(s.y - exact.y) <= 1e-6 * std::fabs(exact.y));
    }
  }
  CHECK(hits == 3);
  for (std::size_t i = 1; i < tr.samples.size(); ++i) CHECK(tr.samples[i].t > tr.samples[i - 1].t);
}

TEST_CASE("x^2 + y^2 is conserved by the rotation field") {
  const Model2D rot = model("2*y", "-2*x", {-10, 10, -10, 10});
  TrajectoryOptions opt;
  opt.max_step = 0.05;
  const Trajectory tr = integrate_trajectory(rot, {3, 0}, 10.0, opt);
  CHECK(tr.samples.back().t == 10.0);
  for (const auto& s : tr.samples) CHECK(std::fabs(s.x * s.x + s.y * s.y - 9.0) <= 1e-6 * 9.0);
  for (std::size_t i = 1; i < tr.samples.size(); ++i) {
    CHECK(tr.samples[i].t - tr.samples[i - 1].t <= 0.05 + 1e-15);
  }
}

TEST_CASE("orbits started at an equilibrium stay there") {
  const Trajectory tr = integrate_trajectory(ppour(), {0.5, 1}, 50.0);
  for (const auto& s : tr.samples) CHECK(std::hypot(s.x - 0.5, s.y - 1) <= 1e-8);
}

TEST_CASE("domain exit and reversed time") {
  const Model2D grow = model("x", "0", {0, 2, -1, 1});
  const Trajectory tr = integrate_trajectory(grow, {1, 0}, 5.0);
  CHECK(tr.termination == Termination::DomainExit);
  CHECK(tr.exit_time == doctest::Approx(std::log(2.0)).epsilon(1e-7));
  CHECK(tr.samples.back().x == doctest::Approx(2.0).epsilon(1e-7));

  TrajectoryOptions back;
  back.reverse_time = true;
  const Trajectory rev = integrate_trajectory(grow, {1, 0}, 1.0, back);
  CHECK(rev.samples.back().x == doctest::Approx(std::exp(-1.0)).epsilon(1e-7));
  CHECK_THROWS_AS(integrate_trajectory(grow, {3, 0}, 1.0), Error);
}

TEST_CASE("neighbouring ppour orbits keep their order along a section") {
  // Orbits of a planar autonomous system cannot cross. Starts 1e-2 apart on
  // the transversal y = 2.5 (where dy/dt > 0) must reach the transversal
  // {x = 0.5, y > 1} (where dx/dt < 0) in the same order.
  const Model2D pp = ppour();
  TrajectoryOptions opt;
  opt.rtol = 1e-10;
  opt.atol = 1e-12;
  opt.max_step = 0.01;
  std::vector<double> hits;
  for (int k = 0; k < 10; ++k) {
    const Trajectory t = integrate_trajectory(pp, {1.0 + 0.01 * k, 2.5}, 30, opt);
    for (std::size_t i = 1; i < t.samples.size(); ++i) {
      const auto& p = t.samples[i - 1];
      const auto& q = t.samples[i];
      if (p.x > 0.5 && q.x <= 0.5) {
        const double y = p.y + (q.y - p.y) * (0.5 - p.x) / (q.x - p.x);
        if (y > 1.0) {
          hits.push_back(y);
          break;
        }
      }
    }
  }
  REQUIRE(hits.size() == 10);
  const bool increasing = hits[1] > hits[0];
  for (std::size_t i = 1; i < hits.size(); ++i) CHECK((hits[i] > hits[i - 1]) == increasing);
}
