#include <cmath>

#include "doctest.h"
#include "phaseplane/error.hpp"
#include "phaseplane/integrator.hpp"
#include "phaseplane/phase1d.hpp"

using namespace phaseplane;

namespace {

Model1D model(const char* f, double lo, double hi, Binding params = {}, const char* var = "x") {
  return Model1D{parse(f), var, std::move(params), lo, hi};
}

std::vector<double> roots(const Model1D& m) {
  std::vector<double> out;
  for (const auto& e : find_equilibria_1d(m)) out.push_back(e.x);
  return out;
}

}  // namespace

TEST_CASE("equilibria of worked examples") {
  auto r = roots(model("-15+8*x-x^2", 0, 10));
  REQUIRE(r.size() == 2);
  CHECK(std::fabs(r[0] - 3.0) <= 1e-8);
  CHECK(std::fabs(r[1] - 5.0) <= 1e-8);

  auto logistic = roots(model("2*n*(1-n/3)", -1, 5, {}, "n"));
  REQUIRE(logistic.size() == 2);
  CHECK(std::fabs(logistic[0]) <= 1e-8);
  CHECK(std::fabs(logistic[1] - 3.0) <= 1e-8);

  CHECK(roots(model("1", -1, 1)).empty());
}

TEST_CASE("every reported root passes the residual test") {
  for (const char* f : {"-x*(x^2+x-6)", "8*x-x^3", "sin(3*x)", "x^3-2*x+0.1", "exp(x)-2"}) {
    const Model1D m = model(f, -4, 4);
    double scale = 1.0;
    for (int i = 0; i <= 1024; ++i) scale = std::max(scale, std::fabs(m.rate(-4 + 8.0 * i / 1024)));
    for (const auto& e : find_equilibria_1d(m)) CHECK(std::fabs(m.rate(e.x)) <= 1e-10 * scale);
  }
}

TEST_CASE("classification of 1D equilibria") {
  const Model1D m = model("-15+8*x-x^2", 0, 10);
  CHECK(classify_equilibrium_1d(m, 5.0) == Stability1D::Stable);
  CHECK(classify_equilibrium_1d(m, 3.0) == Stability1D::Unstable);
  CHECK(classify_equilibrium_1d(model("k*x", -1, 1, {{"k", 0.5}}), 0.0) == Stability1D::Unstable);
  CHECK(classify_equilibrium_1d(model("x^2", -1, 1), 0.0) == Stability1D::Degenerate);
  CHECK(classify_equilibrium_1d(model("-x^3", -1, 1), 0.0) == Stability1D::Stable);
}

TEST_CASE("phase lines and basins") {
  const PhaseLine a = build_phase_line(model("-15+8*x-x^2", 0, 10));
  REQUIRE(a.basins.size() == 1);
  CHECK(a.basins[0].attractor == doctest::Approx(5.0));
  CHECK(a.basins[0].lo == doctest::Approx(3.0));
  CHECK(a.basins[0].hi == 10.0);

  const PhaseLine c = build_phase_line(model("-x*(x^2+x-6)", -6, 6));
  REQUIRE(c.equilibria.size() == 3);
  REQUIRE(c.basins.size() == 2);
  CHECK(c.basins[0].attractor == doctest::Approx(-3.0));
  CHECK(c.basins[0].lo == -6.0);
  CHECK(std::fabs(c.basins[0].hi) <= 1e-12);
  CHECK(c.basins[1].attractor == doctest::Approx(2.0));
  CHECK(std::fabs(c.basins[1].lo) <= 1e-12);
  CHECK(c.basins[1].hi == 6.0);

  const PhaseLine d = build_phase_line(model("8*x-x^3", -4, 4));
  REQUIRE(d.basins.size() == 2);
  CHECK(std::fabs(d.basins[0].attractor + 2 * std::sqrt(2.0)) <= 1e-8);
  CHECK(std::fabs(d.basins[1].attractor - 2 * std::sqrt(2.0)) <= 1e-8);
  CHECK(d.equilibria[1].stability == Stability1D::Unstable);

  const PhaseLine e = build_phase_line(model("-x", -1, 1));
  REQUIRE(e.basins.size() == 1);
  CHECK(e.basins[0].lo == -1.0);
  CHECK(e.basins[0].hi == 1.0);
  CHECK(e.escapes.empty());

  const PhaseLine g = build_phase_line(model("x", -1, 1));
  CHECK(g.basins.empty());
  CHECK(g.escapes.size() == 2);
}

TEST_CASE("arrows alternate with the sign of f") {
  const Model1D m = model("sin(2*x)*(x-0.3)", -5, 5);
  const PhaseLine line = build_phase_line(m);
  for (const auto& a : line.arrows) {
    for (int k = 1; k < 32; ++k) {
      const double x = a.lo + (a.hi - a.lo) * k / 32;
      const double v = m.rate(x);
      CHECK(((v > 0) == (a.direction == Flow::Right)));
    }
  }
  for (const auto& b : line.basins) {
    CHECK(b.lo < b.attractor);
    CHECK(b.attractor < b.hi);
  }
}

TEST_CASE("tangent and close roots are not missed") {
  auto tangent = find_equilibria_1d(model("(x-0.3)^2", -1, 1));
  REQUIRE(tangent.size() == 1);
  CHECK(tangent[0].x == doctest::Approx(0.3));
  CHECK(tangent[0].stability == Stability1D::Degenerate);

  // Two roots 1e-5 apart, far below the 1024-cell grid spacing.
  auto close = roots(model("(x-0.1)*(x-0.10001)", -10, 10));
  REQUIRE(close.size() == 2);
  CHECK(close[0] == doctest::Approx(0.1));
  CHECK(close[1] == doctest::Approx(0.10001));
}

TEST_CASE("domain errors inside the interval are reported") {
  CHECK_THROWS_AS(find_equilibria_1d(model("ln(x)", -1, 1)), EvaluationError);
  CHECK_THROWS_AS(find_equilibria_1d(model("q*x", -1, 1)), ModelError);
}

TEST_CASE("affine solutions") {
  const AffineSolution1D malthus = affine_solution_1d(0, 4, 10);
  CHECK(malthus.x_inf == 0.0);
  CHECK(malthus.amplitude == 10.0);
  CHECK(*malthus.characteristic_time() == 0.25);
  CHECK(malthus(0.25) == doctest::Approx(10 * std::exp(1.0)));

  const AffineSolution1D sat = affine_solution_1d(80, -4, 10);
  CHECK(sat.x_inf == 20.0);
  CHECK(sat.amplitude == -10.0);

  const AffineSolution1D weeks = affine_solution_1d(400, -0.3, 10);
  const double half = *weeks.time_to_reach(0.5 * weeks.x_inf);
  CHECK(half == doctest::Approx(2.29).epsilon(0.005));
  CHECK(half == doctest::Approx(-std::log((400.0 / 0.3 / 2 - 400.0 / 0.3) / (10 - 400.0 / 0.3)) / 0.3));

  const AffineSolution1D line = affine_solution_1d(10, 0, 3);
  CHECK(line.linear_in_time());
  CHECK(line(2.0) == 23.0);
  CHECK(!line.characteristic_time());

  for (const auto& s : {malthus, sat, weeks, line, affine_solution_1d(-2, 0.7, -1)}) {
    const double scale = std::max(1.0, std::fabs(s(5.0)));
    for (double t : {0.0, 1.0, 5.0}) {
      CHECK(std::fabs(s.derivative(t) - (s.a + s.b * s(t))) <= 1e-8 * scale);
    }
  }
}

TEST_CASE("fold scans") {
  const auto h = fold_scan_1d(model("2*n*(1-n/3) - h", -1, 5, {{"h", 0.0}}, "n"), "h", 0, 2, 200);
  REQUIRE(h);
  CHECK(std::fabs(h->critical - 1.5) <= 1e-6);
  CHECK(h->count_before == 2);
  CHECK(h->count_after < h->count_before);

  const auto rk = fold_scan_1d(model("r*n*(1-n/k) - h", -1, 6, {{"h", 0.0}, {"r", 1.0}, {"k", 4.0}}, "n"),
                               "h", 0, 2, 200);
  REQUIRE(rk);
  CHECK(std::fabs(rk->critical - 1.0) <= 1e-6);

  // The exact fold of -x(x-0.2)(x-1) + s sits at minus the local minimum.
  const double xc = (1.2 - std::sqrt(0.84)) / 3.0;
  const double exact = xc * (xc - 0.2) * (xc - 1.0);
  const auto gene = fold_scan_1d(model("-x*(x-0.2)*(x-1)+s", -0.5, 1.5, {{"s", 0.0}}), "s", 0, 0.02, 200);
  REQUIRE(gene);
  CHECK(std::fabs(gene->critical - exact) <= 1e-6);
  CHECK(std::fabs(gene->critical - 0.009) <= 5e-5);

  CHECK(!fold_scan_1d(model("-x + s", -5, 5, {{"s", 0.0}}), "s", 0, 1, 10));
}

TEST_CASE("integrating from basin midpoints reaches the attractor") {
  for (const char* f : {"-15+8*x-x^2", "-x*(x^2+x-6)", "8*x-x^3", "-x"}) {
    const Model1D m = model(f, -6, 10);
    const PhaseLine line = build_phase_line(m);
    for (const auto& b : line.basins) {
      const auto& eq = *std::find_if(line.equilibria.begin(), line.equilibria.end(),
                                     [&](const Equilibrium1D& e) { return e.x == b.attractor; });
      const double tau = 1.0 / std::fabs(eq.slope);
      for (double start : {0.5 * (b.lo + b.attractor), 0.5 * (b.attractor + b.hi)}) {
        Dopri5 stepper([&](Vec2 v) { return Vec2{m.rate(v.x), 0.0}; }, 0.0, {start, 0.0});
        while (stepper.t() < 100 * tau) REQUIRE(stepper.step(100 * tau) == Dopri5::Status::Accepted);
        CHECK(std::fabs(stepper.y().x - b.attractor) <= 1e-4);
      }
    }
  }
}
