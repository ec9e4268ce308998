#include <cmath>
#include <random>

#include "doctest.h"
#include "phaseplane/error.hpp"
#include "phaseplane/linsys.hpp"

using namespace phaseplane;

TEST_CASE("classification of the textbook systems") {
  CHECK(classify_linear({1, 4, 2, 3}) == Classification::Saddle);
  CHECK(classify_linear({5, -1, 3, 1}) == Classification::UnstableNode);
  CHECK(classify_linear({3, -5, 1, -1}) == Classification::UnstableSpiral);
  CHECK(classify_linear({-2, 1, 1, -2}) == Classification::StableNode);
  CHECK(classify_linear({0, -2, 1, -2}) == Classification::StableSpiral);
  CHECK(classify_linear({-1, -1, 2, 1}) == Classification::Center);
  CHECK(classify_linear({-2, -1, 3, 2}) == Classification::Saddle);

  CHECK(classify_linear({1, 2, 3, 4}) == Classification::Saddle);
  CHECK(classify_linear({4, 1, 1, 2}) == Classification::UnstableNode);
  CHECK(classify_linear({-2, 3, -2, 1}) == Classification::StableSpiral);
  CHECK(classify_linear({1, -1, 2, -1}) == Classification::Center);

  CHECK(classify_linear({1, 2, 2, 4}) == Classification::Degenerate);
  CHECK(classify_linear({0, 2, -2, 0}) == Classification::Center);
  CHECK(to_string(Classification::StableSpiral) == "stable_spiral");
  CHECK(to_string(Classification::Degenerate) == "degenerate");
}

TEST_CASE("classification agrees with eigenvalue real parts") {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 2000; ++i) {
    const Mat2 m{u(rng), u(rng), u(rng), u(rng)};
    const Classification c = classify_linear(m);
    const auto [lo, hi] = real_parts(eigenvalues(m));
    switch (c) {
      case Classification::Saddle:
        CHECK((lo < 0 && hi > 0));
        break;
      case Classification::StableNode:
      case Classification::StableSpiral:
        CHECK(hi < 0);
        break;
      case Classification::UnstableNode:
      case Classification::UnstableSpiral:
        CHECK(lo > 0);
        break;
      default:
        break;
    }
    const bool spiral = c == Classification::StableSpiral || c == Classification::UnstableSpiral;
    CHECK(spiral == (std::holds_alternative<ComplexConjugate>(eigenvalues(m)) &&
                     c != Classification::Center));
  }
}

TEST_CASE("IVP with real eigenvalues") {
  const IVPCoefficients s = solve_ivp({1, 4, 1, 1}, {4, 6});
  CHECK(std::fabs(s.c1 - 1.0) <= 1e-9);
  CHECK(std::fabs(s.c2 + 2.0) <= 1e-9);
  const Vec2 at0 = eval_solution(s, 0.0);
  CHECK(at0.x == doctest::Approx(4.0));
  CHECK(at0.y == doctest::Approx(6.0));
}

TEST_CASE("diffusion between two compartments") {
  const Mat2 m{-0.01, 0.01, 0.04, -0.04};
  const IVPCoefficients s = solve_ivp(m, {3, 0});
  CHECK(s.c1 == doctest::Approx(-60.0));
  CHECK(s.c2 == doctest::Approx(-240.0));
  for (double t : {0.0, 10.0, 100.0}) {
    const Vec2 c = eval_solution(s, t);
    CHECK(std::fabs(c.x - (2.4 + 0.6 * std::exp(-0.05 * t))) <= 1e-9);
    CHECK(std::fabs(c.y - (2.4 - 2.4 * std::exp(-0.05 * t))) <= 1e-9);
  }
}

TEST_CASE("complex modes give real solutions of the system") {
  const Mat2 m{0, 2, -2, 0};
  const IVPCoefficients s = solve_ivp(m, {1.5, 0});
  for (double t : {0.0, 0.3, 1.0, 5.0}) {
    const Vec2 v = eval_solution(s, t);
    CHECK(v.x * v.x + v.y * v.y == doctest::Approx(2.25));
    CHECK(v.x == doctest::Approx(1.5 * std::cos(2 * t)));
    CHECK(v.y == doctest::Approx(-1.5 * std::sin(2 * t)));
  }
}

TEST_CASE("closed form satisfies dv/dt = m v") {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  int checked = 0;
  for (int i = 0; i < 300; ++i) {
    const Mat2 m{u(rng), u(rng), u(rng), u(rng)};
    if (classify_linear(m) == Classification::Degenerate) continue;
    if (std::fabs(m.discriminant()) < 1e-3) continue;
    const IVPCoefficients s = solve_ivp(m, {u(rng), u(rng)});
    CHECK(eval_solution(s, 0.0).x == doctest::Approx(s.initial.x));
    for (double t : {0.1, 0.7, 1.3}) {
      const double h = 1e-6;
      const Vec2 d = (1.0 / (2 * h)) * (eval_solution(s, t + h) - eval_solution(s, t - h));
      const Vec2 rhs = m * eval_solution(s, t);
      CHECK((d - rhs).norm_inf() <= 1e-5 * std::max(1.0, rhs.norm_inf()));
    }
    ++checked;
  }
  CHECK(checked > 200);
}

TEST_CASE("defective and overflow cases") {
  CHECK_THROWS_AS(solve_ivp({1, 1, 0, 1}, {1, 1}), DefectiveMatrixError);
  const IVPCoefficients s = solve_ivp({2, 0, 0, 2}, {1, -1});
  CHECK(eval_solution(s, 1.0).x == doctest::Approx(std::exp(2.0)));
  const IVPCoefficients big = solve_ivp({1, 0, 0, 2}, {1, 1});
  CHECK_THROWS_AS(eval_solution(big, 400.0), OverflowError);
}
