#include "phaseplane/integrator.hpp"

#include <algorithm>
#include <cmath>

#include "phaseplane/error.hpp"

namespace phaseplane {
namespace {

constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

Vec2 axpy(Vec2 y, double h, std::initializer_list<std::pair<double, Vec2>> terms) {
  Vec2 acc{};
  for (const auto& [coef, k] : terms) acc = acc + coef * k;
  return y + h * acc;
}

}  // namespace

Dopri5::Dopri5(PlanarRhs rhs, double t0, Vec2 y0, StepperOptions options)
    : rhs_(std::move(rhs)), options_(options), t_(t0), y_(y0), t_prev_(t0), y_prev_(y0) {
  f_ = rhs_(y_);
  h_ = options_.initial_step > 0.0 ? options_.initial_step : initial_step();
  h_ = std::min(h_, options_.max_step);
  cont_.fill(Vec2{});
  cont_[0] = y_;
}

double Dopri5::error_norm(Vec2 y0, Vec2 y1, Vec2 err) const {
  const double sx = options_.atol + options_.rtol * std::max(std::fabs(y0.x), std::fabs(y1.x));
  const double sy = options_.atol + options_.rtol * std::max(std::fabs(y0.y), std::fabs(y1.y));
  const double ex = err.x / sx;
  const double ey = err.y / sy;
  return std::sqrt(0.5 * (ex * ex + ey * ey));
}

// Starting step from the size of the solution, its derivative and a crude
// second-derivative estimate (Hairer, Norsett & Wanner, II.4).
double Dopri5::initial_step() const {
  const double sx = options_.atol + options_.rtol * std::fabs(y_.x);
  const double sy = options_.atol + options_.rtol * std::fabs(y_.y);
  auto norm = [&](Vec2 v) { return std::sqrt(0.5 * ((v.x / sx) * (v.x / sx) + (v.y / sy) * (v.y / sy))); };
  const double dy0 = norm(y_);
  const double df0 = norm(f_);
  double h0 = (dy0 < 1e-5 || df0 < 1e-5) ? 1e-6 : 0.01 * dy0 / df0;
  h0 = std::min(h0, options_.max_step);
  Vec2 f1;
  try {
    f1 = rhs_(y_ + h0 * f_);
  } catch (const DomainError&) {
    return h0 * 1e-3;
  }
  const double d2 = norm(f1 - f_) / h0;
  const double dmax = std::max(df0, d2);
  const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 0.2);
  return std::min(100.0 * h0, h1);
}

Dopri5::Status Dopri5::step(double t_limit) {
  bool last_rejected = false;
  for (;;) {
    const double natural = std::min(h_, options_.max_step);
    const double h = std::min(natural, t_limit - t_);
    if (h <= 1e-14 * std::max(1.0, std::fabs(t_)) && t_limit - t_ > h) return Status::Underflow;
    if (h <= 0.0) return Status::Underflow;

    const Vec2 k1 = f_;
    Vec2 k2, k3, k4, k5, k6, k7, y_new, err;
    bool domain_failure = false;
    try {
      k2 = rhs_(axpy(y_, h, {{a21, k1}}));
      k3 = rhs_(axpy(y_, h, {{a31, k1}, {a32, k2}}));
      k4 = rhs_(axpy(y_, h, {{a41, k1}, {a42, k2}, {a43, k3}}));
      k5 = rhs_(axpy(y_, h, {{a51, k1}, {a52, k2}, {a53, k3}, {a54, k4}}));
      k6 = rhs_(axpy(y_, h, {{a61, k1}, {a62, k2}, {a63, k3}, {a64, k4}, {a65, k5}}));
      y_new = axpy(y_, h, {{a71, k1}, {a73, k3}, {a74, k4}, {a75, k5}, {a76, k6}});
      k7 = rhs_(y_new);
      err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    } catch (const DomainError&) {
      domain_failure = true;
    }
    const double en = domain_failure ? std::numeric_limits<double>::infinity()
                                     : error_norm(y_, y_new, err);
    if (!std::isfinite(en) || en > 1.0) {
      ++rejected_;
      const double fac = std::isfinite(en) ? std::max(0.2, 0.9 * std::pow(en, -0.2)) : 0.25;
      h_ = h * fac;
      last_rejected = true;
      continue;
    }

    const Vec2 ydiff = y_new - y_;
    const Vec2 bspl = h * k1 - ydiff;
    cont_[0] = y_;
    cont_[1] = ydiff;
    cont_[2] = bspl;
    cont_[3] = ydiff - h * k7 - bspl;
    cont_[4] = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);

    t_prev_ = t_;
    y_prev_ = y_;
    t_ = (h == t_limit - t_) ? t_limit : t_ + h;
    y_ = y_new;
    f_ = k7;
    ++accepted_;

    double fac = en == 0.0 ? 10.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 10.0);
    if (last_rejected) fac = std::min(fac, 1.0);
    // A step shortened to land on t_limit says little about the step size
    // the solution allows, so it must not shrink the next one.
    h_ = h < natural ? std::max(natural, h * fac) : h * fac;
    return Status::Accepted;
  }
}

Vec2 Dopri5::dense(double t) const {
  const double h = t_ - t_prev_;
  if (h == 0.0) return y_;
  const double s = (t - t_prev_) / h;
  const double s1 = 1.0 - s;
  return cont_[0] + s * (cont_[1] + s1 * (cont_[2] + s * (cont_[3] + s1 * cont_[4])));
}

}  // namespace phaseplane
