#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <limits>

#include "phaseplane/algebra2.hpp"

namespace phaseplane {

/// Right-hand side of an autonomous planar system. May throw DomainError;
/// the stepper treats that as a failed step and retries with a smaller one.
using PlanarRhs = std::function<Vec2(Vec2)>;

struct StepperOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  double max_step = std::numeric_limits<double>::infinity();
  double initial_step = 0.0;  // 0 selects automatically
};

/// Explicit Runge-Kutta 5(4) pair of Dormand and Prince with step-size
/// control and the standard fourth-order continuous extension.
class Dopri5 {
 public:
  enum class Status { Accepted, Underflow };

  Dopri5(PlanarRhs rhs, double t0, Vec2 y0, StepperOptions options = {});

  /// Takes one accepted step, never stepping past `t_limit`.
  Status step(double t_limit);

  double t() const { return t_; }
  Vec2 y() const { return y_; }
  double t_prev() const { return t_prev_; }
  Vec2 y_prev() const { return y_prev_; }
  /// Interpolates inside the last accepted step, t in [t_prev(), t()].
  Vec2 dense(double t) const;

  std::size_t accepted() const { return accepted_; }
  std::size_t rejected() const { return rejected_; }

 private:
  double initial_step() const;
  double error_norm(Vec2 y0, Vec2 y1, Vec2 err) const;

  PlanarRhs rhs_;
  StepperOptions options_;
  double t_;
  Vec2 y_;
  Vec2 f_;  // rhs at (t_, y_)
  double t_prev_;
  Vec2 y_prev_;
  double h_ = 0.0;
  std::array<Vec2, 5> cont_{};  // dense-output coefficients of the last step
  std::size_t accepted_ = 0;
  std::size_t rejected_ = 0;
};

}  // namespace phaseplane
