#include <algorithm>
#include <cmath>

#include "phaseplane/error.hpp"
#include "phaseplane/integrator.hpp"
#include "phaseplane/phase2d.hpp"

namespace phaseplane {

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::Completed:
      return "completed";
    case Termination::DomainExit:
      return "domain_exit";
    case Termination::StepUnderflow:
      return "step_underflow";
  }
  return "?";
}

Trajectory integrate_trajectory(const Model2D& m, Vec2 start, double t_end, const TrajectoryOptions& options) {
  if (!(t_end > 0.0)) throw Error("t_end must be positive");
  const double slack = 1e-12 * m.domain.diagonal();
  if (!m.domain.contains(start, slack)) throw Error("start point lies outside the domain");
  const VectorField2D field(m);
  const double direction = options.reverse_time ? -1.0 : 1.0;
  auto rhs = [&field, direction](Vec2 p) { return direction * field(p); };

  std::vector<double> outputs;
  for (double t : options.output_times) {
    if (t > 0.0 && t <= t_end) outputs.push_back(t);
  }
  std::sort(outputs.begin(), outputs.end());
  outputs.erase(std::unique(outputs.begin(), outputs.end()), outputs.end());

  StepperOptions so;
  so.rtol = options.rtol;
  so.atol = options.atol;
  so.max_step = options.max_step;
  Dopri5 stepper(rhs, 0.0, start, so);

  Trajectory traj;
  traj.samples.push_back({0.0, start.x, start.y});
  std::size_t next_output = 0;
  while (stepper.t() < t_end) {
    const double target = next_output < outputs.size() ? outputs[next_output] : t_end;
    if (stepper.step(target) == Dopri5::Status::Underflow) {
      traj.termination = Termination::StepUnderflow;
      break;
    }
    const Vec2 p = stepper.y();
    if (options.stop_at_domain_exit && !m.domain.contains(p, slack)) {
      double lo = stepper.t_prev();
      double hi = stepper.t();
      for (int it = 0; it < 60 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (m.domain.contains(stepper.dense(mid), slack)) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      if (lo > traj.samples.back().t) {
        const Vec2 q = stepper.dense(lo);
        traj.samples.push_back({lo, q.x, q.y});
      }
      traj.termination = Termination::DomainExit;
      traj.exit_time = lo;
      break;
    }
    traj.samples.push_back({stepper.t(), p.x, p.y});
    if (stepper.t() == target && next_output < outputs.size()) ++next_output;
  }
  traj.accepted = stepper.accepted();
  traj.rejected = stepper.rejected();
  return traj;
}

}  // namespace phaseplane
