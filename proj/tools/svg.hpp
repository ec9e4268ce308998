#pragma once

#include <string>
#include <vector>

#include "phaseplane/phase1d.hpp"
#include "phaseplane/phase2d.hpp"

namespace phaseplane::cli {

struct PortraitOptions {
  std::string title;
  int grid = 64;    // null-cline and equilibrium search lattice
  int arrows = 15;  // arrow lattice per side
  std::vector<Vec2> starts;
  double tmax = 10.0;
};

/// Dashed x-clines, solid y-clines, sign arrows, equilibrium markers (filled
/// stable, open unstable, half-filled saddle) and optional trajectories.
/// Output depends only on the model and options.
std::string portrait_svg(const Model2D& m, const PortraitOptions& options);

std::string phaseline_svg(const Model1D& m, const PhaseLine& line, const std::string& title);

}  // namespace phaseplane::cli
