#pragma once

#include <string>

namespace phaseplane {

/// Shortest decimal text that parses back to exactly `v`.
std::string format_shortest(double v);

}  // namespace phaseplane
