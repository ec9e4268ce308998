#include "phaseplane/format.hpp"

#include <array>
#include <charconv>
#include <stdexcept>

namespace phaseplane {

std::string format_shortest(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf.data(), end);
}

}  // namespace phaseplane
