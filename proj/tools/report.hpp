#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "phaseplane/corpus.hpp"
#include "phaseplane/cycles.hpp"

namespace phaseplane::cli {

using nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

std::string sha256_hex(std::string_view data);

/// Two-space indented JSON with sorted keys and a trailing newline.
std::string dump(const json& j);

json vec_json(Vec2 v);
json eigen_json(const Mat2& m);
json equilibrium_json(const EquilibriumReport& r);

/// Null-cline counts and per-polyline bounding boxes.
json nullclines_json(const NullClineSet& set);

json analyze_2d(const Model2D& m, int grid);
json analyze_1d(const Model1D& m);
json cycle_json(const CycleReport& c);
json hopf_json(const HopfScan& s, const std::string& param);
json fold_json(const Model1D& m, const std::string& param, double lo, double hi, int steps,
               const std::optional<FoldResult>& r);
json linsolve_json(const Mat2& m, std::optional<Vec2> init);

}  // namespace phaseplane::cli
