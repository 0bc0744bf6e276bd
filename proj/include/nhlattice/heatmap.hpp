#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "nhlattice/dynamics.hpp"

namespace nhl {

using Rgb = std::array<std::uint8_t, 3>;

// Fixed 256-level colormap with strictly increasing luminance; v is clamped
// to [0, 1].
Rgb heatmap_color(double v);
double relative_luminance(Rgb color);

// SVG of rho_n(t): columns are samples, rows are sites, values scaled by the
// global maximum. Throws InvalidArgument on an empty trajectory.
std::string render_heatmap(const Trajectory& traj, const std::string& title = "");

}  // namespace nhl
