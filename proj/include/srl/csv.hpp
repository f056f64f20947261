#pragma once

#include <string>
#include <vector>

#include "srl/trajectory.hpp"

namespace srl {

// Round-trip-safe formatting (%.17g); identical doubles always produce
// identical bytes, which is what the reproducibility contract rides on.
std::string format_double(double v);

void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<double>& row_major_values);

// Header: t, then Y and X columns in player-major order
// (y_<player>_<action>, ..., x_<player>_<action>, ...), 1-based indices.
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

}  // namespace srl
