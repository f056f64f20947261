#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace srl {

// Stored time series of one simulation run. Scores Y are the integrated
// process; strategies X are always re-derived through the choice maps, never
// integrated directly, so every stored X row lies on the product of
// simplices by construction.
struct Trajectory {
    std::vector<double> times;       // uniform grid, spacing dt * thin
    std::vector<double> scores;      // row-major [stored_step][coord]
    std::vector<double> strategies;  // row-major [stored_step][coord]
    int n_coords = 0;
    std::vector<int> actions_per_player;

    double dt = 0.0;
    int thin = 1;
    std::uint64_t seed = 0;
    std::uint64_t trajectory_index = 0;
    std::string meta;  // kernel / schedule / noise identifiers

    std::size_t size() const { return times.size(); }

    std::span<const double> scores_at(std::size_t i) const {
        return {scores.data() + i * n_coords, static_cast<std::size_t>(n_coords)};
    }
    std::span<const double> strategies_at(std::size_t i) const {
        return {strategies.data() + i * n_coords, static_cast<std::size_t>(n_coords)};
    }

    int coord_offset(int player) const {
        int off = 0;
        for (int k = 0; k < player; ++k) off += actions_per_player[k];
        return off;
    }
    double strategy(std::size_t i, int player, int action) const {
        return strategies[i * n_coords + coord_offset(player) + action];
    }
    double score(std::size_t i, int player, int action) const {
        return scores[i * n_coords + coord_offset(player) + action];
    }
};

}  // namespace srl
