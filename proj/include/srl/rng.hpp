#pragma once

#include <cmath>
#include <cstdint>

namespace srl {

// Stateless counter-based random numbers.
//
// Every draw is a pure function of (master seed, trajectory index, step
// index, coordinate, lane), so ensemble results do not depend on how
// trajectories are scheduled across worker threads, and a trajectory can be
// re-generated exactly from its indices alone.
//
// Limits imposed by the key packing: coordinate < 2^7, trajectory < 2^18,
// step < 2^38 (comfortably above the 1e8 step budget).
namespace rng_detail {

inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

inline std::uint64_t keyed(std::uint64_t seed, std::uint64_t trajectory,
                           std::uint64_t step, std::uint32_t coord, std::uint32_t lane) {
    const std::uint64_t pack =
        (step << 26) ^ (trajectory << 8) ^ (static_cast<std::uint64_t>(coord) << 1) ^ lane;
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (pack + 0x632BE59BD9B4E019ULL);
    return mix64(mix64(z));
}

}  // namespace rng_detail

// Uniform on (0, 1]; never returns 0 so it is safe under log().
inline double counter_uniform(std::uint64_t seed, std::uint64_t trajectory,
                              std::uint64_t step, std::uint32_t coord, std::uint32_t lane) {
    const std::uint64_t z = rng_detail::keyed(seed, trajectory, step, coord, lane);
    return static_cast<double>((z >> 11) + 1) * 0x1.0p-53;
}

// Standard normal via Box-Muller (cosine branch).
inline double counter_normal(std::uint64_t seed, std::uint64_t trajectory,
                             std::uint64_t step, std::uint32_t coord) {
    const double u1 = counter_uniform(seed, trajectory, step, coord, 0);
    const double u2 = counter_uniform(seed, trajectory, step, coord, 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

// Convenience handle bound to one trajectory of one ensemble.
struct TrajectoryRng {
    std::uint64_t seed = 0;
    std::uint64_t trajectory = 0;

    double normal(std::uint64_t step, std::uint32_t coord) const {
        return counter_normal(seed, trajectory, step, coord);
    }
    double uniform(std::uint64_t step, std::uint32_t coord, std::uint32_t lane = 0) const {
        return counter_uniform(seed, trajectory, step, coord, lane);
    }
};

}  // namespace srl
