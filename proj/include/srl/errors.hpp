#pragma once

#include <stdexcept>
#include <string>

namespace srl {

// Invalid experiment configuration (bad schema, out-of-range parameter, ...).
// The CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Failure while running a simulation or analysis (non-finite state,
// step budget exceeded, solver breakdown, ...). CLI exit code 3.
struct SimulationError : std::runtime_error {
    explicit SimulationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace srl
