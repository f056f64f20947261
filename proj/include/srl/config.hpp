#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "srl/congestion.hpp"
#include "srl/dynamics.hpp"
#include "srl/game.hpp"

namespace srl {

// Fully resolved experiment description. Parsed from a single JSON document;
// `raw` keeps the resolved form (defaults filled in) that goes into the run
// manifest, so a manifest can be re-run byte-identically.
struct ExperimentConfig {
    std::string name = "experiment";
    enum class Mode { GameDynamics, Unilateral } mode = Mode::GameDynamics;

    // Game mode.
    std::optional<Game> game;
    std::optional<CongestionNetwork> network;  // set when the game came from one

    // Unilateral mode.
    std::string stream_type;  // "constant" | "square-wave" | "square-wave-sqrt"
    int stream_dim = 0;
    double stream_period = 8.0;  // fixed period, or the sqrt-wave scale
    std::vector<double> stream_high, stream_low, stream_values;

    std::vector<std::string> kernel_names;
    std::vector<LearningSchedule> schedules;

    std::string noise_mode = "none";  // none | diagonal | correlated | congestion
    double noise_sigma = 0.0;
    std::vector<double> noise_sigma_per_coord;
    std::vector<double> noise_covariance;  // row-major, correlated mode

    std::vector<double> initial_scores;

    double dt = 1e-3;
    double horizon = 1.0;
    int thin = 1;

    int n_runs = 1;
    std::uint64_t master_seed = 1;
    int workers = 0;

    bool out_trajectory = true;
    bool out_time_average = false;
    bool out_regret = false;
    bool out_nash_gap = false;

    nlohmann::json analysis = nlohmann::json::array();
    nlohmann::json raw;

    int total_coords() const;
    NoiseModel build_noise() const;
    PayoffStream build_stream() const;
    std::vector<PenaltyKernel> build_kernels() const;
};

// Parses and validates; throws ConfigError with a actionable message on any
// schema or range violation. Accepts either a config document or a run
// manifest (an object with an embedded "config").
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig parse_config_file(const std::string& path);

// Built-in scenario catalog.
struct PresetInfo {
    std::string name;
    std::string description;
};
std::vector<PresetInfo> list_presets();
nlohmann::json preset_config(const std::string& name);

// FNV-1a over the canonical dump; used as the manifest config hash.
std::string config_hash(const nlohmann::json& doc);

}  // namespace srl
