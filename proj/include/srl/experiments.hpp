#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "srl/analysis.hpp"
#include "srl/congestion.hpp"
#include "srl/dynamics.hpp"

namespace srl {

// Outcome of one quantitative check, serialized by the runner as a verdict
// record {check_id, passed, statistic, bound, n_runs, ci}. A check may also
// carry a row-major summary table (one row per time point) that the runner
// exports as CSV.
struct CheckResult {
    std::string check_id;
    bool passed = false;
    double statistic = 0.0;
    double bound = 0.0;
    int n_runs = 0;
    double ci_half_width = 0.0;
    std::vector<std::pair<std::string, double>> details;
    std::vector<std::string> series_columns;
    std::vector<double> series_values;  // row-major, size multiple of columns
};

// Single agent against an adversarial square-wave payoff stream whose period
// scales like the learner's sqrt(t) adaptation width (switches at t = k^2);
// checks the noisy cumulative-regret bound run by run, the growth exponent of
// the median regret, and the noiseless constant-rate guarantee Reg <= Omega/eta.
struct AdversarialRegretParams {
    double wave_scale = 1.0;  // switches at (scale k)^2
    double sigma = 1.0;
    LearningSchedule schedule = LearningSchedule::power(1.0, 0.5, 1.0);
    double dt = 0.01;
    double horizon = 1e4;
    int thin = 100;
    int n_runs = 200;
    std::uint64_t seed = 1;
    double lil_constant = 3.0;
    double window_lo = 1e2, window_hi = 1e4;  // where the bound must hold
    double min_fraction = 0.95;
    double slope_lo = 0.45, slope_hi = 0.65;  // median regret, last decade
    // Noiseless subcheck (sigma = 0, constant eta).
    double det_eta = 1.0;
    double det_horizon = 64.0;
    double det_dt = 1e-3;
    int det_thin = 1;
    int workers = 0;
    std::string id_prefix = "adversarial-regret";
};
std::vector<CheckResult> adversarial_regret_check(const AdversarialRegretParams& params);

// Extinction of a dominated action: almost-sure decay envelope, pointwise
// exceedance probabilities, and mean hitting time, all against the
// closed-form bounds at the configured parameters.
struct ExtinctionParams {
    Game game = single_player({0.0, 1.0});
    int player = 0;
    int dominated = 0;
    int dominating = 1;
    PenaltyKernel kernel = PenaltyKernel::entropy();
    LearningSchedule schedule = LearningSchedule::constant(1.0);
    NoiseModel noise = NoiseModel::diagonal_uniform(1.0, 2);

    bool check_envelope = true;  // off for correlated noise: the envelope
                                 // constants assume independent coordinates
    double envelope_eps = 0.5;
    double envelope_t_floor = 100.0;
    double envelope_min_fraction = 0.95;
    int envelope_runs = 200;

    double horizon = 200.0;
    double dt = 1e-3;
    int thin = 100;
    std::vector<double> exceedance_times = {50.0, 100.0, 200.0};
    double delta = 0.049787068367863944;  // e^-3
    int tail_runs = 1000;

    double hitting_horizon = 60.0;  // runs stop at the crossing, so generous
    double hitting_dt = 1e-4;
    int hitting_runs = 1000;

    std::uint64_t seed = 1;
    int workers = 0;
    std::string id_prefix = "extinction";
};
std::vector<CheckResult> extinction_check(const ExtinctionParams& params);

// Stochastic stability of a strict equilibrium: runs started deep inside
// the equilibrium's score neighborhood (Z(0) = -2M) must stay there (no
// Z coordinate above -M) except with probability <= eps, and almost all
// runs must end next to the equilibrium.
struct StabilityParams {
    Game game = coordination_2x2();
    ActionProfile equilibrium = {0, 0};
    double eps = 0.1;
    double margin = 1.0;  // payoff margin valid on the score neighborhood
    double sigma = 1.0;
    double eta = 1.0;
    double neighborhood_m = 0.0;  // 0 = derive from eta * sigma^2 * log(N/eps) / margin
    double dt = 1e-2;
    double horizon = 1e3;
    int thin = 10;
    int n_runs = 1000;
    double convergence_tol = 1e-3;
    double min_converged_fraction = 0.9;
    std::uint64_t seed = 1;
    int workers = 0;
    std::string id_prefix = "stability";
};
std::vector<CheckResult> stability_check(const StabilityParams& params);
double stability_neighborhood_m(const StabilityParams& params);

// Time averages in a zero-sum game with an interior equilibrium: the
// averaged profile approaches uniform and the Nash gap of the average keeps
// shrinking between the two tracked horizons.
struct TimeAverageParams {
    Game game = matching_pennies();
    PenaltyKernel kernel = PenaltyKernel::entropy();
    LearningSchedule schedule = LearningSchedule::power(1.0, 0.5, 1.0);
    double sigma = 1.0;
    double dt = 0.01;
    double horizon = 1e4;
    int thin = 100;
    int n_runs = 100;
    double sup_tol = 0.05;
    double min_fraction = 0.9;
    double gap_early_time = 1e3;
    std::uint64_t seed = 1;
    int workers = 0;
    std::string id_prefix = "time-average";
};
std::vector<CheckResult> time_average_check(const TimeAverageParams& params);

// Correlated congestion noise: the empirical covariance of the simulated
// score increments (drift removed) must match the shared-edge covariance
// entrywise within tol_se standard errors.
struct CovarianceParams {
    CongestionNetwork network = shared_edge_network();
    double eta = 1.0;
    double dt = 0.01;
    long long n_steps = 1'000'000;
    double tol_se = 3.0;
    std::uint64_t seed = 1;
    std::string id_prefix = "covariance";
};
std::vector<CheckResult> covariance_check(const CovarianceParams& params);

}  // namespace srl
