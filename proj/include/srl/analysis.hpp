#pragma once

#include <optional>
#include <span>
#include <vector>

#include "srl/dynamics.hpp"
#include "srl/game.hpp"
#include "srl/kernel.hpp"
#include "srl/schedule.hpp"
#include "srl/trajectory.hpp"

namespace srl {

// sqrt(t log log t); zero for t <= e where the iterated logarithm is not
// positive. All bounds below use this envelope.
double lil_envelope(double t);

// Regret ---------------------------------------------------------------------

// Cumulative regret Reg(t) = max_a int_0^t v_a - int_0^t <v, x> against the
// expected (noiseless) payoff stream, by trapezoidal quadrature on the
// stored grid. The pointwise max over actions is taken at every time.
struct RegretSeries {
    std::vector<double> times;
    std::vector<double> regret;
    // Filled by attach_regret_bound:
    std::vector<double> bound;         // sum of the three components
    std::vector<double> term_penalty;  // Omega / eta(t)
    std::vector<double> term_noise;    // sigma_max^2 (n / 2K) int_0^t eta
    std::vector<double> term_lil;      // c sigma_max sqrt(t log log t)
};
RegretSeries cumulative_regret(const Trajectory& traj, const PayoffStream& stream);

struct RegretBoundParams {
    double omega = 0.0;             // penalty range over the simplex
    double strong_convexity = 1.0;  // K
    double sigma_max = 0.0;
    int n_actions = 0;
    LearningSchedule schedule = LearningSchedule::constant(1.0);
    double lil_constant = 3.0;      // c of the third term
};
// Rejects a non-vanishing schedule with sigma_max > 0 (the bound would be
// linear in t).
double regret_bound(const RegretBoundParams& params, double t);
void attach_regret_bound(RegretSeries& series, const RegretBoundParams& params);

// Extinction of dominated strategies ------------------------------------------

// Initial-condition constant of the extinction bounds:
// C = theta'(1) + eta(0) |Y_a(0) - Y_b(0)|.
double extinction_constant(const PenaltyKernel& kernel, const LearningSchedule& schedule,
                           double y0_a, double y0_b);

// Decay envelope for a strategy dominated with margin m > 0:
//   phi[C - eta(t) (m t - 2 (1 + eps) sigma_ab sqrt(t log log t))],
// requires a steep kernel (phi = inverse of theta'). Values cap at 1.
double extinction_envelope(const PenaltyKernel& kernel, double m, double sigma_ab,
                           double c, const LearningSchedule& schedule, double eps,
                           double t);

// Tail bound for P(X(t) > delta):
//   (1/2) erfc[ (m sqrt(t) - (C - theta'(delta)) / (eta(t) sqrt(t))) / (2 sigma_ab) ].
// Returns the trivial bound 1 until m t eta(t) > C - theta'(delta).
double exceedance_bound(const PenaltyKernel& kernel, double m, double sigma_ab,
                        double c, const LearningSchedule& schedule, double delta,
                        double t);

// Mean time for the dominated weight to drop below delta, constant eta:
// [C - theta'(delta)]_+ / (eta m).
double hitting_time_bound(const PenaltyKernel& kernel, double m, double eta,
                          double delta, double c);

// First stored time with X_{player,action} <= delta; nullopt if censored.
std::optional<double> first_passage_time(const Trajectory& traj, int player, int action,
                                         double delta);

struct HittingTimeEstimate {
    int n_runs = 0;
    int censored = 0;
    double mean_uncensored = 0.0;
    std::vector<double> times;  // uncensored first-passage times
};

class HittingTimeAccumulator {
public:
    HittingTimeAccumulator(int player, int action, double delta)
        : player_(player), action_(action), delta_(delta) {}
    void add(const Trajectory& traj);
    HittingTimeEstimate finalize() const;

private:
    int player_, action_;
    double delta_;
    std::vector<double> times_;
    int censored_ = 0;
};

HittingTimeEstimate estimate_hitting_time(std::span<const Trajectory> runs, int player,
                                          int action, double delta);

// Time averages ---------------------------------------------------------------

struct TimeAverageSeries {
    std::vector<double> times;
    std::vector<double> averages;  // row-major [time][coord]
    int n_coords = 0;

    std::span<const double> at(std::size_t i) const {
        return {averages.data() + i * n_coords, static_cast<std::size_t>(n_coords)};
    }
};
// Running trapezoidal average Xbar(t) = (1/t) int_0^t X; Xbar(0) = X(0).
TimeAverageSeries time_average(const Trajectory& traj);

// nash_gap(Xbar(t)) for tracking equilibrium convergence of the averages.
std::vector<double> nash_gap_series(const Game& game, const TimeAverageSeries& avg);

// Growth diagnostics ----------------------------------------------------------

// Least-squares slope of log(v) vs log(t) over times in [t_lo, t_hi];
// points with v <= positive_floor are skipped. Throws if fewer than
// min_points remain.
double loglog_slope(std::span<const double> times, std::span<const double> values,
                    double t_lo, double t_hi, int min_points = 10,
                    double positive_floor = 1e-12);

struct GrowthDiagnostic {
    double slope = 0.0;
    int points = 0;
    bool sublinear = false;  // slope < 0.95
};
// Fits |Y_a - Y_b| against t on the trajectory's last decade [T/10, T].
GrowthDiagnostic score_difference_growth(const Trajectory& traj, int player,
                                         int action_a, int action_b);

// Ensemble summaries ----------------------------------------------------------

struct BinomialCi {
    double phat = 0.0;
    double half_width = 0.0;  // 95% normal approximation
    double upper = 0.0;
};
BinomialCi binomial_ci_95(int successes, int n);

// Per-time scalar statistics over an ensemble of runs.
class EnsembleSummary {
public:
    explicit EnsembleSummary(std::vector<double> tracked_times);

    // One value per tracked time; runs may arrive in any order.
    void add_run(std::uint64_t run_index, std::span<const double> values);

    int n_runs() const { return static_cast<int>(seeds_.size()); }
    const std::vector<double>& times() const { return times_; }
    const std::vector<std::uint64_t>& run_indices() const { return seeds_; }

    double mean(std::size_t time_idx) const;
    double variance(std::size_t time_idx) const;
    double quantile(std::size_t time_idx, double level) const;
    int exceedance_count(std::size_t time_idx, double threshold) const;

private:
    std::vector<double> times_;
    std::vector<std::vector<double>> values_;  // [time][run]
    std::vector<std::uint64_t> seeds_;
};

}  // namespace srl
