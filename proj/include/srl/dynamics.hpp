#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "srl/game.hpp"
#include "srl/kernel.hpp"
#include "srl/noise.hpp"
#include "srl/rng.hpp"
#include "srl/schedule.hpp"
#include "srl/trajectory.hpp"

namespace srl {

// Coupled learning system: scores accumulate noisy payoffs, strategies are
// the regularized best responses X_k = Q_k(eta_k(t) Y_k).
struct SrlSystem {
    const Game* game = nullptr;
    std::vector<PenaltyKernel> kernels;      // one per player
    std::vector<LearningSchedule> schedules; // one per player
    NoiseModel noise = NoiseModel::none(0);

    void validate() const;
    std::string describe() const;
};

struct SimOptions {
    double dt = 1e-3;
    double horizon = 1.0;
    int thin = 1;                 // store every thin-th step
    std::uint64_t seed = 0;
    std::uint64_t trajectory_index = 0;
    std::uint64_t max_steps = 100'000'000;
    double stream_cap = 1e6;      // reject unilateral payoff streams above this
};

// Maps scores to the flat strategy profile through the per-player choice
// maps at rate eta_k(t).
void strategies_from_scores(const SrlSystem& system, const std::vector<double>& y,
                            double t, std::vector<double>& x_flat);

// Reusable integrator with preallocated workspace; simulate() and the
// ensemble experiments drive their step loops through this.
class SrlStepper {
public:
    explicit SrlStepper(const SrlSystem& system) : system_(&system) {}

    // One Euler-Maruyama step on the scores at time t (counter index `step`).
    void step(std::vector<double>& y, double t, double dt, const TrajectoryRng& rng,
              std::uint64_t step);
    // X = Q(eta(t) Y), written into x_flat.
    void strategies(const std::vector<double>& y, double t, std::vector<double>& x_flat);

private:
    const SrlSystem* system_;
    std::vector<double> x_, v_, incr_, yk_, xk_;
};

// One Euler-Maruyama step of the score process: with X = Q(eta(t) Y),
//   Y' = Y + v(X) dt + noise increment.
// X is never advanced directly; callers re-derive it from Y'.
void step_srl(const SrlSystem& system, std::vector<double>& y, double t, double dt,
              const TrajectoryRng& rng, std::uint64_t step);

// Full run over [0, horizon] from initial scores y0 (empty = zeros), with
// storage thinning. Bit-reproducible given (seed, trajectory_index, dt, thin).
Trajectory simulate(const SrlSystem& system, const std::vector<double>& y0,
                    const SimOptions& opts);

// Exogenous payoff stream for the single-agent process: fills v(t).
using PayoffStream = std::function<void(double t, std::vector<double>& v)>;

PayoffStream constant_stream(std::vector<double> v);
// v(t) = hi while fmod(t, period) < period/2, else lo.
PayoffStream square_wave_stream(double period, std::vector<double> hi,
                                std::vector<double> lo);
// Square wave whose half-period grows with sqrt(t): switches at t = (scale k)^2,
// so the instantaneous period is ~2 scale sqrt(t). A fixed-period wave is not
// adversarial for a sqrt(t)-rate learner (its tracking deficit stays bounded);
// scaling the period to the learner's adaptation width makes the accumulated
// regret grow at the sqrt(t) rate the bounds are about.
PayoffStream sqrt_square_wave_stream(double scale, std::vector<double> hi,
                                     std::vector<double> lo);

// Same integrator as step_srl with the stream in place of game payoffs and
// per-coordinate noise scales sigma (time-constant).
void step_unilateral(const PayoffStream& stream, const PenaltyKernel& kernel,
                     const LearningSchedule& schedule, const std::vector<double>& sigma,
                     std::vector<double>& y, double t, double dt,
                     const TrajectoryRng& rng, std::uint64_t step, double stream_cap = 1e6);

Trajectory simulate_unilateral(const PayoffStream& stream, const PenaltyKernel& kernel,
                               const LearningSchedule& schedule,
                               const std::vector<double>& sigma,
                               const std::vector<double>& y0, const SimOptions& opts);

// Drift-diffusion decomposition of the induced strategy process at an
// interior state, for separable kernels with independent per-coordinate
// noise. Terms per flat coordinate:
//   payoff     (eta/theta''_a) [v_a - T'' sum_b v_b / theta''_b]
//   rate       (eta_dot/eta) (1/theta''_a) [theta'_a - T'' sum_b theta'_b/theta''_b]
//   ito        -(1/(2 theta''_a)) [theta'''_a U_a^2 - T'' sum_b theta'''_b/theta''_b U_b^2]
//   diffusion_sq = U_a^2, the per-coordinate quadratic variation rate.
// Sums run over the support of X_k (fixed support for non-steep kernels).
struct DriftTerms {
    std::vector<double> payoff;
    std::vector<double> rate;
    std::vector<double> ito;
    std::vector<double> diffusion_sq;

    std::vector<double> total_drift() const;
};
DriftTerms drift_terms(const SrlSystem& system, const MixedProfile& x, double t);

// Euler-Maruyama step of the evolutionary aggregate-shocks replicator system,
// taken directly in strategy space with constant per-coordinate sigma;
// clamps and renormalizes each simplex block after the step.
void step_asrd(const Game& game, std::vector<double>& x_flat,
               const std::vector<double>& sigma, double dt,
               const TrajectoryRng& rng, std::uint64_t step);

// Pure best response of `player` against x; ties break to the lowest index.
int best_response_pure(const Game& game, const MixedProfile& x, int player);

// One deterministic best-response-dynamics step x' = x + dt (b - x); the
// chosen pure responses are written to `chosen` when non-null.
MixedProfile step_brd(const Game& game, const MixedProfile& x, double dt,
                      ActionProfile* chosen = nullptr);

}  // namespace srl
