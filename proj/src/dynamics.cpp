#include "srl/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "srl/errors.hpp"

namespace srl {

void SrlSystem::validate() const {
    if (!game) throw ConfigError("learning system has no game");
    if (static_cast<int>(kernels.size()) != game->players())
        throw ConfigError("need one kernel per player");
    if (static_cast<int>(schedules.size()) != game->players())
        throw ConfigError("need one learning schedule per player");
    if (noise.dim() != game->total_coords())
        throw ConfigError("noise model dimension does not match the game");
    noise.validate_against(*game);
}

std::string SrlSystem::describe() const {
    std::string s = "kernels=";
    for (std::size_t k = 0; k < kernels.size(); ++k)
        s += (k ? "," : "") + kernels[k].name();
    s += "; schedules=";
    for (std::size_t k = 0; k < schedules.size(); ++k)
        s += (k ? "," : "") + schedules[k].describe();
    s += "; noise=";
    switch (noise.mode()) {
        case NoiseModel::Mode::None: s += "none"; break;
        case NoiseModel::Mode::Diagonal: s += "diagonal"; break;
        case NoiseModel::Mode::Correlated: s += "correlated"; break;
    }
    return s;
}

namespace {

void require_finite_state(const std::vector<double>& y) {
    for (double v : y)
        if (!std::isfinite(v))
            throw SimulationError(
                "score process left the finite range (check payoffs/noise/config)");
}

}  // namespace

void SrlStepper::strategies(const std::vector<double>& y, double t,
                            std::vector<double>& x_flat) {
    const Game& game = *system_->game;
    x_flat.resize(game.total_coords());
    for (int k = 0; k < game.players(); ++k) {
        const int off = game.coord_offset(k);
        const int n = game.num_actions(k);
        const double eta = system_->schedules[k].eta(t);
        yk_.assign(y.begin() + off, y.begin() + off + n);
        for (double& v : yk_) v *= eta;
        choice_map(system_->kernels[k], yk_, xk_);
        std::copy(xk_.begin(), xk_.end(), x_flat.begin() + off);
    }
}

void SrlStepper::step(std::vector<double>& y, double t, double dt,
                      const TrajectoryRng& rng, std::uint64_t step) {
    strategies(y, t, x_);
    system_->game->payoff_vectors_flat(x_, v_);
    system_->noise.sample_increment(x_, dt, rng, step, incr_);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += v_[i] * dt + incr_[i];
    require_finite_state(y);
}

void strategies_from_scores(const SrlSystem& system, const std::vector<double>& y,
                            double t, std::vector<double>& x_flat) {
    SrlStepper stepper(system);
    stepper.strategies(y, t, x_flat);
}

void step_srl(const SrlSystem& system, std::vector<double>& y, double t, double dt,
              const TrajectoryRng& rng, std::uint64_t step) {
    if (dt < 0.0) throw ConfigError("step size must be >= 0");
    SrlStepper stepper(system);
    stepper.step(y, t, dt, rng, step);
}

Trajectory simulate(const SrlSystem& system, const std::vector<double>& y0,
                    const SimOptions& opts) {
    system.validate();
    const Game& game = *system.game;
    const int dim = game.total_coords();
    if (opts.dt <= 0.0) throw ConfigError("integration step must be > 0");
    if (opts.horizon < opts.dt) throw ConfigError("horizon must be >= dt");
    if (opts.thin < 1) throw ConfigError("storage thinning must be >= 1");

    const auto n_steps = static_cast<std::uint64_t>(std::llround(opts.horizon / opts.dt));
    if (n_steps > opts.max_steps)
        throw SimulationError("step budget exceeded: " + std::to_string(n_steps) +
                              " steps requested");
    if (n_steps % opts.thin != 0)
        throw ConfigError("horizon/dt must be a multiple of the thinning stride");

    std::vector<double> y = y0.empty() ? std::vector<double>(dim, 0.0) : y0;
    if (static_cast<int>(y.size()) != dim)
        throw ConfigError("initial score vector has wrong dimension");

    Trajectory traj;
    traj.n_coords = dim;
    traj.actions_per_player = game.action_counts();
    traj.dt = opts.dt;
    traj.thin = opts.thin;
    traj.seed = opts.seed;
    traj.trajectory_index = opts.trajectory_index;
    traj.meta = system.describe();
    const std::uint64_t n_stored = n_steps / opts.thin + 1;
    traj.times.reserve(n_stored);
    traj.scores.reserve(n_stored * dim);
    traj.strategies.reserve(n_stored * dim);

    const TrajectoryRng rng{opts.seed, opts.trajectory_index};
    SrlStepper stepper(system);
    std::vector<double> x_flat;
    const auto store = [&](std::uint64_t step) {
        const double t = static_cast<double>(step) * opts.dt;
        stepper.strategies(y, t, x_flat);
        traj.times.push_back(t);
        traj.scores.insert(traj.scores.end(), y.begin(), y.end());
        traj.strategies.insert(traj.strategies.end(), x_flat.begin(), x_flat.end());
    };

    store(0);
    for (std::uint64_t step = 0; step < n_steps; ++step) {
        stepper.step(y, static_cast<double>(step) * opts.dt, opts.dt, rng, step);
        if ((step + 1) % opts.thin == 0) store(step + 1);
    }
    return traj;
}

PayoffStream constant_stream(std::vector<double> v) {
    return [v = std::move(v)](double, std::vector<double>& out) { out = v; };
}

PayoffStream square_wave_stream(double period, std::vector<double> hi,
                                std::vector<double> lo) {
    if (period <= 0.0) throw ConfigError("square wave period must be > 0");
    if (hi.size() != lo.size()) throw ConfigError("square wave levels must match in size");
    return [=](double t, std::vector<double>& out) {
        out = (std::fmod(t, period) < 0.5 * period) ? hi : lo;
    };
}

PayoffStream sqrt_square_wave_stream(double scale, std::vector<double> hi,
                                     std::vector<double> lo) {
    if (scale <= 0.0) throw ConfigError("square wave scale must be > 0");
    if (hi.size() != lo.size()) throw ConfigError("square wave levels must match in size");
    return [=](double t, std::vector<double>& out) {
        const auto phase =
            static_cast<long long>(std::floor(std::sqrt(std::max(t, 0.0)) / scale));
        out = (phase % 2 == 0) ? hi : lo;
    };
}

namespace {

void eval_stream(const PayoffStream& stream, double t, double cap,
                 std::vector<double>& v) {
    stream(t, v);
    for (double u : v)
        if (!std::isfinite(u) || std::abs(u) > cap)
            throw SimulationError("payoff stream value exceeds the declared cap");
}

}  // namespace

void step_unilateral(const PayoffStream& stream, const PenaltyKernel& /*kernel*/,
                     const LearningSchedule& /*schedule*/, const std::vector<double>& sigma,
                     std::vector<double>& y, double t, double dt,
                     const TrajectoryRng& rng, std::uint64_t step, double stream_cap) {
    // The kernel and schedule only enter through X = Q(eta Y), which callers
    // re-derive; the score update itself is kernel-free.
    std::vector<double> v;
    eval_stream(stream, t, stream_cap, v);
    if (v.size() != y.size()) throw ConfigError("payoff stream dimension mismatch");
    const double root_dt = std::sqrt(dt);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double s = i < sigma.size() ? sigma[i] : 0.0;
        y[i] += v[i] * dt + s * root_dt * rng.normal(step, static_cast<std::uint32_t>(i));
    }
    require_finite_state(y);
}

Trajectory simulate_unilateral(const PayoffStream& stream, const PenaltyKernel& kernel,
                               const LearningSchedule& schedule,
                               const std::vector<double>& sigma,
                               const std::vector<double>& y0, const SimOptions& opts) {
    if (opts.dt <= 0.0) throw ConfigError("integration step must be > 0");
    if (opts.thin < 1) throw ConfigError("storage thinning must be >= 1");
    const auto n_steps = static_cast<std::uint64_t>(std::llround(opts.horizon / opts.dt));
    if (n_steps > opts.max_steps) throw SimulationError("step budget exceeded");
    if (n_steps % opts.thin != 0)
        throw ConfigError("horizon/dt must be a multiple of the thinning stride");

    std::vector<double> probe;
    eval_stream(stream, 0.0, opts.stream_cap, probe);
    const int dim = static_cast<int>(probe.size());
    std::vector<double> y = y0.empty() ? std::vector<double>(dim, 0.0) : y0;
    if (static_cast<int>(y.size()) != dim)
        throw ConfigError("initial score vector has wrong dimension");

    Trajectory traj;
    traj.n_coords = dim;
    traj.actions_per_player = {dim};
    traj.dt = opts.dt;
    traj.thin = opts.thin;
    traj.seed = opts.seed;
    traj.trajectory_index = opts.trajectory_index;
    traj.meta = "unilateral; kernel=" + kernel.name() + "; schedule=" + schedule.describe();

    const TrajectoryRng rng{opts.seed, opts.trajectory_index};
    std::vector<double> yk, xk;
    const auto store = [&](std::uint64_t step) {
        const double t = static_cast<double>(step) * opts.dt;
        yk = y;
        const double eta = schedule.eta(t);
        for (double& u : yk) u *= eta;
        choice_map(kernel, yk, xk);
        traj.times.push_back(t);
        traj.scores.insert(traj.scores.end(), y.begin(), y.end());
        traj.strategies.insert(traj.strategies.end(), xk.begin(), xk.end());
    };

    store(0);
    std::vector<double> v;
    const double root_dt = std::sqrt(opts.dt);
    for (std::uint64_t step = 0; step < n_steps; ++step) {
        const double t = static_cast<double>(step) * opts.dt;
        eval_stream(stream, t, opts.stream_cap, v);
        for (int i = 0; i < dim; ++i) {
            const double s = i < static_cast<int>(sigma.size()) ? sigma[i] : 0.0;
            y[i] += v[i] * opts.dt +
                    s * root_dt * rng.normal(step, static_cast<std::uint32_t>(i));
        }
        require_finite_state(y);
        if ((step + 1) % opts.thin == 0) store(step + 1);
    }
    return traj;
}

std::vector<double> DriftTerms::total_drift() const {
    std::vector<double> total(payoff.size());
    for (std::size_t i = 0; i < total.size(); ++i)
        total[i] = payoff[i] + rate[i] + ito[i];
    return total;
}

DriftTerms drift_terms(const SrlSystem& system, const MixedProfile& x, double t) {
    const Game& game = *system.game;
    game.require_profile_shape(x);
    if (system.noise.mode() == NoiseModel::Mode::Correlated)
        throw ConfigError("drift decomposition assumes per-coordinate independent noise");

    const int dim = game.total_coords();
    DriftTerms out;
    out.payoff.assign(dim, 0.0);
    out.rate.assign(dim, 0.0);
    out.ito.assign(dim, 0.0);
    out.diffusion_sq.assign(dim, 0.0);

    const std::vector<double> x_flat = flatten(game, x);
    std::vector<double> v_flat;
    game.payoff_vectors_flat(x_flat, v_flat);

    for (int k = 0; k < game.players(); ++k) {
        const PenaltyKernel& kernel = system.kernels[k];
        const int off = game.coord_offset(k);
        const int n = game.num_actions(k);
        const double eta = system.schedules[k].eta(t);
        const double eta_dot = system.schedules[k].eta_dot(t);

        std::vector<int> support;
        for (int a = 0; a < n; ++a) {
            if (x[k][a] > 0.0) {
                support.push_back(a);
            } else if (kernel.steep()) {
                throw ConfigError(
                    "drift decomposition needs an interior state for steep kernels");
            }
        }

        std::vector<double> w(n, 0.0), d1(n, 0.0), d3(n, 0.0), sig2(n, 0.0);
        double wsum = 0.0;
        for (int a : support) {
            const double z = x[k][a];
            w[a] = 1.0 / kernel.theta_d2(z);
            d1[a] = kernel.theta_d1(z);
            d3[a] = kernel.theta_d3(z);
            const double s = system.noise.sigma_at(off + a, x_flat);
            sig2[a] = s * s;
            wsum += w[a];
        }
        const double agg = 1.0 / wsum;  // T''

        double wv = 0.0, wd1 = 0.0;
        for (int a : support) {
            wv += w[a] * v_flat[off + a];
            wd1 += w[a] * d1[a];
        }
        for (int a : support) {
            out.payoff[off + a] = eta * w[a] * (v_flat[off + a] - agg * wv);
            out.rate[off + a] = (eta_dot / eta) * w[a] * (d1[a] - agg * wd1);
            double u2 = sig2[a] * (1.0 - agg * w[a]) * (1.0 - agg * w[a]);
            for (int b : support) {
                if (b == a) continue;
                u2 += agg * w[b] * agg * w[b] * sig2[b];
            }
            out.diffusion_sq[off + a] = eta * w[a] * eta * w[a] * u2;
        }
        double wd3u = 0.0;
        for (int b : support) wd3u += w[b] * d3[b] * out.diffusion_sq[off + b];
        for (int a : support)
            out.ito[off + a] =
                -0.5 * w[a] * (d3[a] * out.diffusion_sq[off + a] - agg * wd3u);
    }
    return out;
}

void step_asrd(const Game& game, std::vector<double>& x_flat,
               const std::vector<double>& sigma, double dt,
               const TrajectoryRng& rng, std::uint64_t step) {
    if (static_cast<int>(x_flat.size()) != game.total_coords())
        throw ConfigError("flat strategy vector has wrong dimension");
    for (double v : x_flat)
        if (v <= 0.0)
            throw ConfigError("aggregate-shocks step needs an interior state");

    std::vector<double> v_flat;
    game.payoff_vectors_flat(x_flat, v_flat);
    const double root_dt = std::sqrt(dt);
    std::vector<double> next(x_flat.size());

    for (int k = 0; k < game.players(); ++k) {
        const int off = game.coord_offset(k);
        const int n = game.num_actions(k);
        double mean_v = 0.0, ito_mean = 0.0, noise_mean = 0.0;
        for (int a = 0; a < n; ++a) {
            const double xa = x_flat[off + a];
            const double s = sigma[off + a];
            mean_v += xa * v_flat[off + a];
            ito_mean += s * s * xa * xa;
            noise_mean += s * xa * root_dt * rng.normal(step, off + a);
        }
        for (int a = 0; a < n; ++a) {
            const double xa = x_flat[off + a];
            const double s = sigma[off + a];
            const double drift =
                xa * (v_flat[off + a] - mean_v) - xa * (s * s * xa - ito_mean);
            const double diff = xa * (s * root_dt * rng.normal(step, off + a) - noise_mean);
            next[off + a] = xa + drift * dt + diff;
        }
        // Clamp and renormalize the simplex block.
        double sum = 0.0;
        for (int a = 0; a < n; ++a) {
            if (next[off + a] < 0.0) next[off + a] = 0.0;
            sum += next[off + a];
        }
        if (sum <= 0.0) throw SimulationError("aggregate-shocks step collapsed a simplex block");
        for (int a = 0; a < n; ++a) next[off + a] /= sum;
    }
    x_flat = std::move(next);
}

int best_response_pure(const Game& game, const MixedProfile& x, int player) {
    const std::vector<double> v = game.payoff_vector(player, x);
    int best = 0;
    for (int a = 1; a < game.num_actions(player); ++a)
        if (v[a] > v[best]) best = a;  // ties keep the lowest index
    return best;
}

MixedProfile step_brd(const Game& game, const MixedProfile& x, double dt,
                      ActionProfile* chosen) {
    game.require_profile_shape(x);
    MixedProfile next = x;
    if (chosen) chosen->assign(game.players(), 0);
    for (int k = 0; k < game.players(); ++k) {
        const int b = best_response_pure(game, x, k);
        if (chosen) (*chosen)[k] = b;
        for (int a = 0; a < game.num_actions(k); ++a) {
            const double target = (a == b) ? 1.0 : 0.0;
            next[k][a] = x[k][a] + dt * (target - x[k][a]);
        }
    }
    return next;
}

}  // namespace srl
