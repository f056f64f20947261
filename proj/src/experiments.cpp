#include "srl/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "srl/ensemble.hpp"
#include "srl/errors.hpp"

namespace srl {

namespace {

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::size_t index_of_time(const std::vector<double>& times, double t) {
    for (std::size_t i = 0; i < times.size(); ++i)
        if (std::abs(times[i] - t) <= 1e-9 * std::max(1.0, std::abs(t))) return i;
    throw ConfigError("tracked time " + std::to_string(t) + " is not on the stored grid");
}

}  // namespace

std::vector<CheckResult> adversarial_regret_check(const AdversarialRegretParams& p) {
    const PenaltyKernel kernel = PenaltyKernel::entropy();
    const PayoffStream stream =
        sqrt_square_wave_stream(p.wave_scale, {1.0, 0.0}, {0.0, 1.0});
    const std::vector<double> sigma(2, p.sigma);

    RegretBoundParams bound_params;
    bound_params.omega = kernel.omega(2);
    bound_params.strong_convexity = kernel.strong_convexity();
    bound_params.sigma_max = p.sigma;
    bound_params.n_actions = 2;
    bound_params.schedule = p.schedule;
    bound_params.lil_constant = p.lil_constant;

    SimOptions opts;
    opts.dt = p.dt;
    opts.horizon = p.horizon;
    opts.thin = p.thin;
    opts.seed = p.seed;

    // Bound evaluated once; the stored grid is identical across runs.
    std::vector<double> grid_bound;
    std::vector<double> grid_times;
    {
        const auto n_stored = static_cast<std::size_t>(
            std::llround(p.horizon / p.dt)) / p.thin + 1;
        grid_times.resize(n_stored);
        grid_bound.resize(n_stored);
        for (std::size_t i = 0; i < n_stored; ++i) {
            grid_times[i] = static_cast<double>(i) * p.dt * p.thin;
            grid_bound[i] = regret_bound(bound_params, grid_times[i]);
        }
    }

    std::vector<std::vector<double>> regret_all(p.n_runs);
    std::vector<char> within(p.n_runs, 0);
    parallel_runs(p.n_runs, p.workers, [&](int run) {
        SimOptions o = opts;
        o.trajectory_index = static_cast<std::uint64_t>(run);
        const Trajectory traj = simulate_unilateral(
            stream, kernel, p.schedule, sigma, {}, o);
        RegretSeries series = cumulative_regret(traj, stream);
        bool ok = true;
        for (std::size_t i = 0; i < series.times.size(); ++i) {
            const double t = series.times[i];
            if (t < p.window_lo || t > p.window_hi) continue;
            if (series.regret[i] > grid_bound[i]) {
                ok = false;
                break;
            }
        }
        within[run] = ok ? 1 : 0;
        regret_all[run] = std::move(series.regret);
    });

    std::vector<CheckResult> out;

    {
        const int hits = static_cast<int>(std::count(within.begin(), within.end(), 1));
        const BinomialCi ci = binomial_ci_95(hits, p.n_runs);
        CheckResult r;
        r.check_id = p.id_prefix + "/bound-fraction";
        r.statistic = ci.phat;
        r.bound = p.min_fraction;
        r.n_runs = p.n_runs;
        r.ci_half_width = ci.half_width;
        r.passed = ci.phat >= p.min_fraction;
        r.details = {{"lil_constant", p.lil_constant},
                     {"window_lo", p.window_lo},
                     {"window_hi", p.window_hi}};
        out.push_back(std::move(r));
    }

    {
        std::vector<double> medians(grid_times.size());
        std::vector<double> column(p.n_runs);
        for (std::size_t i = 0; i < grid_times.size(); ++i) {
            for (int run = 0; run < p.n_runs; ++run) column[run] = regret_all[run][i];
            medians[i] = median_of(column);
        }
        const double slope =
            loglog_slope(grid_times, medians, p.horizon / 10.0, p.horizon);
        CheckResult r;
        r.check_id = p.id_prefix + "/slope";
        r.statistic = slope;
        r.bound = p.slope_hi;
        r.n_runs = p.n_runs;
        r.passed = slope >= p.slope_lo && slope <= p.slope_hi;
        r.details = {{"slope_lo", p.slope_lo}, {"slope_hi", p.slope_hi}};
        r.series_columns = {"t", "median_regret", "bound"};
        r.series_values.reserve(grid_times.size() * 3);
        for (std::size_t i = 0; i < grid_times.size(); ++i) {
            r.series_values.push_back(grid_times[i]);
            r.series_values.push_back(medians[i]);
            r.series_values.push_back(grid_bound[i]);
        }
        out.push_back(std::move(r));
    }

    {
        // sigma = 0, constant eta: Reg(t) <= Omega / eta for every t.
        SimOptions o;
        o.dt = p.det_dt;
        o.horizon = p.det_horizon;
        o.thin = p.det_thin;
        o.seed = p.seed;
        const LearningSchedule det = LearningSchedule::constant(p.det_eta);
        const Trajectory traj =
            simulate_unilateral(stream, kernel, det, {0.0, 0.0}, {}, o);
        const RegretSeries series = cumulative_regret(traj, stream);
        const double cap = kernel.omega(2) / p.det_eta;
        double worst = -std::numeric_limits<double>::infinity();
        for (double reg : series.regret) worst = std::max(worst, reg - cap);
        CheckResult r;
        r.check_id = p.id_prefix + "/noiseless";
        r.statistic = worst;
        r.bound = 0.0;
        r.n_runs = 1;
        r.passed = worst <= 0.0;
        r.details = {{"cap", cap}, {"eta", p.det_eta}};
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<CheckResult> extinction_check(const ExtinctionParams& p) {
    const auto [margin, degenerate] =
        dominance_margin(p.game, p.player, p.dominated, p.dominating);
    if (degenerate || margin <= 0.0)
        throw ConfigError("extinction check needs a strictly dominated action");

    SrlSystem system;
    system.game = &p.game;
    system.kernels.assign(p.game.players(), p.kernel);
    system.schedules.assign(p.game.players(), p.schedule);
    system.noise = p.noise;
    system.validate();

    const int coord_dom = p.game.coord_offset(p.player) + p.dominated;
    const int coord_top = p.game.coord_offset(p.player) + p.dominating;
    const double sigma_ab = std::sqrt(p.noise.pair_sigma_sq(coord_dom, coord_top));
    const double c0 = extinction_constant(p.kernel, p.schedule, 0.0, 0.0);

    SimOptions opts;
    opts.dt = p.dt;
    opts.horizon = p.horizon;
    opts.thin = p.thin;
    opts.seed = p.seed;

    const auto n_stored =
        static_cast<std::size_t>(std::llround(p.horizon / p.dt)) / p.thin + 1;
    std::vector<double> grid_times(n_stored);
    for (std::size_t i = 0; i < n_stored; ++i)
        grid_times[i] = static_cast<double>(i) * p.dt * p.thin;

    std::vector<double> envelope(n_stored, 1.0);
    if (p.check_envelope) {
        for (std::size_t i = 0; i < n_stored; ++i)
            envelope[i] = extinction_envelope(p.kernel, margin, sigma_ab, c0,
                                              p.schedule, p.envelope_eps, grid_times[i]);
    }
    std::vector<std::size_t> exceed_idx;
    for (double t : p.exceedance_times) exceed_idx.push_back(index_of_time(grid_times, t));

    std::vector<char> envelope_ok(std::min(p.envelope_runs, p.tail_runs), 1);
    std::vector<std::vector<char>> exceed(exceed_idx.size(),
                                          std::vector<char>(p.tail_runs, 0));
    std::vector<std::vector<double>> xdom_all(p.tail_runs);
    parallel_runs(p.tail_runs, p.workers, [&](int run) {
        SimOptions o = opts;
        o.trajectory_index = static_cast<std::uint64_t>(run);
        const Trajectory traj = simulate(system, {}, o);
        std::vector<double> xdom(traj.size());
        for (std::size_t i = 0; i < traj.size(); ++i)
            xdom[i] = traj.strategy(i, p.player, p.dominated);
        if (p.check_envelope && run < static_cast<int>(envelope_ok.size())) {
            for (std::size_t i = 0; i < traj.size(); ++i) {
                if (traj.times[i] < p.envelope_t_floor) continue;
                if (xdom[i] > envelope[i]) {
                    envelope_ok[run] = 0;
                    break;
                }
            }
        }
        for (std::size_t e = 0; e < exceed_idx.size(); ++e)
            exceed[e][run] = xdom[exceed_idx[e]] > p.delta ? 1 : 0;
        xdom_all[run] = std::move(xdom);
    });

    std::vector<double> xdom_median(n_stored);
    {
        std::vector<double> column(p.tail_runs);
        for (std::size_t i = 0; i < n_stored; ++i) {
            for (int run = 0; run < p.tail_runs; ++run) column[run] = xdom_all[run][i];
            xdom_median[i] = median_of(column);
        }
    }

    std::vector<CheckResult> out;
    if (p.check_envelope) {
        const int n = static_cast<int>(envelope_ok.size());
        const int hits = static_cast<int>(std::count(envelope_ok.begin(), envelope_ok.end(), 1));
        const BinomialCi ci = binomial_ci_95(hits, n);
        CheckResult r;
        r.check_id = p.id_prefix + "/envelope";
        r.statistic = ci.phat;
        r.bound = p.envelope_min_fraction;
        r.n_runs = n;
        r.ci_half_width = ci.half_width;
        r.passed = ci.phat >= p.envelope_min_fraction;
        r.details = {{"eps", p.envelope_eps},
                     {"t_floor", p.envelope_t_floor},
                     {"margin", margin},
                     {"sigma_ab", sigma_ab}};
        out.push_back(std::move(r));
    }

    for (std::size_t e = 0; e < exceed_idx.size(); ++e) {
        const double t = p.exceedance_times[e];
        const int hits =
            static_cast<int>(std::count(exceed[e].begin(), exceed[e].end(), 1));
        const BinomialCi ci = binomial_ci_95(hits, p.tail_runs);
        const double bound =
            exceedance_bound(p.kernel, margin, sigma_ab, c0, p.schedule, p.delta, t);
        CheckResult r;
        r.check_id = p.id_prefix + "/exceedance-t" + std::to_string(static_cast<int>(t));
        r.statistic = ci.phat;
        r.bound = bound + ci.half_width;
        r.n_runs = p.tail_runs;
        r.ci_half_width = ci.half_width;
        r.passed = ci.phat <= bound + ci.half_width;
        r.details = {{"time", t}, {"delta", p.delta}, {"erfc_bound", bound}};
        out.push_back(std::move(r));
    }

    {
        // First-passage ensemble at a finer step: crossings are detected on
        // the integration grid itself.
        const auto n_steps =
            static_cast<std::uint64_t>(std::llround(p.hitting_horizon / p.hitting_dt));
        std::vector<double> taus(p.hitting_runs, -1.0);
        parallel_runs(p.hitting_runs, p.workers, [&](int run) {
            SrlStepper stepper(system);
            const TrajectoryRng rng{p.seed + 1, static_cast<std::uint64_t>(run)};
            std::vector<double> y(p.game.total_coords(), 0.0);
            std::vector<double> x;
            for (std::uint64_t step = 0; step <= n_steps; ++step) {
                const double t = static_cast<double>(step) * p.hitting_dt;
                stepper.strategies(y, t, x);
                if (x[coord_dom] <= p.delta) {
                    taus[run] = t;
                    return;
                }
                if (step < n_steps) stepper.step(y, t, p.hitting_dt, rng, step);
            }
        });
        int censored = 0;
        double sum = 0.0;
        int n_hit = 0;
        for (double tau : taus) {
            if (tau < 0.0) {
                ++censored;
            } else {
                sum += tau;
                ++n_hit;
            }
        }
        const double eta0 = p.schedule.eta(0.0);
        const double bound = hitting_time_bound(p.kernel, margin, eta0, p.delta, c0);
        CheckResult r;
        r.check_id = p.id_prefix + "/hitting-time";
        r.statistic = n_hit > 0 ? sum / n_hit : std::numeric_limits<double>::infinity();
        r.bound = bound;
        r.n_runs = p.hitting_runs;
        r.passed = censored == 0 && r.statistic <= bound;
        r.details = {{"delta", p.delta},
                     {"censored", static_cast<double>(censored)},
                     {"dt", p.hitting_dt}};
        out.push_back(std::move(r));
    }

    // Per-time summary rides on the first result of the group.
    if (!out.empty()) {
        auto& r = out.front();
        r.series_columns = {"t", "median_x_dominated", "envelope"};
        r.series_values.reserve(n_stored * 3);
        for (std::size_t i = 0; i < n_stored; ++i) {
            r.series_values.push_back(grid_times[i]);
            r.series_values.push_back(xdom_median[i]);
            r.series_values.push_back(p.check_envelope ? envelope[i] : 1.0);
        }
    }
    return out;
}

double stability_neighborhood_m(const StabilityParams& p) {
    if (p.neighborhood_m > 0.0) return p.neighborhood_m;
    return p.eta * p.sigma * p.sigma *
           std::log(static_cast<double>(p.game.players()) / p.eps) / p.margin;
}

std::vector<CheckResult> stability_check(const StabilityParams& p) {
    if (!is_strict_nash(p.game, p.equilibrium))
        throw ConfigError("stability check: profile is not a strict equilibrium");

    SrlSystem system;
    system.game = &p.game;
    system.kernels.assign(p.game.players(), PenaltyKernel::entropy());
    system.schedules.assign(p.game.players(), LearningSchedule::constant(p.eta));
    system.noise = NoiseModel::diagonal_uniform(p.sigma, p.game.total_coords());
    system.validate();

    const double m_level = stability_neighborhood_m(p);

    std::vector<double> y0(p.game.total_coords(), 0.0);
    for (int k = 0; k < p.game.players(); ++k) {
        const int off = p.game.coord_offset(k);
        for (int a = 0; a < p.game.num_actions(k); ++a)
            if (a != p.equilibrium[k]) y0[off + a] = -2.0 * m_level / p.eta;
    }

    SimOptions opts;
    opts.dt = p.dt;
    opts.horizon = p.horizon;
    opts.thin = p.thin;
    opts.seed = p.seed;

    std::vector<char> escaped(p.n_runs, 0);
    std::vector<char> converged(p.n_runs, 0);
    std::vector<std::size_t> escape_index(p.n_runs, 0);  // stored index of first escape
    const auto n_stored =
        static_cast<std::size_t>(std::llround(p.horizon / p.dt)) / p.thin + 1;
    parallel_runs(p.n_runs, p.workers, [&](int run) {
        SimOptions o = opts;
        o.trajectory_index = static_cast<std::uint64_t>(run);
        const Trajectory traj = simulate(system, y0, o);
        bool esc = false;
        std::size_t esc_at = traj.size();
        for (std::size_t i = 0; i < traj.size() && !esc; ++i) {
            for (int k = 0; k < p.game.players() && !esc; ++k) {
                const double y_star = traj.score(i, k, p.equilibrium[k]);
                for (int a = 0; a < p.game.num_actions(k); ++a) {
                    if (a == p.equilibrium[k]) continue;
                    if (p.eta * (traj.score(i, k, a) - y_star) > -m_level) {
                        esc = true;
                        esc_at = i;
                        break;
                    }
                }
            }
        }
        escaped[run] = esc ? 1 : 0;
        escape_index[run] = esc_at;
        double sup = 0.0;
        const std::size_t last = traj.size() - 1;
        for (int k = 0; k < p.game.players(); ++k)
            for (int a = 0; a < p.game.num_actions(k); ++a) {
                const double target = a == p.equilibrium[k] ? 1.0 : 0.0;
                sup = std::max(sup, std::abs(traj.strategy(last, k, a) - target));
            }
        converged[run] = sup <= p.convergence_tol ? 1 : 0;
    });

    std::vector<CheckResult> out;
    {
        const int hits = static_cast<int>(std::count(escaped.begin(), escaped.end(), 1));
        const BinomialCi ci = binomial_ci_95(hits, p.n_runs);
        CheckResult r;
        r.check_id = p.id_prefix + "/escape-fraction";
        r.statistic = ci.upper;  // binomial 95% upper bound
        r.bound = p.eps;
        r.n_runs = p.n_runs;
        r.ci_half_width = ci.half_width;
        r.passed = ci.upper <= p.eps;
        r.details = {{"m_level", m_level},
                     {"escape_phat", ci.phat},
                     {"margin", p.margin}};
        // Cumulative escaped fraction over time.
        r.series_columns = {"t", "fraction_escaped_by_t"};
        r.series_values.reserve(n_stored * 2);
        for (std::size_t i = 0; i < n_stored; ++i) {
            int count = 0;
            for (int run = 0; run < p.n_runs; ++run)
                if (escape_index[run] <= i) ++count;
            r.series_values.push_back(static_cast<double>(i) * p.dt * p.thin);
            r.series_values.push_back(static_cast<double>(count) / p.n_runs);
        }
        out.push_back(std::move(r));
    }
    {
        const int hits = static_cast<int>(std::count(converged.begin(), converged.end(), 1));
        const BinomialCi ci = binomial_ci_95(hits, p.n_runs);
        CheckResult r;
        r.check_id = p.id_prefix + "/converged-fraction";
        r.statistic = ci.phat;
        r.bound = p.min_converged_fraction;
        r.n_runs = p.n_runs;
        r.ci_half_width = ci.half_width;
        r.passed = ci.phat >= p.min_converged_fraction;
        r.details = {{"tol", p.convergence_tol}};
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<CheckResult> time_average_check(const TimeAverageParams& p) {
    SrlSystem system;
    system.game = &p.game;
    system.kernels.assign(p.game.players(), p.kernel);
    system.schedules.assign(p.game.players(), p.schedule);
    system.noise = NoiseModel::diagonal_uniform(p.sigma, p.game.total_coords());
    system.validate();

    SimOptions opts;
    opts.dt = p.dt;
    opts.horizon = p.horizon;
    opts.thin = p.thin;
    opts.seed = p.seed;

    std::vector<double> sup_dist(p.n_runs, 0.0);
    std::vector<double> gap_early(p.n_runs, 0.0), gap_late(p.n_runs, 0.0);
    std::vector<std::vector<double>> gap_all(p.n_runs);
    std::vector<double> grid_times;
    parallel_runs(p.n_runs, p.workers, [&](int run) {
        SimOptions o = opts;
        o.trajectory_index = static_cast<std::uint64_t>(run);
        const Trajectory traj = simulate(system, {}, o);
        const TimeAverageSeries avg = time_average(traj);
        const std::size_t last = avg.times.size() - 1;
        const std::size_t early = index_of_time(avg.times, p.gap_early_time);
        if (run == 0) grid_times = avg.times;

        double sup = 0.0;
        const auto row = avg.at(last);
        for (int k = 0; k < p.game.players(); ++k) {
            const int off = p.game.coord_offset(k);
            const double uniform = 1.0 / p.game.num_actions(k);
            for (int a = 0; a < p.game.num_actions(k); ++a)
                sup = std::max(sup, std::abs(row[off + a] - uniform));
        }
        sup_dist[run] = sup;

        gap_all[run] = nash_gap_series(p.game, avg);
        gap_early[run] = gap_all[run][early];
        gap_late[run] = gap_all[run][last];
    });

    std::vector<double> gap_median(grid_times.size());
    {
        std::vector<double> column(p.n_runs);
        for (std::size_t i = 0; i < grid_times.size(); ++i) {
            for (int run = 0; run < p.n_runs; ++run) column[run] = gap_all[run][i];
            gap_median[i] = median_of(column);
        }
    }

    std::vector<CheckResult> out;
    {
        int hits = 0;
        for (double d : sup_dist)
            if (d <= p.sup_tol) ++hits;
        const BinomialCi ci = binomial_ci_95(hits, p.n_runs);
        CheckResult r;
        r.check_id = p.id_prefix + "/sup-distance";
        r.statistic = ci.phat;
        r.bound = p.min_fraction;
        r.n_runs = p.n_runs;
        r.ci_half_width = ci.half_width;
        r.passed = ci.phat >= p.min_fraction;
        r.details = {{"tol", p.sup_tol}};
        out.push_back(std::move(r));
    }
    {
        const double early_med = median_of(gap_early);
        const double late_med = median_of(gap_late);
        CheckResult r;
        r.check_id = p.id_prefix + "/gap-halving";
        r.statistic = late_med;
        r.bound = 0.5 * early_med;
        r.n_runs = p.n_runs;
        r.passed = late_med < 0.5 * early_med;
        r.details = {{"gap_early_median", early_med},
                     {"gap_early_time", p.gap_early_time}};
        r.series_columns = {"t", "median_nash_gap_of_average"};
        r.series_values.reserve(grid_times.size() * 2);
        for (std::size_t i = 0; i < grid_times.size(); ++i) {
            r.series_values.push_back(grid_times[i]);
            r.series_values.push_back(gap_median[i]);
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<CheckResult> covariance_check(const CovarianceParams& p) {
    const CongestionGame cg = build_congestion_game(p.network);
    const int dim = cg.dim;

    SrlSystem system;
    system.game = &cg.game;
    system.kernels.assign(cg.game.players(), PenaltyKernel::entropy());
    system.schedules.assign(cg.game.players(), LearningSchedule::constant(p.eta));
    system.noise = NoiseModel::correlated(cg.covariance, dim);
    system.validate();

    SrlStepper stepper(system);
    const TrajectoryRng rng{p.seed, 0};
    std::vector<double> y(dim, 0.0), x, v, incr;
    std::vector<double> acc(static_cast<std::size_t>(dim) * dim, 0.0);
    for (long long step = 0; step < p.n_steps; ++step) {
        const double t = static_cast<double>(step) * p.dt;
        stepper.strategies(y, t, x);
        cg.game.payoff_vectors_flat(x, v);
        system.noise.sample_increment(x, p.dt, rng, static_cast<std::uint64_t>(step), incr);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) acc[i * dim + j] += incr[i] * incr[j];
        for (int i = 0; i < dim; ++i) y[i] += v[i] * p.dt + incr[i];
    }

    double worst = 0.0;
    const auto n = static_cast<double>(p.n_steps);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            const double target = cg.covariance_at(i, j) * p.dt;
            const double emp = acc[i * dim + j] / n;
            const double var = cg.covariance_at(i, i) * cg.covariance_at(j, j) +
                               cg.covariance_at(i, j) * cg.covariance_at(i, j);
            const double se = p.dt * std::sqrt(var / n);
            worst = std::max(worst, std::abs(emp - target) / se);
        }

    CheckResult r;
    r.check_id = p.id_prefix + "/increment-covariance";
    r.statistic = worst;  // worst entry deviation in standard errors
    r.bound = p.tol_se;
    r.n_runs = static_cast<int>(std::min<long long>(p.n_steps, 1'000'000'000));
    r.passed = worst <= p.tol_se;
    r.details = {{"dim", static_cast<double>(dim)}, {"dt", p.dt}};
    r.series_columns = {"row", "col", "covariance", "empirical_rate", "deviation_se"};
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            const double target = cg.covariance_at(i, j);
            const double emp = acc[i * dim + j] / n / p.dt;
            const double var = cg.covariance_at(i, i) * cg.covariance_at(j, j) +
                               target * target;
            const double se = std::sqrt(var / n);
            r.series_values.push_back(static_cast<double>(i));
            r.series_values.push_back(static_cast<double>(j));
            r.series_values.push_back(target);
            r.series_values.push_back(emp);
            r.series_values.push_back(std::abs(emp - target) / se);
        }
    return {r};
}

}  // namespace srl
