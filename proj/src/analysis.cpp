#include "srl/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "srl/errors.hpp"

namespace srl {

double lil_envelope(double t) {
    if (t <= 2.718281828459045) return 0.0;
    const double ll = std::log(std::log(t));
    return ll > 0.0 ? std::sqrt(t * ll) : 0.0;
}

RegretSeries cumulative_regret(const Trajectory& traj, const PayoffStream& stream) {
    if (traj.times.empty()) throw ConfigError("cumulative_regret: empty trajectory");
    const int n = traj.n_coords;
    RegretSeries out;
    out.times = traj.times;
    out.regret.resize(traj.size());
    out.regret[0] = 0.0;

    // Trapezoid per interval. Streams are right-continuous with jumps (square
    // waves switch exactly on grid nodes), so the right endpoint is sampled
    // as a left limit; otherwise every interval ending on a switch would mix
    // the two segment values and bias the integrals.
    std::vector<double> action_integral(n, 0.0);
    double policy_integral = 0.0;
    std::vector<double> v_left(n), v_right(n);

    stream(traj.times[0], v_left);
    if (static_cast<int>(v_left.size()) != n)
        throw ConfigError("cumulative_regret: stream dimension mismatch");

    for (std::size_t s = 1; s < traj.size(); ++s) {
        const double h = traj.times[s] - traj.times[s - 1];
        stream(traj.times[s] - 1e-9 * h, v_right);
        const auto x_left = traj.strategies_at(s - 1);
        const auto x_right = traj.strategies_at(s);
        double g_left = 0.0, g_right = 0.0;
        for (int i = 0; i < n; ++i) {
            g_left += v_left[i] * x_left[i];
            g_right += v_right[i] * x_right[i];
            action_integral[i] += 0.5 * h * (v_left[i] + v_right[i]);
        }
        policy_integral += 0.5 * h * (g_left + g_right);
        const double best =
            *std::max_element(action_integral.begin(), action_integral.end());
        out.regret[s] = best - policy_integral;
        stream(traj.times[s], v_left);
    }
    return out;
}

double regret_bound(const RegretBoundParams& p, double t) {
    if (p.sigma_max > 0.0 && !p.schedule.vanishing())
        throw ConfigError(
            "regret bound needs a vanishing schedule (gamma > 0) under noise; "
            "with constant eta the noise term grows linearly in t");
    const double term_penalty = p.omega / p.schedule.eta(t);
    const double term_noise = p.sigma_max * p.sigma_max * p.n_actions /
                              (2.0 * p.strong_convexity) * p.schedule.eta_integral(t);
    const double term_lil = p.lil_constant * p.sigma_max * lil_envelope(t);
    return term_penalty + term_noise + term_lil;
}

void attach_regret_bound(RegretSeries& series, const RegretBoundParams& p) {
    if (p.sigma_max > 0.0 && !p.schedule.vanishing())
        throw ConfigError(
            "regret bound needs a vanishing schedule (gamma > 0) under noise; "
            "with constant eta the noise term grows linearly in t");
    const std::size_t m = series.times.size();
    series.bound.resize(m);
    series.term_penalty.resize(m);
    series.term_noise.resize(m);
    series.term_lil.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double t = series.times[i];
        series.term_penalty[i] = p.omega / p.schedule.eta(t);
        series.term_noise[i] = p.sigma_max * p.sigma_max * p.n_actions /
                               (2.0 * p.strong_convexity) * p.schedule.eta_integral(t);
        series.term_lil[i] = p.lil_constant * p.sigma_max * lil_envelope(t);
        series.bound[i] = series.term_penalty[i] + series.term_noise[i] + series.term_lil[i];
    }
}

double extinction_constant(const PenaltyKernel& kernel, const LearningSchedule& schedule,
                           double y0_a, double y0_b) {
    return kernel.theta_d1(1.0) + schedule.eta(0.0) * std::abs(y0_a - y0_b);
}

double extinction_envelope(const PenaltyKernel& kernel, double m, double sigma_ab,
                           double c, const LearningSchedule& schedule, double eps,
                           double t) {
    if (!kernel.steep())
        throw ConfigError("extinction envelope requires a steep kernel (theta' -> -inf)");
    if (m <= 0.0) throw ConfigError("extinction envelope needs a positive margin");
    const double arg =
        c - schedule.eta(t) * (m * t - 2.0 * (1.0 + eps) * sigma_ab * lil_envelope(t));
    return kernel.phi(arg);
}

double exceedance_bound(const PenaltyKernel& kernel, double m, double sigma_ab,
                        double c, const LearningSchedule& schedule, double delta,
                        double t) {
    if (m <= 0.0) throw ConfigError("exceedance bound needs a positive margin");
    if (delta <= 0.0 || delta >= 1.0)
        throw ConfigError("exceedance bound needs delta in (0, 1)");
    if (sigma_ab <= 0.0) throw ConfigError("exceedance bound needs sigma_ab > 0");
    const double offset = c - kernel.theta_d1(delta);
    if (t <= 0.0 || m * t * schedule.eta(t) < offset) return 1.0;
    const double rt = std::sqrt(t);
    const double z = (m * rt - offset / (schedule.eta(t) * rt)) / (2.0 * sigma_ab);
    return 0.5 * std::erfc(z);
}

double hitting_time_bound(const PenaltyKernel& kernel, double m, double eta,
                          double delta, double c) {
    if (m <= 0.0) throw ConfigError("hitting time bound needs a positive margin");
    const double num = std::max(0.0, c - kernel.theta_d1(delta));
    return num / (eta * m);
}

std::optional<double> first_passage_time(const Trajectory& traj, int player, int action,
                                         double delta) {
    for (std::size_t i = 0; i < traj.size(); ++i)
        if (traj.strategy(i, player, action) <= delta) return traj.times[i];
    return std::nullopt;
}

void HittingTimeAccumulator::add(const Trajectory& traj) {
    if (const auto t = first_passage_time(traj, player_, action_, delta_))
        times_.push_back(*t);
    else
        ++censored_;
}

HittingTimeEstimate HittingTimeAccumulator::finalize() const {
    HittingTimeEstimate est;
    est.n_runs = static_cast<int>(times_.size()) + censored_;
    est.censored = censored_;
    est.times = times_;
    if (!times_.empty()) {
        double sum = 0.0;
        for (double t : times_) sum += t;
        est.mean_uncensored = sum / static_cast<double>(times_.size());
    }
    return est;
}

HittingTimeEstimate estimate_hitting_time(std::span<const Trajectory> runs, int player,
                                          int action, double delta) {
    HittingTimeAccumulator acc(player, action, delta);
    for (const auto& traj : runs) acc.add(traj);
    return acc.finalize();
}

TimeAverageSeries time_average(const Trajectory& traj) {
    if (traj.times.empty()) throw ConfigError("time_average: empty trajectory");
    const int n = traj.n_coords;
    TimeAverageSeries out;
    out.n_coords = n;
    out.times = traj.times;
    out.averages.resize(traj.size() * n);

    std::vector<double> integral(n, 0.0);
    {
        const auto x0 = traj.strategies_at(0);
        std::copy(x0.begin(), x0.end(), out.averages.begin());
    }
    for (std::size_t s = 1; s < traj.size(); ++s) {
        const double h = traj.times[s] - traj.times[s - 1];
        const auto xp = traj.strategies_at(s - 1);
        const auto xc = traj.strategies_at(s);
        const double t = traj.times[s];
        for (int i = 0; i < n; ++i) {
            integral[i] += 0.5 * h * (xp[i] + xc[i]);
            out.averages[s * n + i] = integral[i] / t;
        }
    }
    return out;
}

std::vector<double> nash_gap_series(const Game& game, const TimeAverageSeries& avg) {
    if (avg.n_coords != game.total_coords())
        throw ConfigError("nash_gap_series: dimension mismatch");
    std::vector<double> gaps(avg.times.size());
    for (std::size_t s = 0; s < avg.times.size(); ++s) {
        const auto row = avg.at(s);
        gaps[s] = nash_gap(game, unflatten(game, {row.begin(), row.end()}));
    }
    return gaps;
}

double loglog_slope(std::span<const double> times, std::span<const double> values,
                    double t_lo, double t_hi, int min_points, double positive_floor) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        if (t < t_lo || t > t_hi || t <= 0.0) continue;
        if (values[i] <= positive_floor) continue;
        const double lx = std::log(t);
        const double ly = std::log(values[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n < min_points)
        throw SimulationError("loglog_slope: fewer than " + std::to_string(min_points) +
                              " usable points in the fit window");
    const double denom = n * sxx - sx * sx;
    return (n * sxy - sx * sy) / denom;
}

GrowthDiagnostic score_difference_growth(const Trajectory& traj, int player,
                                         int action_a, int action_b) {
    if (traj.times.empty()) throw ConfigError("score_difference_growth: empty trajectory");
    const double horizon = traj.times.back();
    std::vector<double> diff(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i)
        diff[i] = std::abs(traj.score(i, player, action_a) - traj.score(i, player, action_b));
    GrowthDiagnostic d;
    d.slope = loglog_slope(traj.times, diff, horizon / 10.0, horizon);
    for (std::size_t i = 0; i < traj.size(); ++i)
        if (traj.times[i] >= horizon / 10.0 && diff[i] > 1e-12) ++d.points;
    d.sublinear = d.slope < 0.95;
    return d;
}

BinomialCi binomial_ci_95(int successes, int n) {
    BinomialCi ci;
    if (n <= 0) return ci;
    ci.phat = static_cast<double>(successes) / n;
    ci.half_width = 1.96 * std::sqrt(ci.phat * (1.0 - ci.phat) / n);
    ci.upper = std::min(1.0, ci.phat + ci.half_width);
    return ci;
}

EnsembleSummary::EnsembleSummary(std::vector<double> tracked_times)
    : times_(std::move(tracked_times)), values_(times_.size()) {}

void EnsembleSummary::add_run(std::uint64_t run_index, std::span<const double> values) {
    if (values.size() != times_.size())
        throw ConfigError("ensemble summary: one value per tracked time required");
    for (std::size_t i = 0; i < values.size(); ++i) values_[i].push_back(values[i]);
    seeds_.push_back(run_index);
}

double EnsembleSummary::mean(std::size_t time_idx) const {
    const auto& v = values_.at(time_idx);
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double EnsembleSummary::variance(std::size_t time_idx) const {
    const auto& v = values_.at(time_idx);
    if (v.size() < 2) return 0.0;
    const double m = mean(time_idx);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

double EnsembleSummary::quantile(std::size_t time_idx, double level) const {
    auto v = values_.at(time_idx);
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const double pos = std::clamp(level, 0.0, 1.0) * (v.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const auto hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return v[lo] * (1.0 - frac) + v[hi] * frac;
}

int EnsembleSummary::exceedance_count(std::size_t time_idx, double threshold) const {
    const auto& v = values_.at(time_idx);
    return static_cast<int>(std::count_if(v.begin(), v.end(),
                                          [&](double x) { return x > threshold; }));
}

}  // namespace srl
