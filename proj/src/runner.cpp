#include "srl/runner.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "srl/analysis.hpp"
#include "srl/csv.hpp"
#include "srl/errors.hpp"
#include "srl/version.hpp"

namespace srl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string sanitize(const std::string& id) {
    std::string out = id;
    for (char& c : out)
        if (c == '/' || c == ' ') c = '-';
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SimulationError("cannot open output file: " + path);
    out << text;
}

json verdict_to_json(const CheckResult& r) {
    json details = json::object();
    for (const auto& [key, value] : r.details) details[key] = value;
    return {{"check_id", r.check_id}, {"passed", r.passed},
            {"statistic", r.statistic}, {"bound", r.bound},
            {"n_runs", r.n_runs},       {"ci", r.ci_half_width},
            {"details", details}};
}

double diagonal_sigma_of(const ExperimentConfig& cfg) {
    if (cfg.noise_mode == "none") return 0.0;
    if (cfg.noise_mode == "diagonal" && cfg.noise_sigma_per_coord.empty())
        return cfg.noise_sigma;
    throw ConfigError("this check needs uniform diagonal noise in the config");
}

double constant_eta_of(const ExperimentConfig& cfg) {
    const auto& s = cfg.schedules.at(0);
    if (s.form() != LearningSchedule::Form::Constant)
        throw ConfigError("this check needs a constant learning schedule");
    return s.eta0();
}

std::vector<CheckResult> dispatch_check(const ExperimentConfig& cfg, const json& spec) {
    const std::string kind = spec.value("check", "");
    const auto num = [&](const std::string& key, double fallback) {
        return spec.contains(key) ? spec[key].get<double>() : fallback;
    };
    const auto integer = [&](const std::string& key, int fallback) {
        return spec.contains(key) ? spec[key].get<int>() : fallback;
    };

    if (kind == "adversarial-regret") {
        if (cfg.mode != ExperimentConfig::Mode::Unilateral ||
            cfg.stream_type != "square-wave-sqrt")
            throw ConfigError(
                "adversarial-regret check needs a square-wave-sqrt stream config");
        AdversarialRegretParams p;
        p.wave_scale = cfg.stream_period;
        p.sigma = diagonal_sigma_of(cfg);
        p.schedule = cfg.schedules.at(0);
        p.dt = cfg.dt;
        p.horizon = cfg.horizon;
        p.thin = cfg.thin;
        p.n_runs = cfg.n_runs;
        p.seed = cfg.master_seed;
        p.workers = cfg.workers;
        p.lil_constant = num("lil_constant", p.lil_constant);
        p.window_lo = num("window_lo", p.window_lo);
        p.window_hi = num("window_hi", p.window_hi);
        p.min_fraction = num("min_fraction", p.min_fraction);
        p.slope_lo = num("slope_lo", p.slope_lo);
        p.slope_hi = num("slope_hi", p.slope_hi);
        p.det_eta = num("det_eta", p.det_eta);
        p.det_horizon = num("det_horizon", p.det_horizon);
        p.det_dt = num("det_dt", p.det_dt);
        p.det_thin = integer("det_thin", p.det_thin);
        return adversarial_regret_check(p);
    }

    if (kind == "extinction") {
        if (!cfg.game) throw ConfigError("extinction check needs a game config");
        ExtinctionParams p;
        p.game = *cfg.game;
        p.player = integer("player", 0);
        p.dominated = integer("dominated", 0);
        p.dominating = integer("dominating", 1);
        p.kernel = kernel_by_name(cfg.kernel_names.at(p.player));
        p.schedule = cfg.schedules.at(p.player);
        p.noise = cfg.build_noise();
        p.check_envelope = spec.value("check_envelope", true);
        p.envelope_eps = num("envelope_eps", p.envelope_eps);
        p.envelope_t_floor = num("envelope_t_floor", p.envelope_t_floor);
        p.envelope_min_fraction = num("envelope_min_fraction", p.envelope_min_fraction);
        p.envelope_runs = integer("envelope_runs", p.envelope_runs);
        p.horizon = cfg.horizon;
        p.dt = cfg.dt;
        p.thin = cfg.thin;
        if (spec.contains("exceedance_times")) {
            p.exceedance_times.clear();
            for (const auto& t : spec["exceedance_times"])
                p.exceedance_times.push_back(t.get<double>());
        }
        p.delta = num("delta", p.delta);
        p.tail_runs = integer("tail_runs", p.tail_runs);
        p.hitting_horizon = num("hitting_horizon", p.hitting_horizon);
        p.hitting_dt = num("hitting_dt", p.hitting_dt);
        p.hitting_runs = integer("hitting_runs", p.hitting_runs);
        p.seed = cfg.master_seed;
        p.workers = cfg.workers;
        return extinction_check(p);
    }

    if (kind == "stability") {
        if (!cfg.game) throw ConfigError("stability check needs a game config");
        StabilityParams p;
        p.game = *cfg.game;
        if (spec.contains("equilibrium")) {
            p.equilibrium.clear();
            for (const auto& a : spec["equilibrium"]) p.equilibrium.push_back(a.get<int>());
        }
        p.eps = num("eps", p.eps);
        p.margin = num("margin", p.margin);
        p.sigma = diagonal_sigma_of(cfg);
        p.eta = constant_eta_of(cfg);
        p.neighborhood_m = num("neighborhood_m", 0.0);
        p.dt = cfg.dt;
        p.horizon = cfg.horizon;
        p.thin = cfg.thin;
        p.n_runs = cfg.n_runs;
        p.convergence_tol = num("convergence_tol", p.convergence_tol);
        p.min_converged_fraction = num("min_converged_fraction", p.min_converged_fraction);
        p.seed = cfg.master_seed;
        p.workers = cfg.workers;
        return stability_check(p);
    }

    if (kind == "time-average") {
        if (!cfg.game) throw ConfigError("time-average check needs a game config");
        TimeAverageParams p;
        p.game = *cfg.game;
        p.kernel = kernel_by_name(cfg.kernel_names.at(0));
        p.schedule = cfg.schedules.at(0);
        p.sigma = diagonal_sigma_of(cfg);
        p.dt = cfg.dt;
        p.horizon = cfg.horizon;
        p.thin = cfg.thin;
        p.n_runs = cfg.n_runs;
        p.sup_tol = num("sup_tol", p.sup_tol);
        p.min_fraction = num("min_fraction", p.min_fraction);
        p.gap_early_time = num("gap_early_time", p.gap_early_time);
        p.seed = cfg.master_seed;
        p.workers = cfg.workers;
        return time_average_check(p);
    }

    if (kind == "covariance") {
        if (!cfg.network)
            throw ConfigError("covariance check needs a congestion-network config");
        CovarianceParams p;
        p.network = *cfg.network;
        p.eta = constant_eta_of(cfg);
        p.dt = num("dt", p.dt);
        p.n_steps = static_cast<long long>(num("n_steps", static_cast<double>(p.n_steps)));
        p.tol_se = num("tol_se", p.tol_se);
        p.seed = cfg.master_seed;
        return covariance_check(p);
    }

    throw ConfigError("unknown analysis check '" + kind + "'");
}

}  // namespace

std::string default_output_dir() {
    if (const char* env = std::getenv("SRLSIM_OUT_DIR"); env && *env) return env;
    return "out";
}

RunOutcome run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    RunOutcome outcome;
    const auto emit = [&](const std::string& name) {
        outcome.files.push_back(name);
        return (fs::path(out_dir) / name).string();
    };

    // Run-0 series exports.
    SimOptions opts;
    opts.dt = cfg.dt;
    opts.horizon = cfg.horizon;
    opts.thin = cfg.thin;
    opts.seed = cfg.master_seed;
    opts.trajectory_index = 0;

    Trajectory traj;
    SrlSystem system;  // kept alive for the game pointer
    if (cfg.mode == ExperimentConfig::Mode::GameDynamics) {
        system.game = &*cfg.game;
        system.kernels = cfg.build_kernels();
        system.schedules = cfg.schedules;
        system.noise = cfg.build_noise();
        traj = simulate(system, cfg.initial_scores, opts);
    } else {
        traj = simulate_unilateral(cfg.build_stream(), cfg.build_kernels().at(0),
                                   cfg.schedules.at(0), [&] {
                                       std::vector<double> s(cfg.stream_dim,
                                                             cfg.noise_mode == "none"
                                                                 ? 0.0
                                                                 : cfg.noise_sigma);
                                       if (!cfg.noise_sigma_per_coord.empty())
                                           s = cfg.noise_sigma_per_coord;
                                       return s;
                                   }(),
                                   cfg.initial_scores, opts);
    }

    if (cfg.out_trajectory) {
        write_trajectory_csv(emit("trajectory.csv"), traj);
        const json sidecar = {{"config", cfg.raw},
                              {"seed", cfg.master_seed},
                              {"trajectory_index", 0},
                              {"dt", cfg.dt},
                              {"thin", cfg.thin},
                              {"meta", traj.meta}};
        write_text(emit("trajectory.sidecar.json"), sidecar.dump(2) + "\n");
    }
    if (cfg.out_time_average || cfg.out_nash_gap) {
        const TimeAverageSeries avg = time_average(traj);
        if (cfg.out_time_average) {
            std::vector<std::string> cols = {"t"};
            for (std::size_t k = 0; k < traj.actions_per_player.size(); ++k)
                for (int a = 0; a < traj.actions_per_player[k]; ++a)
                    cols.push_back("xbar_" + std::to_string(k + 1) + "_" +
                                   std::to_string(a + 1));
            std::vector<double> rows;
            rows.reserve(avg.times.size() * cols.size());
            for (std::size_t i = 0; i < avg.times.size(); ++i) {
                rows.push_back(avg.times[i]);
                const auto row = avg.at(i);
                rows.insert(rows.end(), row.begin(), row.end());
            }
            write_csv(emit("time_average.csv"), cols, rows);
        }
        if (cfg.out_nash_gap && cfg.mode == ExperimentConfig::Mode::GameDynamics) {
            const std::vector<double> gaps = nash_gap_series(*cfg.game, avg);
            std::vector<double> rows;
            rows.reserve(gaps.size() * 2);
            for (std::size_t i = 0; i < gaps.size(); ++i) {
                rows.push_back(avg.times[i]);
                rows.push_back(gaps[i]);
            }
            write_csv(emit("nash_gap.csv"), {"t", "nash_gap_of_average"}, rows);
        }
    }
    if (cfg.out_regret && cfg.mode == ExperimentConfig::Mode::Unilateral) {
        const RegretSeries series = cumulative_regret(traj, cfg.build_stream());
        std::vector<double> rows;
        rows.reserve(series.times.size() * 2);
        for (std::size_t i = 0; i < series.times.size(); ++i) {
            rows.push_back(series.times[i]);
            rows.push_back(series.regret[i]);
        }
        write_csv(emit("regret.csv"), {"t", "regret"}, rows);
    }

    // Analysis checks.
    for (const auto& spec : cfg.analysis) {
        const auto results = dispatch_check(cfg, spec);
        for (const auto& r : results) {
            outcome.all_passed = outcome.all_passed && r.passed;
            write_text(emit(sanitize(r.check_id) + ".verdict.json"),
                       verdict_to_json(r).dump(2) + "\n");
            if (!r.series_columns.empty())
                write_csv(emit(sanitize(r.check_id) + ".csv"), r.series_columns,
                          r.series_values);
            outcome.results.push_back(r);
        }
    }

    json checks_summary = json::object();
    for (const auto& r : outcome.results) checks_summary[r.check_id] = r.passed;
    const json manifest = {{"tool", kToolName},
                           {"version", kToolVersion},
                           {"config_hash", config_hash(cfg.raw)},
                           {"master_seed", cfg.master_seed},
                           {"config", cfg.raw},
                           {"outputs", outcome.files},
                           {"checks", checks_summary}};
    write_text(emit("manifest.json"), manifest.dump(2) + "\n");
    return outcome;
}

}  // namespace srl
