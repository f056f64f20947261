#include "srl/config.hpp"

#include <cmath>
#include <fstream>

#include "srl/errors.hpp"
#include "srl/kernel.hpp"

namespace srl {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

double get_number(const json& obj, const std::string& key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) fail("config field '" + key + "' must be a number");
    return obj[key].get<double>();
}

std::string get_string(const json& obj, const std::string& key, const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_string()) fail("config field '" + key + "' must be a string");
    return obj[key].get<std::string>();
}

bool get_bool(const json& obj, const std::string& key, bool fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_boolean()) fail("config field '" + key + "' must be a boolean");
    return obj[key].get<bool>();
}

std::vector<double> get_vector(const json& arr, const std::string& what) {
    if (!arr.is_array()) fail(what + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : arr) {
        if (!v.is_number()) fail(what + " must contain only numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

Game game_preset(const std::string& name) {
    if (name == "matching-pennies") return matching_pennies();
    if (name == "coordination-2x2") return coordination_2x2();
    if (name == "prisoners-dilemma") return prisoners_dilemma();
    if (name == "dominated-two-action") return single_player({0.0, 1.0});
    fail("unknown game preset '" + name + "'");
}

Game parse_inline_game(const json& g) {
    if (!g.contains("actions")) fail("inline game needs an 'actions' array");
    std::vector<int> actions;
    for (const auto& a : g["actions"]) actions.push_back(a.get<int>());
    if (!g.contains("payoffs") || !g["payoffs"].is_array())
        fail("inline game needs a 'payoffs' array (one tensor per player)");
    std::vector<std::vector<double>> payoffs;
    for (const auto& tensor : g["payoffs"])
        payoffs.push_back(get_vector(tensor, "payoff tensor"));
    std::vector<std::vector<std::string>> labels;
    if (g.contains("labels"))
        for (const auto& per_player : g["labels"]) {
            labels.emplace_back();
            for (const auto& l : per_player) labels.back().push_back(l.get<std::string>());
        }
    return Game(actions, payoffs, get_bool(g, "zero_sum", false), labels);
}

CongestionNetwork parse_network(const json& net) {
    CongestionNetwork network;
    if (!net.contains("edges") || !net["edges"].is_array())
        fail("congestion network needs an 'edges' array");
    for (const auto& e : net["edges"]) {
        CongestionEdge edge;
        edge.name = get_string(e, "name", "e" + std::to_string(network.edges.size() + 1));
        edge.delay_base = get_number(e, "delay_base", 0.0);
        edge.delay_slope = get_number(e, "delay_slope", 0.0);
        edge.sigma = get_number(e, "sigma", 0.0);
        network.edges.push_back(edge);
    }
    if (!net.contains("paths") || !net["paths"].is_array())
        fail("congestion network needs a 'paths' array (per player, per action)");
    for (const auto& per_player : net["paths"]) {
        network.paths.emplace_back();
        for (const auto& path : per_player) {
            std::vector<int> edges;
            for (const auto& r : path) {
                if (r.is_number_integer()) {
                    edges.push_back(r.get<int>());
                } else if (r.is_string()) {
                    const std::string name = r.get<std::string>();
                    int idx = -1;
                    for (std::size_t i = 0; i < network.edges.size(); ++i)
                        if (network.edges[i].name == name) idx = static_cast<int>(i);
                    if (idx < 0) fail("path references unknown edge '" + name + "'");
                    edges.push_back(idx);
                } else {
                    fail("path entries must be edge indices or names");
                }
            }
            network.paths.back().push_back(std::move(edges));
        }
    }
    network.validate();
    return network;
}

LearningSchedule parse_schedule(const json& s) {
    const std::string form = get_string(s, "form", "constant");
    const double eta0 = get_number(s, "eta0", 1.0);
    if (form == "constant") return LearningSchedule::constant(eta0);
    if (form == "power")
        return LearningSchedule::power(eta0, get_number(s, "gamma", 0.5),
                                       get_number(s, "t0", 1.0));
    fail("unknown schedule form '" + form + "' (use 'constant' or 'power')");
}

json schedule_to_json(const LearningSchedule& s) {
    json out;
    out["eta0"] = s.eta0();
    if (s.form() == LearningSchedule::Form::Constant) {
        out["form"] = "constant";
    } else {
        out["form"] = "power";
        out["gamma"] = s.gamma();
        out["t0"] = s.t0();
    }
    return out;
}

json network_to_json(const CongestionNetwork& net) {
    json edges = json::array();
    for (const auto& e : net.edges)
        edges.push_back({{"name", e.name},
                         {"delay_base", e.delay_base},
                         {"delay_slope", e.delay_slope},
                         {"sigma", e.sigma}});
    json paths = json::array();
    for (const auto& per_player : net.paths) {
        json pp = json::array();
        for (const auto& path : per_player) pp.push_back(path);
        paths.push_back(pp);
    }
    return {{"edges", edges}, {"paths", paths}};
}

json game_to_json(const Game& game) {
    json payoffs = json::array();
    for (int k = 0; k < game.players(); ++k) payoffs.push_back(game.payoff_tensor(k));
    json out = {{"actions", game.action_counts()},
                {"payoffs", payoffs},
                {"zero_sum", game.zero_sum()}};
    if (!game.labels().empty()) out["labels"] = game.labels();
    return out;
}

json resolved_to_json(const ExperimentConfig& cfg) {
    json out;
    out["name"] = cfg.name;
    out["mode"] = cfg.mode == ExperimentConfig::Mode::GameDynamics ? "game" : "unilateral";
    if (cfg.mode == ExperimentConfig::Mode::GameDynamics) {
        if (cfg.network) {
            out["game"] = {{"congestion", network_to_json(*cfg.network)}};
        } else {
            out["game"] = game_to_json(*cfg.game);
        }
    } else {
        json stream = {{"type", cfg.stream_type}};
        if (cfg.stream_type == "square-wave" || cfg.stream_type == "square-wave-sqrt") {
            stream[cfg.stream_type == "square-wave" ? "period" : "scale"] =
                cfg.stream_period;
            stream["high"] = cfg.stream_high;
            stream["low"] = cfg.stream_low;
        } else {
            stream["values"] = cfg.stream_values;
        }
        out["stream"] = stream;
    }
    out["kernels"] = cfg.kernel_names;
    json schedules = json::array();
    for (const auto& s : cfg.schedules) schedules.push_back(schedule_to_json(s));
    out["schedules"] = schedules;
    json noise = {{"mode", cfg.noise_mode}};
    if (cfg.noise_mode == "diagonal") {
        if (cfg.noise_sigma_per_coord.empty())
            noise["sigma"] = cfg.noise_sigma;
        else
            noise["sigma_per_coord"] = cfg.noise_sigma_per_coord;
    } else if (cfg.noise_mode == "correlated") {
        noise["covariance"] = cfg.noise_covariance;
    }
    out["noise"] = noise;
    if (!cfg.initial_scores.empty()) out["initial_scores"] = cfg.initial_scores;
    out["integration"] = {{"dt", cfg.dt}, {"horizon", cfg.horizon}, {"thin", cfg.thin}};
    out["ensemble"] = {{"n_runs", cfg.n_runs},
                       {"master_seed", cfg.master_seed},
                       {"workers", cfg.workers}};
    out["outputs"] = {{"trajectory_csv", cfg.out_trajectory},
                      {"time_average_csv", cfg.out_time_average},
                      {"regret_csv", cfg.out_regret},
                      {"nash_gap_csv", cfg.out_nash_gap}};
    out["analysis"] = cfg.analysis;
    return out;
}

}  // namespace

int ExperimentConfig::total_coords() const {
    if (mode == Mode::GameDynamics) return game->total_coords();
    return stream_dim;
}

NoiseModel ExperimentConfig::build_noise() const {
    const int dim = total_coords();
    if (noise_mode == "none") return NoiseModel::none(dim);
    if (noise_mode == "diagonal") {
        if (!noise_sigma_per_coord.empty()) {
            if (static_cast<int>(noise_sigma_per_coord.size()) != dim)
                fail("noise sigma_per_coord has wrong dimension");
            return NoiseModel::diagonal(noise_sigma_per_coord);
        }
        return NoiseModel::diagonal_uniform(noise_sigma, dim);
    }
    if (noise_mode == "correlated")
        return NoiseModel::correlated(noise_covariance, dim);
    if (noise_mode == "congestion") {
        if (!network) fail("noise mode 'congestion' needs a congestion game");
        return NoiseModel::correlated(build_congestion_game(*network).covariance, dim);
    }
    fail("unknown noise mode '" + noise_mode + "'");
}

PayoffStream ExperimentConfig::build_stream() const {
    if (stream_type == "constant") return constant_stream(stream_values);
    if (stream_type == "square-wave")
        return square_wave_stream(stream_period, stream_high, stream_low);
    if (stream_type == "square-wave-sqrt")
        return sqrt_square_wave_stream(stream_period, stream_high, stream_low);
    fail("unknown stream type '" + stream_type + "'");
}

std::vector<PenaltyKernel> ExperimentConfig::build_kernels() const {
    std::vector<PenaltyKernel> out;
    for (const auto& name : kernel_names) out.push_back(kernel_by_name(name));
    return out;
}

ExperimentConfig parse_config(const json& doc) {
    if (!doc.is_object()) fail("config must be a JSON object");
    if (doc.contains("config")) return parse_config(doc["config"]);  // manifest

    ExperimentConfig cfg;
    cfg.name = get_string(doc, "name", "experiment");
    const std::string mode = get_string(doc, "mode", "game");
    if (mode == "game") {
        cfg.mode = ExperimentConfig::Mode::GameDynamics;
    } else if (mode == "unilateral") {
        cfg.mode = ExperimentConfig::Mode::Unilateral;
    } else {
        fail("mode must be 'game' or 'unilateral'");
    }

    int n_players = 1;
    if (cfg.mode == ExperimentConfig::Mode::GameDynamics) {
        if (!doc.contains("game")) fail("game mode needs a 'game' section");
        const json& g = doc["game"];
        if (g.contains("preset")) {
            cfg.game = game_preset(g["preset"].get<std::string>());
        } else if (g.contains("congestion")) {
            cfg.network = parse_network(g["congestion"]);
            cfg.game = build_congestion_game(*cfg.network).game;
        } else {
            cfg.game = parse_inline_game(g);
        }
        n_players = cfg.game->players();
    } else {
        if (!doc.contains("stream")) fail("unilateral mode needs a 'stream' section");
        const json& s = doc["stream"];
        cfg.stream_type = get_string(s, "type", "constant");
        if (cfg.stream_type == "square-wave" || cfg.stream_type == "square-wave-sqrt") {
            const char* size_key = cfg.stream_type == "square-wave" ? "period" : "scale";
            cfg.stream_period = get_number(s, size_key,
                                           cfg.stream_type == "square-wave" ? 8.0 : 1.0);
            if (cfg.stream_period <= 0.0)
                fail(std::string("square wave ") + size_key + " must be > 0");
            cfg.stream_high = get_vector(s.value("high", json::array({1.0, 0.0})),
                                         "stream 'high'");
            cfg.stream_low = get_vector(s.value("low", json::array({0.0, 1.0})),
                                        "stream 'low'");
            if (cfg.stream_high.size() != cfg.stream_low.size())
                fail("stream 'high' and 'low' must have the same length");
            cfg.stream_dim = static_cast<int>(cfg.stream_high.size());
        } else if (cfg.stream_type == "constant") {
            cfg.stream_values = get_vector(s.value("values", json::array({1.0, 0.0})),
                                           "stream 'values'");
            cfg.stream_dim = static_cast<int>(cfg.stream_values.size());
        } else {
            fail("unknown stream type '" + cfg.stream_type + "'");
        }
        if (cfg.stream_dim < 1) fail("stream needs at least one action");
        n_players = 1;
    }

    // Kernels: one name, or one per player.
    if (doc.contains("kernels")) {
        const json& ks = doc["kernels"];
        if (ks.is_string()) {
            cfg.kernel_names.assign(n_players, ks.get<std::string>());
        } else if (ks.is_array()) {
            for (const auto& k : ks) cfg.kernel_names.push_back(k.get<std::string>());
        } else {
            fail("'kernels' must be a name or an array of names");
        }
    } else {
        cfg.kernel_names.assign(n_players, "entropy");
    }
    if (static_cast<int>(cfg.kernel_names.size()) == 1 && n_players > 1)
        cfg.kernel_names.assign(n_players, cfg.kernel_names[0]);
    if (static_cast<int>(cfg.kernel_names.size()) != n_players)
        fail("need one kernel per player");
    for (const auto& name : cfg.kernel_names) kernel_by_name(name);  // must resolve

    // Schedules: one object, or one per player.
    if (doc.contains("schedules")) {
        const json& ss = doc["schedules"];
        if (ss.is_object()) {
            cfg.schedules.assign(n_players, parse_schedule(ss));
        } else if (ss.is_array()) {
            for (const auto& s : ss) cfg.schedules.push_back(parse_schedule(s));
        } else {
            fail("'schedules' must be an object or an array");
        }
    } else {
        cfg.schedules.assign(n_players, LearningSchedule::constant(1.0));
    }
    if (static_cast<int>(cfg.schedules.size()) == 1 && n_players > 1)
        cfg.schedules.assign(n_players, cfg.schedules[0]);
    if (static_cast<int>(cfg.schedules.size()) != n_players)
        fail("need one schedule per player");

    if (doc.contains("noise")) {
        const json& nz = doc["noise"];
        cfg.noise_mode = get_string(nz, "mode", "none");
        if (cfg.noise_mode == "diagonal") {
            if (nz.contains("sigma_per_coord")) {
                cfg.noise_sigma_per_coord =
                    get_vector(nz["sigma_per_coord"], "sigma_per_coord");
            } else {
                cfg.noise_sigma = get_number(nz, "sigma", 1.0);
                if (cfg.noise_sigma < 0.0) fail("noise sigma must be >= 0");
            }
        } else if (cfg.noise_mode == "correlated") {
            if (!nz.contains("covariance")) fail("correlated noise needs 'covariance'");
            const json& cov = nz["covariance"];
            if (cov.is_array() && !cov.empty() && cov[0].is_array()) {
                for (const auto& row : cov)
                    for (const auto& v : row) cfg.noise_covariance.push_back(v.get<double>());
            } else {
                cfg.noise_covariance = get_vector(cov, "covariance");
            }
        } else if (cfg.noise_mode != "none" && cfg.noise_mode != "congestion") {
            fail("unknown noise mode '" + cfg.noise_mode + "'");
        }
    }

    if (doc.contains("initial_scores"))
        cfg.initial_scores = get_vector(doc["initial_scores"], "initial_scores");

    const json integ = doc.value("integration", json::object());
    cfg.dt = get_number(integ, "dt", 1e-3);
    cfg.horizon = get_number(integ, "horizon", 1.0);
    cfg.thin = static_cast<int>(get_number(integ, "thin", 1));
    if (cfg.dt <= 0.0) fail("integration dt must be > 0");
    if (cfg.horizon < cfg.dt) fail("integration horizon must be >= dt");
    if (cfg.thin < 1) fail("storage thinning must be >= 1");
    const auto n_steps = static_cast<long long>(std::llround(cfg.horizon / cfg.dt));
    if (n_steps > 100'000'000) fail("horizon/dt exceeds the 1e8 step budget");
    if (n_steps % cfg.thin != 0) fail("horizon/dt must be a multiple of 'thin'");

    const json ens = doc.value("ensemble", json::object());
    cfg.n_runs = static_cast<int>(get_number(ens, "n_runs", 1));
    if (cfg.n_runs < 1) fail("ensemble n_runs must be >= 1");
    cfg.master_seed = static_cast<std::uint64_t>(get_number(ens, "master_seed", 1));
    cfg.workers = static_cast<int>(get_number(ens, "workers", 0));

    const json outs = doc.value("outputs", json::object());
    cfg.out_trajectory = get_bool(outs, "trajectory_csv", true);
    cfg.out_time_average = get_bool(outs, "time_average_csv", false);
    cfg.out_regret = get_bool(outs, "regret_csv", false);
    cfg.out_nash_gap = get_bool(outs, "nash_gap_csv", false);

    if (doc.contains("analysis")) {
        if (!doc["analysis"].is_array()) fail("'analysis' must be an array of checks");
        cfg.analysis = doc["analysis"];
    }

    if (!cfg.initial_scores.empty() &&
        static_cast<int>(cfg.initial_scores.size()) != cfg.total_coords())
        fail("initial_scores has wrong dimension");

    cfg.build_noise();  // validates dimensions / PSD early
    cfg.raw = resolved_to_json(cfg);
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open config file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        fail("config is not valid JSON: " + std::string(e.what()));
    }
    return parse_config(doc);
}

std::string config_hash(const json& doc) {
    const std::string dump = doc.dump();
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

json congestion_2x2_preset(const std::string& kernel) {
    return {
        {"name", std::string("congestion-2x2-") + (kernel == "entropy" ? "logit" : "projection")},
        {"mode", "game"},
        {"game",
         {{"congestion",
           {{"edges", json::array({{{"name", "top"}, {"delay_base", 0.0},
                                    {"delay_slope", 1.0}, {"sigma", 1.0}},
                                   {{"name", "bottom"}, {"delay_base", 0.0},
                                    {"delay_slope", 1.0}, {"sigma", 1.0}}})},
            {"paths", json::array({json::array({json::array({0}), json::array({1})}),
                                   json::array({json::array({0}), json::array({1})})})}}}}},
        {"kernels", kernel},
        {"schedules", {{"form", "constant"}, {"eta0", 1.0}}},
        {"noise", {{"mode", "diagonal"}, {"sigma", 1.0}}},
        {"integration", {{"dt", 1e-3}, {"horizon", 100.0}, {"thin", 100}}},
        {"ensemble", {{"n_runs", 1}, {"master_seed", 1}, {"workers", 0}}},
        {"outputs", {{"trajectory_csv", true}, {"nash_gap_csv", true}}},
    };
}

json matching_pennies_preset() {
    return {
        {"name", "matching-pennies-timeavg"},
        {"mode", "game"},
        {"game", {{"preset", "matching-pennies"}}},
        {"kernels", "entropy"},
        {"schedules", {{"form", "power"}, {"eta0", 1.0}, {"gamma", 0.5}, {"t0", 1.0}}},
        {"noise", {{"mode", "diagonal"}, {"sigma", 1.0}}},
        {"integration", {{"dt", 0.01}, {"horizon", 1e4}, {"thin", 100}}},
        {"ensemble", {{"n_runs", 100}, {"master_seed", 1}, {"workers", 0}}},
        {"outputs",
         {{"trajectory_csv", true}, {"time_average_csv", true}, {"nash_gap_csv", true}}},
        {"analysis", json::array({{{"check", "time-average"}}})},
    };
}

json dominated_preset() {
    return {
        {"name", "dominated-single-player"},
        {"mode", "game"},
        {"game", {{"preset", "dominated-two-action"}}},
        {"kernels", "entropy"},
        {"schedules", {{"form", "constant"}, {"eta0", 1.0}}},
        {"noise", {{"mode", "diagonal"}, {"sigma", 1.0}}},
        {"integration", {{"dt", 1e-3}, {"horizon", 200.0}, {"thin", 100}}},
        {"ensemble", {{"n_runs", 1}, {"master_seed", 1}, {"workers", 0}}},
        {"outputs", {{"trajectory_csv", true}}},
        {"analysis", json::array({{{"check", "extinction"}}})},
    };
}

json stability_preset() {
    return {
        {"name", "coordination-stability"},
        {"mode", "game"},
        {"game", {{"preset", "coordination-2x2"}}},
        {"kernels", "entropy"},
        {"schedules", {{"form", "constant"}, {"eta0", 1.0}}},
        {"noise", {{"mode", "diagonal"}, {"sigma", 1.0}}},
        {"integration", {{"dt", 1e-2}, {"horizon", 1e3}, {"thin", 10}}},
        {"ensemble", {{"n_runs", 1000}, {"master_seed", 1}, {"workers", 0}}},
        {"outputs", {{"trajectory_csv", false}}},
        {"analysis", json::array({{{"check", "stability"}, {"eps", 0.1}}})},
    };
}

json adversarial_preset() {
    return {
        {"name", "adversarial-regret"},
        {"mode", "unilateral"},
        {"stream",
         {{"type", "square-wave-sqrt"},
          {"scale", 1.0},
          {"high", json::array({1.0, 0.0})},
          {"low", json::array({0.0, 1.0})}}},
        {"kernels", "entropy"},
        {"schedules", {{"form", "power"}, {"eta0", 1.0}, {"gamma", 0.5}, {"t0", 1.0}}},
        {"noise", {{"mode", "diagonal"}, {"sigma", 1.0}}},
        {"integration", {{"dt", 0.01}, {"horizon", 1e4}, {"thin", 100}}},
        {"ensemble", {{"n_runs", 200}, {"master_seed", 1}, {"workers", 0}}},
        {"outputs", {{"trajectory_csv", true}, {"regret_csv", true}}},
        {"analysis", json::array({{{"check", "adversarial-regret"}}})},
    };
}

json correlated_preset() {
    return {
        {"name", "correlated-congestion"},
        {"mode", "game"},
        {"game",
         {{"congestion",
           {{"edges", json::array({{{"name", "shared"}, {"delay_base", 1.0},
                                    {"delay_slope", 0.0}, {"sigma", 1.0}},
                                   {{"name", "fast"}, {"delay_base", 0.0},
                                    {"delay_slope", 0.0}, {"sigma", 1.0}},
                                   {{"name", "slow"}, {"delay_base", 1.0},
                                    {"delay_slope", 0.0}, {"sigma", 1.0}}})},
            {"paths", json::array({json::array(
                          {json::array({0, 1}), json::array({0, 2})})})}}}}},
        {"kernels", "entropy"},
        {"schedules", {{"form", "constant"}, {"eta0", 1.0}}},
        {"noise", {{"mode", "congestion"}}},
        {"integration", {{"dt", 1e-3}, {"horizon", 200.0}, {"thin", 100}}},
        {"ensemble", {{"n_runs", 1}, {"master_seed", 1}, {"workers", 0}}},
        {"outputs", {{"trajectory_csv", true}}},
        {"analysis", json::array({{{"check", "covariance"}},
                                  {{"check", "extinction"},
                                   {"check_envelope", false},
                                   {"dominated", 1},
                                   {"dominating", 0}}})},
    };
}

}  // namespace

std::vector<PresetInfo> list_presets() {
    return {
        {"congestion-2x2-logit",
         "two-route congestion game under logit learning, diagonal unit noise"},
        {"congestion-2x2-projection",
         "two-route congestion game under projected learning, diagonal unit noise"},
        {"matching-pennies-timeavg",
         "zero-sum time-average convergence with vanishing learning rate"},
        {"dominated-single-player",
         "extinction rate of a dominated action under unit noise"},
        {"coordination-stability",
         "stochastic stability of a strict equilibrium in a coordination game"},
        {"adversarial-regret",
         "no-regret bound against an adversarial square-wave payoff stream"},
        {"correlated-congestion",
         "shared-edge congestion noise: increment covariance and extinction"},
    };
}

nlohmann::json preset_config(const std::string& name) {
    if (name == "congestion-2x2-logit") return congestion_2x2_preset("entropy");
    if (name == "congestion-2x2-projection") return congestion_2x2_preset("quadratic");
    if (name == "matching-pennies-timeavg") return matching_pennies_preset();
    if (name == "dominated-single-player") return dominated_preset();
    if (name == "coordination-stability") return stability_preset();
    if (name == "adversarial-regret") return adversarial_preset();
    if (name == "correlated-congestion") return correlated_preset();
    fail("unknown preset '" + name + "'");
}

}  // namespace srl
