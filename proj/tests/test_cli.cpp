#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "srl/config.hpp"
#include "srl/errors.hpp"
#include "srl/runner.hpp"

using namespace srl;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("srlsim_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

json tiny_game_config() {
    return {
        {"mode", "game"},
        {"game", {{"preset", "matching-pennies"}}},
        {"kernels", "entropy"},
        {"schedules", {{"form", "power"}, {"eta0", 1.0}, {"gamma", 0.5}, {"t0", 1.0}}},
        {"noise", {{"mode", "diagonal"}, {"sigma", 1.0}}},
        {"integration", {{"dt", 0.01}, {"horizon", 5.0}, {"thin", 10}}},
        {"ensemble", {{"n_runs", 1}, {"master_seed", 7}, {"workers", 0}}},
        {"outputs", {{"trajectory_csv", true}, {"time_average_csv", true},
                     {"nash_gap_csv", true}}},
    };
}

// Fast deterministic ensemble check used for worker-count comparisons.
json tiny_extinction_config() {
    json cfg = {
        {"mode", "game"},
        {"game", {{"preset", "dominated-two-action"}}},
        {"kernels", "entropy"},
        {"schedules", {{"form", "constant"}, {"eta0", 1.0}}},
        {"noise", {{"mode", "diagonal"}, {"sigma", 1.0}}},
        {"integration", {{"dt", 0.01}, {"horizon", 10.0}, {"thin", 10}}},
        {"ensemble", {{"n_runs", 1}, {"master_seed", 3}, {"workers", 1}}},
        {"outputs", {{"trajectory_csv", true}}},
    };
    cfg["analysis"] = json::array({{{"check", "extinction"},
                                    {"check_envelope", false},
                                    {"exceedance_times", json::array({4.0, 8.0})},
                                    {"tail_runs", 48},
                                    {"hitting_runs", 48},
                                    {"hitting_horizon", 10.0},
                                    {"hitting_dt", 0.001}}});
    return cfg;
}

}  // namespace

TEST_CASE("config parsing and validation") {
    SUBCASE("defaults fill in") {
        const auto cfg = parse_config(tiny_game_config());
        CHECK(cfg.game.has_value());
        CHECK(cfg.kernel_names == std::vector<std::string>{"entropy", "entropy"});
        CHECK(cfg.schedules.size() == 2);
        CHECK(cfg.n_runs == 1);
        CHECK(cfg.raw.contains("integration"));
    }
    SUBCASE("gamma = 1 rejected with the learning-weight condition") {
        json cfg = tiny_game_config();
        cfg["schedules"]["gamma"] = 1.0;
        try {
            parse_config(cfg);
            FAIL("expected a ConfigError");
        } catch (const ConfigError& e) {
            const std::string msg = e.what();
            CHECK(msg.find("gamma") != std::string::npos);
            CHECK(msg.find("eta") != std::string::npos);
        }
    }
    SUBCASE("bad shapes rejected") {
        json cfg = tiny_game_config();
        cfg["integration"]["dt"] = 0.0;
        CHECK_THROWS_AS(parse_config(cfg), ConfigError);

        cfg = tiny_game_config();
        cfg["integration"]["thin"] = 3;  // does not divide 500 steps
        CHECK_THROWS_AS(parse_config(cfg), ConfigError);

        cfg = tiny_game_config();
        cfg["ensemble"]["n_runs"] = 0;
        CHECK_THROWS_AS(parse_config(cfg), ConfigError);

        cfg = tiny_game_config();
        cfg["kernels"] = "no-such-kernel";
        CHECK_THROWS_AS(parse_config(cfg), ConfigError);
    }
    SUBCASE("inline games and congestion games parse") {
        const json inline_cfg = {
            {"mode", "game"},
            {"game",
             {{"actions", json::array({2, 2})},
              {"payoffs", json::array({json::array({1.0, -1.0, -1.0, 1.0}),
                                       json::array({-1.0, 1.0, 1.0, -1.0})})},
              {"zero_sum", true}}},
            {"integration", {{"dt", 0.1}, {"horizon", 1.0}, {"thin", 1}}},
        };
        CHECK(parse_config(inline_cfg).game->zero_sum());

        const json net_cfg = {
            {"mode", "game"},
            {"game",
             {{"congestion",
               {{"edges", json::array({{{"name", "a"}, {"delay_slope", 1.0},
                                        {"sigma", 1.0}},
                                       {{"name", "b"}, {"delay_slope", 1.0},
                                        {"sigma", 1.0}}})},
                {"paths",
                 json::array({json::array({json::array({"a"}), json::array({"b"})}),
                              json::array({json::array({"a"}), json::array({"b"})})})}}}}},
            {"noise", {{"mode", "congestion"}}},
            {"integration", {{"dt", 0.1}, {"horizon", 1.0}, {"thin", 1}}},
        };
        const auto cfg = parse_config(net_cfg);
        CHECK(cfg.network.has_value());
        CHECK(cfg.game->players() == 2);
        CHECK(cfg.build_noise().mode() == NoiseModel::Mode::Correlated);
    }
}

TEST_CASE("preset catalog") {
    const auto presets = list_presets();
    CHECK(presets.size() >= 7);
    for (const auto& info : presets) {
        INFO("preset ", info.name);
        CHECK_NOTHROW(parse_config(preset_config(info.name)));
    }
    const auto projection = parse_config(preset_config("congestion-2x2-projection"));
    CHECK(projection.kernel_names[0] == "quadratic");
    const auto logit = parse_config(preset_config("congestion-2x2-logit"));
    CHECK(logit.kernel_names[0] == "entropy");
    CHECK_THROWS_AS(preset_config("no-such-preset"), ConfigError);
}

TEST_CASE("runner outputs") {
    const auto dir = fresh_dir("runner");
    const auto cfg = parse_config(tiny_game_config());
    const auto outcome = run_experiment(cfg, dir.string());
    CHECK(outcome.all_passed);
    CHECK(fs::exists(dir / "trajectory.csv"));
    CHECK(fs::exists(dir / "trajectory.sidecar.json"));
    CHECK(fs::exists(dir / "time_average.csv"));
    CHECK(fs::exists(dir / "nash_gap.csv"));
    CHECK(fs::exists(dir / "manifest.json"));

    const json manifest = json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest["tool"] == "srlsim");
    CHECK(manifest["config_hash"].get<std::string>().size() == 16);
    CHECK(manifest.contains("config"));

    SUBCASE("same config, same bytes") {
        const auto dir2 = fresh_dir("runner2");
        run_experiment(cfg, dir2.string());
        CHECK(slurp(dir / "trajectory.csv") == slurp(dir2 / "trajectory.csv"));
        CHECK(slurp(dir / "time_average.csv") == slurp(dir2 / "time_average.csv"));
    }
    SUBCASE("manifest round-trips byte-identically") {
        const auto dir3 = fresh_dir("runner3");
        const auto from_manifest = parse_config(json::parse(slurp(dir / "manifest.json")));
        run_experiment(from_manifest, dir3.string());
        CHECK(slurp(dir / "trajectory.csv") == slurp(dir3 / "trajectory.csv"));
        CHECK(slurp(dir / "manifest.json") == slurp(dir3 / "manifest.json"));
    }
}

TEST_CASE("unilateral runs export the regret series") {
    const json cfg = {
        {"mode", "unilateral"},
        {"stream",
         {{"type", "square-wave-sqrt"}, {"scale", 1.0},
          {"high", json::array({1.0, 0.0})}, {"low", json::array({0.0, 1.0})}}},
        {"kernels", "entropy"},
        {"schedules", {{"form", "power"}, {"eta0", 1.0}, {"gamma", 0.5}, {"t0", 1.0}}},
        {"noise", {{"mode", "diagonal"}, {"sigma", 1.0}}},
        {"integration", {{"dt", 0.01}, {"horizon", 20.0}, {"thin", 10}}},
        {"outputs", {{"trajectory_csv", true}, {"regret_csv", true}}},
    };
    const auto dir = fresh_dir("unilateral");
    run_experiment(parse_config(cfg), dir.string());
    CHECK(fs::exists(dir / "regret.csv"));
    const std::string head = slurp(dir / "regret.csv").substr(0, 9);
    CHECK(head == "t,regret\n");
}

TEST_CASE("ensemble outputs are independent of the worker count") {
    json cfg1 = tiny_extinction_config();
    json cfg8 = tiny_extinction_config();
    cfg8["ensemble"]["workers"] = 8;
    const auto dir1 = fresh_dir("workers1");
    const auto dir8 = fresh_dir("workers8");
    const auto out1 = run_experiment(parse_config(cfg1), dir1.string());
    const auto out8 = run_experiment(parse_config(cfg8), dir8.string());
    REQUIRE(out1.results.size() == out8.results.size());
    CHECK(slurp(dir1 / "trajectory.csv") == slurp(dir8 / "trajectory.csv"));
    // Verdicts and the per-check summary CSV must match bit for bit.
    for (const auto& r : out1.results) {
        const std::string id = r.check_id;
        std::string file = id;
        for (char& c : file)
            if (c == '/') c = '-';
        CHECK(slurp(dir1 / (file + ".verdict.json")) == slurp(dir8 / (file + ".verdict.json")));
    }
}

TEST_CASE("verdict files carry the check record") {
    const auto dir = fresh_dir("verdicts");
    json cfg = tiny_extinction_config();
    const auto outcome = run_experiment(parse_config(cfg), dir.string());
    REQUIRE_FALSE(outcome.results.empty());
    bool saw_hitting = false;
    for (const auto& r : outcome.results) {
        if (r.check_id != "extinction/hitting-time") continue;
        saw_hitting = true;
        const json v = json::parse(slurp(dir / "extinction-hitting-time.verdict.json"));
        CHECK(v["check_id"] == "extinction/hitting-time");
        CHECK(v["n_runs"] == 48);
        CHECK(v.contains("statistic"));
        CHECK(v.contains("bound"));
        CHECK(v.contains("ci"));
        CHECK(v["passed"].is_boolean());
    }
    CHECK(saw_hitting);
}

#ifdef SRLSIM_BIN
TEST_CASE("cli exit codes") {
    const auto dir = fresh_dir("cli");
    const std::string bin = SRLSIM_BIN;
    const auto shell = [&](const std::string& cmd) {
        const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
        return WEXITSTATUS(status);
    };

    SUBCASE("list-presets succeeds") { CHECK(shell(bin + " list-presets") == 0); }
    SUBCASE("validate accepts presets and rejects garbage") {
        const auto good = dir / "good.json";
        std::ofstream(good) << preset_config("dominated-single-player").dump();
        CHECK(shell(bin + " validate " + good.string()) == 0);

        const auto bad = dir / "bad.json";
        std::ofstream(bad) << "{ not json";
        CHECK(shell(bin + " validate " + bad.string()) == 2);

        const auto gamma1 = dir / "gamma1.json";
        json cfg = tiny_game_config();
        cfg["schedules"]["gamma"] = 1.0;
        std::ofstream(gamma1) << cfg.dump();
        CHECK(shell(bin + " validate " + gamma1.string()) == 2);
    }
    SUBCASE("run reports check failures with exit 1") {
        // Covariance with an absurd tolerance must fail deterministically.
        json cfg = {
            {"mode", "game"},
            {"game", preset_config("correlated-congestion")["game"]},
            {"kernels", "entropy"},
            {"schedules", {{"form", "constant"}, {"eta0", 1.0}}},
            {"noise", {{"mode", "congestion"}}},
            {"integration", {{"dt", 0.01}, {"horizon", 1.0}, {"thin", 1}}},
            {"outputs", {{"trajectory_csv", false}}},
            {"analysis", json::array({{{"check", "covariance"},
                                       {"n_steps", 20000},
                                       {"tol_se", 1e-9}}})},
        };
        const auto path = dir / "failing.json";
        std::ofstream(path) << cfg.dump();
        CHECK(shell(bin + " run " + path.string() + " --out " + (dir / "f").string()) == 1);

        json ok = cfg;
        ok["analysis"][0]["tol_se"] = 8.0;
        const auto okpath = dir / "passing.json";
        std::ofstream(okpath) << ok.dump();
        CHECK(shell(bin + " run " + okpath.string() + " --out " + (dir / "p").string()) == 0);
    }
}
#endif
