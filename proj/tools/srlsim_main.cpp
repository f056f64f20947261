#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "srl/config.hpp"
#include "srl/errors.hpp"
#include "srl/runner.hpp"
#include "srl/version.hpp"

namespace {

using nlohmann::json;

constexpr int kExitCheckFailure = 1;
constexpr int kExitParseFailure = 2;
constexpr int kExitRuntimeFailure = 3;

void print_error(const std::string& type, const std::string& message) {
    const json record = {{"error", {{"type", type}, {"message", message}}}};
    std::cerr << record.dump() << "\n";
}

json load_document(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw srl::ConfigError("cannot open config file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw srl::ConfigError("config is not valid JSON: " + std::string(e.what()));
    }
    return doc;
}

int do_run(const std::string& config_path, const std::string& preset,
           const std::string& out_dir, std::int64_t seed, int workers) {
    json doc;
    try {
        doc = preset.empty() ? load_document(config_path) : srl::preset_config(preset);
        if (doc.contains("config")) doc = doc["config"];  // manifest round-trip
        if (seed >= 0) doc["ensemble"]["master_seed"] = static_cast<std::uint64_t>(seed);
        if (workers >= 0) doc["ensemble"]["workers"] = workers;
    } catch (const srl::ConfigError& e) {
        print_error("parse", e.what());
        return kExitParseFailure;
    }

    srl::ExperimentConfig cfg;
    try {
        cfg = srl::parse_config(doc);
    } catch (const srl::ConfigError& e) {
        print_error("parse", e.what());
        return kExitParseFailure;
    }

    try {
        const std::string dir = out_dir.empty() ? srl::default_output_dir() : out_dir;
        const srl::RunOutcome outcome = srl::run_experiment(cfg, dir);
        for (const auto& r : outcome.results)
            std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << r.check_id
                      << "  statistic=" << r.statistic << "  bound=" << r.bound
                      << "  n=" << r.n_runs << "\n";
        std::cout << outcome.files.size() << " file(s) written to " << dir << "\n";
        if (!outcome.all_passed) {
            print_error("check", "one or more analysis checks failed");
            return kExitCheckFailure;
        }
        return 0;
    } catch (const srl::ConfigError& e) {
        print_error("parse", e.what());
        return kExitParseFailure;
    } catch (const std::exception& e) {
        print_error("runtime", e.what());
        return kExitRuntimeFailure;
    }
}

int do_validate(const std::string& config_path) {
    try {
        srl::parse_config(load_document(config_path));
        std::cout << "ok\n";
        return 0;
    } catch (const srl::ConfigError& e) {
        print_error("parse", e.what());
        return kExitParseFailure;
    }
}

int do_list_presets() {
    for (const auto& info : srl::list_presets())
        std::cout << info.name << "\t" << info.description << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(srl::kToolName) +
                 " - stochastic learning dynamics in finite games"};
    app.set_version_flag("--version", srl::kToolVersion);
    app.require_subcommand(1);

    std::string config_path, preset, out_dir;
    std::int64_t seed = -1;
    int workers = -1;

    auto* run = app.add_subcommand("run", "run an experiment config or preset");
    run->add_option("config", config_path, "experiment config (JSON) or manifest");
    run->add_option("--preset", preset, "built-in scenario name");
    run->add_option("--out", out_dir, "output directory (default $SRLSIM_OUT_DIR or ./out)");
    run->add_option("--seed", seed, "override the ensemble master seed");
    run->add_option("--workers", workers, "override the worker thread count");

    auto* validate = app.add_subcommand("validate", "parse and validate a config");
    validate->add_option("config", config_path, "experiment config (JSON)")->required();

    app.add_subcommand("list-presets", "list built-in scenarios");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        if (config_path.empty() == preset.empty()) {
            print_error("parse", "run needs exactly one of <config> or --preset");
            return kExitParseFailure;
        }
        return do_run(config_path, preset, out_dir, seed, workers);
    }
    if (validate->parsed()) return do_validate(config_path);
    return do_list_presets();
}
