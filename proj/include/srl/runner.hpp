#pragma once

#include <string>
#include <vector>

#include "srl/config.hpp"
#include "srl/experiments.hpp"

namespace srl {

struct RunOutcome {
    std::vector<CheckResult> results;
    std::vector<std::string> files;  // paths written, relative to out_dir
    bool all_passed = true;
};

// Executes the experiment: exports the run-0 series requested by the config,
// runs every analysis check, writes one verdict JSON per check plus any
// summary CSVs, and finishes with a manifest (config hash, seed, tool
// version, resolved config). Outputs land in out_dir (created if missing).
RunOutcome run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

// $SRLSIM_OUT_DIR when set, "out" otherwise.
std::string default_output_dir();

}  // namespace srl
