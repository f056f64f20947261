#pragma once

#include <functional>

namespace srl {

int default_workers();

// Runs body(0..n_runs-1) across `workers` threads (0 = hardware default).
// Run indices are pulled from a shared counter; each body call must write
// only to its own output slot, which keeps results independent of the
// worker count and of scheduling order. Exceptions are captured and
// rethrown on the calling thread.
void parallel_runs(int n_runs, int workers, const std::function<void(int)>& body);

}  // namespace srl
