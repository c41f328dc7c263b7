#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "nelsonlab/report.hpp"
#include "nelsonlab/scenario.hpp"

namespace nelson {

using ExperimentFn = std::function<RunResult(const Scenario&)>;

// All registered experiments, keyed by id. Each takes the scenario with its
// per-experiment override patch already applied.
const std::map<std::string, ExperimentFn>& experiment_registry();
std::vector<std::string> experiment_ids();

// Applies the scenario's override patch for `id` and runs that experiment.
RunResult run_experiment(const std::string& id, const Scenario& scenario);

// Runs the scenario's experiment list (optionally filtered), possibly across
// threads. Results land in list order regardless of the thread count, and
// every experiment derives its randomness from the scenario seed, so serial
// and parallel runs produce identical numbers.
std::vector<RunResult> run_scenario(const Scenario& scenario,
                                    const std::vector<std::string>& only, int threads);

// Index-parallel loop with a shared work queue; exceptions are rethrown on
// the calling thread after all workers join.
void parallel_for(long count, int threads, const std::function<void(long)>& fn);

}  // namespace nelson
