#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "drsr/config.hpp"

namespace drsr {

struct RunnerOptions {
    std::filesystem::path out_dir;
    int jobs = 1; // trial-level parallelism; never changes outputs
};

// Executes the configured trials and writes, per trial, one CSV per metric
// (generation,evaluations,value) plus a snapshot.jsonl, along with a
// run_meta.json at the top level. Trial k runs with seed base_seed + k and
// is internally sequential, so outputs are byte-identical for any `jobs`.
void run_trials(const RunSpec& spec, const RunnerOptions& options);

// metric names in the order their CSVs are written
std::vector<std::string> trace_metric_names(const RunTrace& trace);

std::filesystem::path trial_dir_name(const std::filesystem::path& out_dir, int trial);

// writes <dir>/<metric>.csv files + snapshot.jsonl for one finished trial
void write_trial_outputs(const RunTrace& trace, const std::filesystem::path& dir,
                         const std::string& hash, std::uint64_t trial_seed);

} // namespace drsr
