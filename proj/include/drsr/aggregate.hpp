#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "drsr/rng.hpp"

namespace drsr {

struct AggregateOptions {
    int resamples = 10000;
    std::uint64_t seed = 12345;
};

// one trial's trace of a metric: (evaluations, value), evaluations ascending
using MetricSeries = std::vector<std::pair<std::uint64_t, double>>;

struct SummaryRow {
    std::string metric;
    std::uint64_t evaluations = 0;
    double mean = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

// {mean, lo, hi}: plain mean plus the 2.5/97.5 percentile interval of the
// bootstrap resample means
std::array<double, 3> bootstrap_mean_ci(std::span<const double> values, int resamples, Rng& rng);

// Aligns trials on the union of their evaluation points (last observation
// carried forward, first value carried backward) and summarizes each point.
std::vector<SummaryRow> aggregate_metric(const std::string& name,
                                         const std::vector<MetricSeries>& trials,
                                         const AggregateOptions& options);

// Reads trial_*/<metric>.csv under `trace_dir` (sorted by directory name, so
// the result is independent of enumeration order) and writes the summary
// CSV. Throws std::runtime_error when fewer than two trials are found.
void aggregate_directory(const std::filesystem::path& trace_dir,
                         const std::filesystem::path& out_csv, const AggregateOptions& options);

MetricSeries read_metric_csv(const std::filesystem::path& file);

} // namespace drsr
