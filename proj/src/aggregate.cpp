#include "drsr/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace drsr {

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double value_at(const MetricSeries& series, std::uint64_t evaluations) {
    // last observation at or before `evaluations`; first value before that
    double v = series.front().second;
    for (const auto& [e, x] : series) {
        if (e > evaluations) break;
        v = x;
    }
    return v;
}

} // namespace

std::array<double, 3> bootstrap_mean_ci(std::span<const double> values, int resamples, Rng& rng) {
    const std::size_t n = values.size();
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);

    std::vector<double> means(static_cast<std::size_t>(resamples));
    for (auto& m : means) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += values[rng.uniform_index(n)];
        m = s / static_cast<double>(n);
    }
    std::sort(means.begin(), means.end());
    const auto lo_idx = static_cast<std::size_t>(std::floor(0.025 * (resamples - 1)));
    const auto hi_idx = static_cast<std::size_t>(std::ceil(0.975 * (resamples - 1)));
    return {mean, means[lo_idx], means[hi_idx]};
}

std::vector<SummaryRow> aggregate_metric(const std::string& name,
                                         const std::vector<MetricSeries>& trials,
                                         const AggregateOptions& options) {
    std::set<std::uint64_t> grid;
    for (const auto& t : trials)
        for (const auto& [e, v] : t) grid.insert(e);

    Rng rng(options.seed);
    std::vector<SummaryRow> rows;
    std::vector<double> values(trials.size());
    for (const std::uint64_t e : grid) {
        for (std::size_t t = 0; t < trials.size(); ++t) values[t] = value_at(trials[t], e);
        const auto [mean, lo, hi] = bootstrap_mean_ci(values, options.resamples, rng);
        rows.push_back(SummaryRow{name, e, mean, lo, hi});
    }
    return rows;
}

MetricSeries read_metric_csv(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open trace file: " + file.string());
    MetricSeries series;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (line.rfind("generation,", 0) == 0) continue; // header
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw std::runtime_error("malformed trace row in " + file.string());
        series.emplace_back(std::stoull(line.substr(c1 + 1, c2 - c1 - 1)),
                            std::stod(line.substr(c2 + 1)));
    }
    if (series.empty()) throw std::runtime_error("empty trace file: " + file.string());
    return series;
}

void aggregate_directory(const std::filesystem::path& trace_dir,
                         const std::filesystem::path& out_csv, const AggregateOptions& options) {
    std::vector<std::filesystem::path> trial_dirs;
    for (const auto& entry : std::filesystem::directory_iterator(trace_dir)) {
        if (entry.is_directory() && entry.path().filename().string().rfind("trial_", 0) == 0)
            trial_dirs.push_back(entry.path());
    }
    std::sort(trial_dirs.begin(), trial_dirs.end());
    if (trial_dirs.size() < 2)
        throw std::runtime_error("aggregation requires at least two trial directories under " +
                                 trace_dir.string());

    // metric list from the first trial's files, sorted for stable output
    std::vector<std::string> metrics;
    for (const auto& entry : std::filesystem::directory_iterator(trial_dirs.front())) {
        const auto name = entry.path().filename().string();
        if (name.size() > 4 && name.substr(name.size() - 4) == ".csv")
            metrics.push_back(name.substr(0, name.size() - 4));
    }
    std::sort(metrics.begin(), metrics.end());

    std::string hash = "unknown";
    if (std::filesystem::exists(trace_dir / "run_meta.json")) {
        std::ifstream in(trace_dir / "run_meta.json");
        nlohmann::json meta;
        in >> meta;
        if (meta.contains("config_hash")) hash = meta["config_hash"].get<std::string>();
    }

    std::ofstream out(out_csv);
    if (!out) throw std::runtime_error("cannot write summary: " + out_csv.string());
    out << "# config_hash=" << hash << " seed=" << options.seed << "\n";
    out << "metric,evaluations,mean,ci_low,ci_high\n";
    for (const auto& metric : metrics) {
        std::vector<MetricSeries> trials;
        trials.reserve(trial_dirs.size());
        for (const auto& dir : trial_dirs) trials.push_back(read_metric_csv(dir / (metric + ".csv")));
        for (const auto& row : aggregate_metric(metric, trials, options))
            out << row.metric << "," << row.evaluations << "," << format_double(row.mean) << ","
                << format_double(row.ci_low) << "," << format_double(row.ci_high) << "\n";
    }
}

} // namespace drsr
