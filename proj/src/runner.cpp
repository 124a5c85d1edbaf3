#include "drsr/runner.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

#include "drsr/rng.hpp"

namespace drsr {

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct MetricColumn {
    std::string name;
    double TraceRow::* field;
};

const MetricColumn kColumns[] = {
    {"best_fitness", &TraceRow::best_fitness},
    {"coverage", &TraceRow::coverage},
    {"qd_score", &TraceRow::qd_score},
    {"hv", &TraceRow::hypervolume},
    {"acc_base", &TraceRow::acc_base},
    {"acc_linear", &TraceRow::acc_linear},
    {"acc_logistic", &TraceRow::acc_logistic},
};

bool metric_present(const RunTrace& trace, const MetricColumn& col) {
    // subset metrics are NaN throughout when the dataset lacks the labels
    for (const auto& row : trace.rows)
        if (!std::isnan(row.*col.field)) return true;
    return false;
}

} // namespace

std::vector<std::string> trace_metric_names(const RunTrace& trace) {
    std::vector<std::string> names;
    for (const auto& col : kColumns)
        if (metric_present(trace, col)) names.push_back(col.name);
    return names;
}

std::filesystem::path trial_dir_name(const std::filesystem::path& out_dir, int trial) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "trial_%03d", trial);
    return out_dir / buf;
}

void write_trial_outputs(const RunTrace& trace, const std::filesystem::path& dir,
                         const std::string& hash, std::uint64_t trial_seed) {
    std::filesystem::create_directories(dir);
    const std::string meta_comment =
        "# config_hash=" + hash + " seed=" + std::to_string(trial_seed);

    for (const auto& col : kColumns) {
        if (!metric_present(trace, col)) continue;
        std::ofstream out(dir / (col.name + ".csv"));
        out << meta_comment << "\n";
        out << "generation,evaluations,value\n";
        for (const auto& row : trace.rows)
            out << row.generation << "," << row.evaluations << ","
                << format_double(row.*col.field) << "\n";
    }

    std::ofstream snap(dir / "snapshot.jsonl");
    nlohmann::json meta;
    meta["meta"] = {{"config_hash", hash},
                    {"seed", trial_seed},
                    {"evaluations", trace.evaluations_used},
                    {"records", "archive"}};
    const auto records = to_records(trace.archive);
    write_records_jsonl(snap, records, meta.dump());
}

void run_trials(const RunSpec& spec, const RunnerOptions& options) {
    std::filesystem::create_directories(options.out_dir);
    const nlohmann::json canonical = run_spec_to_json(spec);
    const std::string hash = config_hash(canonical);

    nlohmann::json meta;
    meta["config"] = canonical;
    meta["config_hash"] = hash;
    nlohmann::json trial_seeds = nlohmann::json::array();
    for (int t = 0; t < spec.trials; ++t)
        trial_seeds.push_back(spec.engine.seed + static_cast<std::uint64_t>(t));
    meta["trial_seeds"] = trial_seeds;
    {
        std::ofstream out(options.out_dir / "run_meta.json");
        out << meta.dump(2) << "\n";
    }

    auto run_one = [&](int trial) {
        const std::uint64_t trial_seed = spec.engine.seed + static_cast<std::uint64_t>(trial);
        EngineConfig cfg = spec.engine;
        cfg.seed = trial_seed;
        const Dataset ds = materialize_dataset(spec.dataset, trial_seed);
        const RunTrace trace = run_search(cfg, ds);
        write_trial_outputs(trace, trial_dir_name(options.out_dir, trial), hash, trial_seed);
    };

    const int jobs = std::max(1, options.jobs);
    if (jobs == 1 || spec.trials == 1) {
        for (int t = 0; t < spec.trials; ++t) run_one(t);
        return;
    }
    std::vector<std::thread> workers;
    std::atomic<int> next{0};
    for (int w = 0; w < std::min(jobs, spec.trials); ++w) {
        workers.emplace_back([&] {
            for (int t = next.fetch_add(1); t < spec.trials; t = next.fetch_add(1)) run_one(t);
        });
    }
    for (auto& th : workers) th.join();
}

} // namespace drsr
