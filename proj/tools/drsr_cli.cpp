#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "drsr/aggregate.hpp"
#include "drsr/config.hpp"
#include "drsr/query.hpp"
#include "drsr/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

bool parse_range(const std::string& text, int& lo, int& hi) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) return false;
    try {
        lo = std::stoi(text.substr(0, colon));
        hi = std::stoi(text.substr(colon + 1));
    } catch (const std::exception&) {
        return false;
    }
    return lo <= hi;
}

int cmd_run(const std::string& config_path, const std::string& out_dir, int trials_override,
            int jobs) {
    drsr::RunSpec spec;
    try {
        spec = drsr::load_run_spec(config_path);
    } catch (const drsr::ConfigError& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitRuntime;
    }
    if (trials_override > 0) spec.trials = trials_override;

    try {
        drsr::RunnerOptions opts;
        opts.out_dir = out_dir;
        opts.jobs = jobs;
        drsr::run_trials(spec, opts);
    } catch (const std::exception& ex) {
        std::cerr << "run failed: " << ex.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

int cmd_aggregate(const std::string& in_dir, const std::string& out_csv, int resamples,
                  std::uint64_t seed) {
    try {
        drsr::AggregateOptions opts;
        opts.resamples = resamples;
        opts.seed = seed;
        drsr::aggregate_directory(in_dir, out_csv, opts);
    } catch (const std::exception& ex) {
        std::cerr << "aggregate failed: " << ex.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

int cmd_query(const std::string& archive_path, const std::string& rep, const std::string& trans,
              const std::string& clusters, int top_k) {
    drsr::QueryFilter filter;
    filter.top_k = top_k;
    if (!rep.empty() && !parse_range(rep, filter.rep_lo, filter.rep_hi)) {
        std::cerr << "config error: --rep expects a:b with a <= b\n";
        return kExitValidation;
    }
    if (!trans.empty() && !parse_range(trans, filter.trans_lo, filter.trans_hi)) {
        std::cerr << "config error: --trans expects a:b with a <= b\n";
        return kExitValidation;
    }
    if (!clusters.empty()) {
        std::vector<int> ids;
        std::stringstream ss(clusters);
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                ids.push_back(std::stoi(item));
            } catch (const std::exception&) {
                std::cerr << "config error: --clusters expects a comma-separated integer list\n";
                return kExitValidation;
            }
        }
        filter.clusters = std::move(ids);
    }

    std::vector<drsr::ArchiveRecord> records;
    try {
        std::ifstream in(archive_path);
        if (!in) throw std::runtime_error("cannot open archive file: " + archive_path);
        records = drsr::read_records_jsonl(in);
    } catch (const std::exception& ex) {
        std::cerr << "query failed: " << ex.what() << "\n";
        return kExitRuntime;
    }

    const auto rows = drsr::query_records(std::move(records), filter);
    std::cout << "rank,fitness,loss,out_cluster,rep_power,trans_count,expr,weights\n";
    char num[40];
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        std::snprintf(num, sizeof(num), "%.17g", r.fitness);
        std::cout << (i + 1) << "," << num << ",";
        std::snprintf(num, sizeof(num), "%.17g", r.loss);
        std::cout << num << "," << r.out_cluster << "," << r.rep_power << "," << r.trans_count
                  << ",\"" << r.expr << "\",\"";
        for (std::size_t w = 0; w < r.weights.size(); ++w) {
            std::snprintf(num, sizeof(num), "%.17g", r.weights[w]);
            std::cout << (w ? ";" : "") << num;
        }
        std::cout << "\"\n";
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"symbolic-regression search with a residual-diversity archive"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int trials = 0, jobs = 1;
    auto* run = app.add_subcommand("run", "run configured trials");
    run->add_option("--config", config_path, "JSON experiment configuration")->required();
    run->add_option("--out", out_dir, "output directory")->required();
    run->add_option("--trials", trials, "override the configured trial count");
    run->add_option("--jobs", jobs, "concurrent trials");

    std::string in_dir, out_csv;
    int resamples = 10000;
    std::uint64_t agg_seed = 12345;
    auto* agg = app.add_subcommand("aggregate", "summarize trial traces with bootstrap CIs");
    agg->add_option("--in", in_dir, "directory containing trial_* subdirectories")->required();
    agg->add_option("--out", out_csv, "summary CSV path")->required();
    agg->add_option("--resamples", resamples, "bootstrap resample count");
    agg->add_option("--seed", agg_seed, "bootstrap RNG seed");

    std::string archive_path, rep_range, trans_range, cluster_list;
    int top_k = 6;
    auto* query = app.add_subcommand("query", "filter an archive snapshot by descriptor box");
    query->add_option("--archive", archive_path, "archive JSONL path")->required();
    query->add_option("--rep", rep_range, "node-count range a:b");
    query->add_option("--trans", trans_range, "transcendental-count range a:b");
    query->add_option("--clusters", cluster_list, "comma-separated outlier cluster indices");
    query->add_option("--top", top_k, "rows to return");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    if (run->parsed()) return cmd_run(config_path, out_dir, trials, jobs);
    if (agg->parsed()) return cmd_aggregate(in_dir, out_csv, resamples, agg_seed);
    if (query->parsed()) return cmd_query(archive_path, rep_range, trans_range, cluster_list, top_k);
    return kExitValidation;
}
