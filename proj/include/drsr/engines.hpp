#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "drsr/archive.hpp"
#include "drsr/budget.hpp"
#include "drsr/clustering.hpp"
#include "drsr/cmaes.hpp"
#include "drsr/datasets.hpp"
#include "drsr/objectives.hpp"
#include "drsr/variation.hpp"

namespace drsr {

enum class Method { DRSR, SR, MOSR };

std::string method_name(Method m);
Method method_from_name(const std::string& name); // throws on unknown

struct EngineConfig {
    Method method = Method::DRSR;
    LossKind loss = LossKind::MedAE;
    std::uint64_t budget = 100000;
    int population = 1000;
    std::uint64_t seed = 1;
    int clusters = 10;
    TreeLimits limits;
    int trans_cap = 4;
    double crossover_rate = 0.9;
    double mutation_rate = 0.1;
    EsConfig es;
    int tournament = 3;    // SR parent selection
    int trace_stride = 1000; // offspring between trace rows (aligns with one baseline generation)
    int probe_count = 32;  // simplification probe set size
};

struct TraceRow {
    std::int64_t generation = 0;
    std::uint64_t evaluations = 0;
    double best_fitness = 0.0;
    double coverage = 0.0;
    double qd_score = 0.0;
    double hypervolume = 0.0;
    // NaN when the dataset has no such labeled subset
    double acc_base = std::numeric_limits<double>::quiet_NaN();
    double acc_linear = std::numeric_limits<double>::quiet_NaN();
    double acc_logistic = std::numeric_limits<double>::quiet_NaN();
};

struct PopMember {
    ExpressionTree tree;
    double loss = 0.0;
    double fitness = 0.0;
    BehaviorDescriptor desc;
};

struct RunTrace {
    std::vector<TraceRow> rows;
    std::uint64_t evaluations_used = 0;
    Archive archive;                  // the search archive (DRSR) or the final
                                      // population's temporary archive (SR/MOSR)
    std::vector<PopMember> population; // final population, SR/MOSR only
    ClusterAssignment assignment;
};

RunTrace run_drsr(const EngineConfig& config, const Dataset& ds);
RunTrace run_sr(const EngineConfig& config, const Dataset& ds);
RunTrace run_mosr(const EngineConfig& config, const Dataset& ds);
RunTrace run_search(const EngineConfig& config, const Dataset& ds);

// --- NSGA-II machinery (MOSR), exposed for direct testing ---

// (fitness maximized, node count minimized)
bool dominates_fitness_nodes(double fitness_a, int nodes_a, double fitness_b, int nodes_b);

// fronts of indices, rank 0 first
std::vector<std::vector<int>> fast_non_dominated_sort(std::span<const std::pair<double, int>> objectives);

std::vector<double> crowding_distances(std::span<const std::pair<double, int>> objectives,
                                       std::span<const int> front);

// index of the best of `size` uniform draws (ties keep the earlier draw)
int tournament_select(std::span<const double> fitness, int size, Rng& rng);

} // namespace drsr
