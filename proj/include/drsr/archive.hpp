#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "drsr/clustering.hpp"
#include "drsr/expression.hpp"
#include "drsr/objectives.hpp"
#include "drsr/rng.hpp"

namespace drsr {

// Grid coordinates of an expression: the cluster it fits worst, its node
// count, and its (capped) transcendental-function count.
struct BehaviorDescriptor {
    int out_cluster = 0;
    int rep_power = 1;   // node count, grid range [1, max_nodes]
    int trans_count = 0; // capped at the grid boundary

    bool operator==(const BehaviorDescriptor&) const = default;
};

// argmax over clusters of the mean absolute (guard-substituted) residual;
// ties break toward the lowest cluster index.
int outlier_cluster_index(std::span<const double> residuals, const ClusterAssignment& assignment);
int outlier_cluster_index(const ExpressionTree& tree, const Dataset& ds,
                          const ClusterAssignment& assignment);

BehaviorDescriptor describe(const ExpressionTree& tree, const Dataset& ds,
                            const ClusterAssignment& assignment, int trans_cap = 4);

struct Elite {
    ExpressionTree tree;
    double fitness = 0.0;
    double loss = 0.0;
    BehaviorDescriptor desc;
};

// MAP-Elites grid over (out_cluster, rep_power, trans_count) at unit
// resolution: clusters x max_nodes x (trans_cap + 1) cells, one elite per
// cell, replaced only on strictly higher fitness.
class Archive {
public:
    Archive() : Archive(10) {}
    explicit Archive(int clusters, int max_nodes = 20, int trans_cap = 4);

    // true iff the cell content changed (insert or strict-improvement replace)
    bool update(const ExpressionTree& tree, double fitness, double loss,
                const BehaviorDescriptor& desc);

    const Elite* cell(const BehaviorDescriptor& desc) const;

    // two independent uniform draws over occupied cells (with replacement);
    // throws std::logic_error on an empty archive
    std::pair<const Elite*, const Elite*> select_two(Rng& rng) const;

    int occupied() const { return static_cast<int>(occupied_cells_.size()); }
    int total_cells() const { return static_cast<int>(cells_.size()); }
    double best_fitness() const { return best_fitness_; } // 0 when empty
    std::uint64_t update_attempts() const { return update_attempts_; }
    int clusters() const { return clusters_; }
    int max_nodes() const { return max_nodes_; }
    int trans_cap() const { return trans_cap_; }

    std::vector<const Elite*> elites() const;

private:
    std::size_t cell_index(const BehaviorDescriptor& desc) const;

    int clusters_;
    int max_nodes_;
    int trans_cap_;
    std::vector<std::optional<Elite>> cells_;
    std::vector<std::size_t> occupied_cells_; // insertion order, never shrinks
    double best_fitness_ = 0.0;
    std::uint64_t update_attempts_ = 0;
};

// Combined evaluation used by the search loops: one pass over the dataset
// yields loss, fitness, and the behavior descriptor.
struct ScoredEvaluation {
    double loss = 0.0;
    double fitness = 0.0;
    BehaviorDescriptor desc;
};

ScoredEvaluation evaluate_and_describe(const ExpressionTree& tree, const Dataset& ds,
                                       LossKind kind, const ClusterAssignment& assignment,
                                       int trans_cap = 4);

// JSON Lines snapshot format shared by the archive export and the
// population snapshots of the baseline methods.
struct ArchiveRecord {
    int out_cluster = 0;
    int rep_power = 1;
    int trans_count = 0;
    double fitness = 0.0;
    double loss = 0.0;
    std::string expr;
    std::vector<double> weights;
};

std::vector<ArchiveRecord> to_records(const Archive& archive);
ArchiveRecord make_record(const ExpressionTree& tree, double fitness, double loss,
                          const BehaviorDescriptor& desc);

// meta_line, when non-empty, is written first (a JSON object line carrying
// run metadata); the reader skips any record containing a "meta" key.
void write_records_jsonl(std::ostream& out, std::span<const ArchiveRecord> records,
                         const std::string& meta_line = {});
std::vector<ArchiveRecord> read_records_jsonl(std::istream& in);

Archive archive_from_records(std::span<const ArchiveRecord> records, int clusters = 10,
                             int max_nodes = 20, int trans_cap = 4);

} // namespace drsr
