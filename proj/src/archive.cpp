#include "drsr/archive.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace drsr {

int outlier_cluster_index(std::span<const double> residuals, const ClusterAssignment& assignment) {
    const int k = assignment.k;
    std::vector<double> sum(static_cast<std::size_t>(k), 0.0);
    std::vector<int> count(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < residuals.size(); ++i) {
        const auto c = static_cast<std::size_t>(assignment.labels[i]);
        sum[c] += std::abs(residuals[i]);
        ++count[c];
    }
    int best = 0;
    double best_mean = -1.0;
    for (int c = 0; c < k; ++c) {
        const auto cs = static_cast<std::size_t>(c);
        if (count[cs] == 0) continue; // empty clusters cannot be the argmax
        const double mean = sum[cs] / count[cs];
        if (mean > best_mean) {
            best_mean = mean;
            best = c;
        }
    }
    return best;
}

int outlier_cluster_index(const ExpressionTree& tree, const Dataset& ds,
                          const ClusterAssignment& assignment) {
    return outlier_cluster_index(residuals(tree, ds), assignment);
}

BehaviorDescriptor describe(const ExpressionTree& tree, const Dataset& ds,
                            const ClusterAssignment& assignment, int trans_cap) {
    BehaviorDescriptor d;
    d.out_cluster = outlier_cluster_index(tree, ds, assignment);
    d.rep_power = tree.node_count();
    d.trans_count = std::min(tree.transcendental_count(), trans_cap);
    return d;
}

Archive::Archive(int clusters, int max_nodes, int trans_cap)
    : clusters_(clusters), max_nodes_(max_nodes), trans_cap_(trans_cap),
      cells_(static_cast<std::size_t>(clusters) * static_cast<std::size_t>(max_nodes) *
             static_cast<std::size_t>(trans_cap + 1)) {}

std::size_t Archive::cell_index(const BehaviorDescriptor& desc) const {
    const auto c = static_cast<std::size_t>(desc.out_cluster);
    const auto r = static_cast<std::size_t>(desc.rep_power - 1);
    const auto t = static_cast<std::size_t>(desc.trans_count);
    return (c * static_cast<std::size_t>(max_nodes_) + r) * static_cast<std::size_t>(trans_cap_ + 1) + t;
}

bool Archive::update(const ExpressionTree& tree, double fitness, double loss,
                     const BehaviorDescriptor& desc) {
    ++update_attempts_;
    if (desc.out_cluster < 0 || desc.out_cluster >= clusters_ || desc.rep_power < 1 ||
        desc.rep_power > max_nodes_ || desc.trans_count < 0 || desc.trans_count > trans_cap_)
        throw std::out_of_range("behavior descriptor outside archive bounds");

    const std::size_t idx = cell_index(desc);
    auto& cell = cells_[idx];
    if (cell && fitness <= cell->fitness) return false; // strict improvement only
    if (!cell) occupied_cells_.push_back(idx);
    cell = Elite{tree, fitness, loss, desc};
    best_fitness_ = std::max(best_fitness_, fitness);
    return true;
}

const Elite* Archive::cell(const BehaviorDescriptor& desc) const {
    const auto& c = cells_[cell_index(desc)];
    return c ? &*c : nullptr;
}

std::pair<const Elite*, const Elite*> Archive::select_two(Rng& rng) const {
    if (occupied_cells_.empty()) throw std::logic_error("selection from an empty archive");
    const Elite* a = &*cells_[occupied_cells_[rng.uniform_index(occupied_cells_.size())]];
    const Elite* b = &*cells_[occupied_cells_[rng.uniform_index(occupied_cells_.size())]];
    return {a, b};
}

std::vector<const Elite*> Archive::elites() const {
    std::vector<const Elite*> out;
    out.reserve(occupied_cells_.size());
    for (std::size_t idx : occupied_cells_) out.push_back(&*cells_[idx]);
    return out;
}

ScoredEvaluation evaluate_and_describe(const ExpressionTree& tree, const Dataset& ds,
                                       LossKind kind, const ClusterAssignment& assignment,
                                       int trans_cap) {
    const auto r = residuals(tree, ds);
    ScoredEvaluation ev;
    ev.loss = loss_from_residuals(kind, r);
    ev.fitness = fitness_from_loss(ev.loss);
    ev.desc.out_cluster = outlier_cluster_index(r, assignment);
    ev.desc.rep_power = tree.node_count();
    ev.desc.trans_count = std::min(tree.transcendental_count(), trans_cap);
    return ev;
}

ArchiveRecord make_record(const ExpressionTree& tree, double fitness, double loss,
                          const BehaviorDescriptor& desc) {
    ArchiveRecord rec;
    rec.out_cluster = desc.out_cluster;
    rec.rep_power = desc.rep_power;
    rec.trans_count = desc.trans_count;
    rec.fitness = fitness;
    rec.loss = loss;
    rec.expr = tree.to_text();
    rec.weights = tree.weights_vector();
    return rec;
}

std::vector<ArchiveRecord> to_records(const Archive& archive) {
    std::vector<ArchiveRecord> out;
    for (const Elite* e : archive.elites())
        out.push_back(make_record(e->tree, e->fitness, e->loss, e->desc));
    return out;
}

void write_records_jsonl(std::ostream& out, std::span<const ArchiveRecord> records,
                         const std::string& meta_line) {
    if (!meta_line.empty()) out << meta_line << "\n";
    for (const auto& r : records) {
        nlohmann::json j;
        j["out_cluster"] = r.out_cluster;
        j["rep_power"] = r.rep_power;
        j["trans_count"] = r.trans_count;
        j["fitness"] = r.fitness;
        j["loss"] = r.loss;
        j["expr"] = r.expr;
        j["weights"] = r.weights;
        out << j.dump() << "\n";
    }
}

std::vector<ArchiveRecord> read_records_jsonl(std::istream& in) {
    std::vector<ArchiveRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line);
        if (j.contains("meta")) continue;
        ArchiveRecord r;
        r.out_cluster = j.at("out_cluster").get<int>();
        r.rep_power = j.at("rep_power").get<int>();
        r.trans_count = j.at("trans_count").get<int>();
        r.fitness = j.at("fitness").get<double>();
        r.loss = j.at("loss").get<double>();
        r.expr = j.at("expr").get<std::string>();
        r.weights = j.at("weights").get<std::vector<double>>();
        out.push_back(std::move(r));
    }
    return out;
}

Archive archive_from_records(std::span<const ArchiveRecord> records, int clusters, int max_nodes,
                             int trans_cap) {
    Archive a(clusters, max_nodes, trans_cap);
    for (const auto& r : records) {
        BehaviorDescriptor d{r.out_cluster, r.rep_power, r.trans_count};
        a.update(ExpressionTree::parse(r.expr), r.fitness, r.loss, d);
    }
    return a;
}

} // namespace drsr
