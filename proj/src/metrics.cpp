#include "drsr/metrics.hpp"

#include <algorithm>
#include <vector>

#include "drsr/objectives.hpp"

namespace drsr {

double subset_accuracy(const ExpressionTree& tree, const Dataset& subset) {
    return fitness(LossKind::MSE, tree, subset);
}

double coverage(const Archive& archive) {
    return static_cast<double>(archive.occupied()) / archive.total_cells();
}

double qd_score(const Archive& archive) {
    std::vector<double> fits;
    fits.reserve(static_cast<std::size_t>(archive.occupied()));
    for (const Elite* e : archive.elites()) fits.push_back(e->fitness);
    return pairwise_sum(fits) / archive.total_cells();
}

double hypervolume(std::span<const std::pair<double, double>> points,
                   std::pair<double, double> reference) {
    const auto [ref_f, ref_c] = reference;
    std::vector<std::pair<double, double>> pts;
    pts.reserve(points.size());
    for (const auto& [f, c] : points)
        if (f > ref_f && c < ref_c) pts.emplace_back(f, c);
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first; // fitness descending
        return a.second < b.second;
    });

    double area = 0.0;
    double best_c = ref_c;
    for (const auto& [f, c] : pts) {
        if (c < best_c) {
            area += (f - ref_f) * (best_c - c);
            best_c = c;
        }
    }
    return area;
}

} // namespace drsr
