#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "drsr/datasets.hpp"

namespace drsr {

// Fixed partition of the dataset rows computed once before a search. Labels
// index into {0, ..., k-1}; centroids live in the rescaled [0,1]^{d+1} space.
struct ClusterAssignment {
    int k = 0;
    std::vector<int> labels;
    std::vector<std::vector<double>> centroids;
    std::vector<std::pair<double, double>> rescale_min_max; // per column, inputs then target
};

// Affine per-column rescale of the joint input-output space into [0,1]^{d+1};
// a constant column maps to 0.5.
std::vector<std::vector<double>> rescale_points(const Dataset& ds,
                                                std::vector<std::pair<double, double>>* min_max = nullptr);

struct KmeansResult {
    std::vector<int> labels;
    std::vector<std::vector<double>> centroids;
    std::vector<double> sse_history; // within-cluster SSE after each assignment step
    int iterations = 0;
};

// Lloyd's algorithm with k-means++ seeding. Ties in the nearest-centroid
// assignment break toward the lowest centroid index; a cluster left empty is
// re-seeded at the point farthest from its own assigned centroid. Stops on a
// stable assignment or after 300 iterations. Throws when n < k.
KmeansResult kmeans(const std::vector<std::vector<double>>& points, int k, std::uint64_t seed);

ClusterAssignment cluster_dataset(const Dataset& ds, int k, std::uint64_t seed);

// CSV export: "row_index,cluster" per row.
void write_assignment_csv(const ClusterAssignment& assignment, std::ostream& out);

} // namespace drsr
