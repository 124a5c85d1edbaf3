#include "drsr/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "drsr/rng.hpp"

namespace drsr {

std::vector<std::vector<double>> rescale_points(const Dataset& ds,
                                                std::vector<std::pair<double, double>>* min_max) {
    const int cols = ds.input_dim + 1;
    std::vector<std::pair<double, double>> mm(
        static_cast<std::size_t>(cols),
        {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()});

    auto value = [&](std::size_t row, int col) {
        return col < ds.input_dim
                   ? ds.inputs[row * static_cast<std::size_t>(ds.input_dim) +
                               static_cast<std::size_t>(col)]
                   : ds.targets[row];
    };

    for (std::size_t i = 0; i < ds.size(); ++i)
        for (int c = 0; c < cols; ++c) {
            mm[static_cast<std::size_t>(c)].first =
                std::min(mm[static_cast<std::size_t>(c)].first, value(i, c));
            mm[static_cast<std::size_t>(c)].second =
                std::max(mm[static_cast<std::size_t>(c)].second, value(i, c));
        }

    std::vector<std::vector<double>> pts(ds.size(), std::vector<double>(static_cast<std::size_t>(cols)));
    for (std::size_t i = 0; i < ds.size(); ++i)
        for (int c = 0; c < cols; ++c) {
            const auto [lo, hi] = mm[static_cast<std::size_t>(c)];
            pts[i][static_cast<std::size_t>(c)] =
                hi > lo ? (value(i, c) - lo) / (hi - lo) : 0.5;
        }

    if (min_max) *min_max = std::move(mm);
    return pts;
}

namespace {

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

std::vector<std::vector<double>> kmeanspp_seed(const std::vector<std::vector<double>>& pts, int k,
                                               Rng& rng) {
    const std::size_t n = pts.size();
    std::vector<std::vector<double>> centroids;
    centroids.reserve(static_cast<std::size_t>(k));
    std::vector<bool> chosen(n, false);

    std::size_t first = rng.uniform_index(n);
    centroids.push_back(pts[first]);
    chosen[first] = true;

    std::vector<double> d2(n);
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& ctr : centroids) best = std::min(best, sq_dist(pts[i], ctr));
            d2[i] = best;
            total += best;
        }
        std::size_t pick = n;
        if (total > 0.0) {
            const double r = rng.uniform01() * total;
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc >= r) {
                    pick = i;
                    break;
                }
            }
            if (pick == n) pick = n - 1;
        } else {
            // all points coincide with existing centroids: take the lowest
            // unchosen index so seeding stays deterministic
            for (std::size_t i = 0; i < n; ++i)
                if (!chosen[i]) {
                    pick = i;
                    break;
                }
            if (pick == n) pick = 0;
        }
        centroids.push_back(pts[pick]);
        chosen[pick] = true;
    }
    return centroids;
}

} // namespace

KmeansResult kmeans(const std::vector<std::vector<double>>& points, int k, std::uint64_t seed) {
    const std::size_t n = points.size();
    if (k <= 0) throw std::invalid_argument("kmeans requires k >= 1");
    if (n < static_cast<std::size_t>(k))
        throw std::invalid_argument("kmeans requires at least k points");

    Rng rng(seed);
    KmeansResult res;
    res.centroids = kmeanspp_seed(points, k, rng);
    res.labels.assign(n, -1);

    constexpr int kMaxIterations = 300;
    for (int iter = 0; iter < kMaxIterations; ++iter) {
        bool changed = false;
        double sse = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_d = sq_dist(points[i], res.centroids[0]);
            for (int c = 1; c < k; ++c) {
                const double d = sq_dist(points[i], res.centroids[static_cast<std::size_t>(c)]);
                if (d < best_d) { // strict: ties keep the lowest index
                    best_d = d;
                    best = c;
                }
            }
            sse += best_d;
            if (res.labels[i] != best) {
                res.labels[i] = best;
                changed = true;
            }
        }
        res.sse_history.push_back(sse);
        res.iterations = iter + 1;
        if (!changed) break;

        std::vector<std::vector<double>> sums(
            static_cast<std::size_t>(k), std::vector<double>(points[0].size(), 0.0));
        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(res.labels[i]);
            ++counts[c];
            for (std::size_t j = 0; j < points[i].size(); ++j) sums[c][j] += points[i][j];
        }
        std::vector<bool> reseeded(n, false);
        for (int c = 0; c < k; ++c) {
            const auto cs = static_cast<std::size_t>(c);
            if (counts[cs] > 0) {
                for (std::size_t j = 0; j < sums[cs].size(); ++j)
                    res.centroids[cs][j] = sums[cs][j] / counts[cs];
            } else {
                // re-seed an emptied cluster at the point farthest from its
                // currently assigned centroid
                std::size_t far = 0;
                double far_d = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (reseeded[i]) continue;
                    const double d =
                        sq_dist(points[i], res.centroids[static_cast<std::size_t>(res.labels[i])]);
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                res.centroids[cs] = points[far];
                reseeded[far] = true;
            }
        }
    }
    return res;
}

ClusterAssignment cluster_dataset(const Dataset& ds, int k, std::uint64_t seed) {
    ClusterAssignment a;
    const auto pts = rescale_points(ds, &a.rescale_min_max);
    auto km = kmeans(pts, k, seed);
    a.k = k;
    a.labels = std::move(km.labels);
    a.centroids = std::move(km.centroids);
    return a;
}

void write_assignment_csv(const ClusterAssignment& assignment, std::ostream& out) {
    out << "row_index,cluster\n";
    for (std::size_t i = 0; i < assignment.labels.size(); ++i)
        out << i << "," << assignment.labels[i] << "\n";
}

} // namespace drsr
