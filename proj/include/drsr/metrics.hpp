#pragma once

#include <span>
#include <utility>

#include "drsr/archive.hpp"
#include "drsr/datasets.hpp"
#include "drsr/expression.hpp"

namespace drsr {

// 1/(1 + MSE) restricted to a labeled subset; throws on an empty subset.
double subset_accuracy(const ExpressionTree& tree, const Dataset& subset);

// fraction of occupied archive cells
double coverage(const Archive& archive);

// sum of elite fitness values over the total cell count
double qd_score(const Archive& archive);

// Exact 2-D hypervolume for (fitness maximized, node count minimized)
// against the reference point (0, 20): the area dominated by the
// non-dominated front of `points`, clipped at the reference. Points with
// non-positive fitness or node count at/above the reference contribute
// nothing.
double hypervolume(std::span<const std::pair<double, double>> points,
                   std::pair<double, double> reference = {0.0, 20.0});

} // namespace drsr
