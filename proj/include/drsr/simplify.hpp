#pragma once

#include <vector>

#include "drsr/datasets.hpp"
#include "drsr/expression.hpp"
#include "drsr/rng.hpp"
#include "drsr/variation.hpp"

namespace drsr {

// Inputs at which a rewrite must agree with the original before it is
// accepted. Drawn once per run, uniformly within the dataset's per-dimension
// input bounds.
std::vector<std::vector<double>> draw_probe_inputs(const Dataset& ds, int count, Rng& rng);

struct SimplifyOptions {
    double rel_tol = 1e-9;
    TreeLimits limits;
};

// Replaces every maximal variable-free subtree by a single constant terminal
// carrying the folded value in its weight. Subtrees whose evaluation trips a
// guard are left in place.
ExpressionTree constant_fold(const ExpressionTree& tree);

// Term collection, numerator/denominator factor cancellation, and exponent
// combination, iterated to a fixpoint. Every rewrite must keep the node
// count from growing and agree with the original on the probe set within
// rel_tol (identical guard flags, values within relative tolerance).
ExpressionTree algebraic_simplify(const ExpressionTree& tree,
                                  const std::vector<std::vector<double>>& probes,
                                  const SimplifyOptions& options = {});

// constant folding followed by the rewrite fixpoint
ExpressionTree simplify_expression(const ExpressionTree& tree,
                                   const std::vector<std::vector<double>>& probes,
                                   const SimplifyOptions& options = {});

} // namespace drsr
