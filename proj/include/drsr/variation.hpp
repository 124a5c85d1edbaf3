#pragma once

#include <utility>
#include <vector>

#include "drsr/expression.hpp"
#include "drsr/rng.hpp"

namespace drsr {

struct TreeLimits {
    int max_nodes = 20;
    int max_depth = 17; // root at depth 0
};

bool within_limits(const ExpressionTree& tree, const TreeLimits& limits);

// grow scheme: function or terminal anywhere until the depth budget runs
// out, then terminals only; all weights 1
ExpressionTree random_tree_grow(int input_dim, int max_depth, Rng& rng);
// full scheme: functions until the target depth, terminals at the target
ExpressionTree random_tree_full(int input_dim, int target_depth, Rng& rng);

// Koza-style initialization: depths ramped over {2,...,6}, alternating full
// and grow; candidates violating the limits are re-drawn.
std::vector<ExpressionTree> ramped_half_and_half(int count, int input_dim,
                                                 const TreeLimits& limits, Rng& rng);

// With probability `rate`, exchanges uniformly chosen subtrees (weights
// travel with the subtree). A point pair producing an out-of-limits child is
// re-drawn up to 10 times before the children fall back to parent copies.
std::pair<ExpressionTree, ExpressionTree> subtree_crossover(const ExpressionTree& parent1,
                                                            const ExpressionTree& parent2,
                                                            double rate, const TreeLimits& limits,
                                                            Rng& rng);

// With probability `rate`, replaces a uniformly chosen subtree with a fresh
// grow(4) subtree; same retry-then-copy rule as crossover.
ExpressionTree subtree_mutation(const ExpressionTree& tree, int input_dim, double rate,
                                const TreeLimits& limits, Rng& rng);

} // namespace drsr
