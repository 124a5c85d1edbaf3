#include "drsr/variation.hpp"

namespace drsr {

namespace {

constexpr NodeKind kFunctions[] = {NodeKind::Add, NodeKind::Sub, NodeKind::Mul,
                                   NodeKind::Div, NodeKind::Log, NodeKind::Exp};
constexpr int kFunctionCount = 6;

Node random_terminal(int input_dim, Rng& rng) {
    const int pick = rng.uniform_int(0, input_dim); // input_dim vars + const1
    if (pick < input_dim) return Node{NodeKind::Var, static_cast<std::uint8_t>(pick), 1.0};
    return Node{NodeKind::Const1, 0, 1.0};
}

void grow_rec(std::vector<Node>& out, int input_dim, int depth_left, Rng& rng) {
    if (depth_left <= 0) {
        out.push_back(random_terminal(input_dim, rng));
        return;
    }
    // uniform over the combined primitive set
    const int pick = rng.uniform_int(0, kFunctionCount + input_dim);
    if (pick >= kFunctionCount) {
        const int t = pick - kFunctionCount;
        out.push_back(t < input_dim ? Node{NodeKind::Var, static_cast<std::uint8_t>(t), 1.0}
                                    : Node{NodeKind::Const1, 0, 1.0});
        return;
    }
    const NodeKind op = kFunctions[pick];
    out.push_back(Node{op, 0, 1.0});
    for (int i = 0; i < arity(op); ++i) grow_rec(out, input_dim, depth_left - 1, rng);
}

void full_rec(std::vector<Node>& out, int input_dim, int depth_left, Rng& rng) {
    if (depth_left <= 0) {
        out.push_back(random_terminal(input_dim, rng));
        return;
    }
    const NodeKind op = kFunctions[rng.uniform_int(0, kFunctionCount - 1)];
    out.push_back(Node{op, 0, 1.0});
    for (int i = 0; i < arity(op); ++i) full_rec(out, input_dim, depth_left - 1, rng);
}

} // namespace

bool within_limits(const ExpressionTree& tree, const TreeLimits& limits) {
    return tree.node_count() <= limits.max_nodes && tree.depth() <= limits.max_depth;
}

ExpressionTree random_tree_grow(int input_dim, int max_depth, Rng& rng) {
    std::vector<Node> nodes;
    grow_rec(nodes, input_dim, max_depth, rng);
    return ExpressionTree(std::move(nodes));
}

ExpressionTree random_tree_full(int input_dim, int target_depth, Rng& rng) {
    std::vector<Node> nodes;
    full_rec(nodes, input_dim, target_depth, rng);
    return ExpressionTree(std::move(nodes));
}

std::vector<ExpressionTree> ramped_half_and_half(int count, int input_dim,
                                                 const TreeLimits& limits, Rng& rng) {
    std::vector<ExpressionTree> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const int depth = 2 + (i / 2) % 5;
        const bool full = (i % 2) == 0;
        ExpressionTree tree;
        bool ok = false;
        for (int attempt = 0; attempt < 1000 && !ok; ++attempt) {
            tree = full ? random_tree_full(input_dim, depth, rng)
                        : random_tree_grow(input_dim, depth, rng);
            ok = within_limits(tree, limits);
        }
        if (!ok) tree = random_tree_grow(input_dim, 2, rng); // always within limits
        out.push_back(std::move(tree));
    }
    return out;
}

std::pair<ExpressionTree, ExpressionTree> subtree_crossover(const ExpressionTree& parent1,
                                                            const ExpressionTree& parent2,
                                                            double rate, const TreeLimits& limits,
                                                            Rng& rng) {
    if (!rng.bernoulli(rate)) return {parent1, parent2};
    for (int attempt = 0; attempt < 10; ++attempt) {
        const int i = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(parent1.node_count())));
        const int j = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(parent2.node_count())));
        ExpressionTree c1 = parent1.with_replaced_subtree(i, parent2.subtree(j));
        ExpressionTree c2 = parent2.with_replaced_subtree(j, parent1.subtree(i));
        if (within_limits(c1, limits) && within_limits(c2, limits))
            return {std::move(c1), std::move(c2)};
    }
    return {parent1, parent2};
}

ExpressionTree subtree_mutation(const ExpressionTree& tree, int input_dim, double rate,
                                const TreeLimits& limits, Rng& rng) {
    if (!rng.bernoulli(rate)) return tree;
    for (int attempt = 0; attempt < 10; ++attempt) {
        const int i = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(tree.node_count())));
        ExpressionTree candidate =
            tree.with_replaced_subtree(i, random_tree_grow(input_dim, 4, rng));
        if (within_limits(candidate, limits)) return candidate;
    }
    return tree;
}

} // namespace drsr
