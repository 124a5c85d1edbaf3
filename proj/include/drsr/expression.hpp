#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace drsr {

// Function set {+,-,*,/,log,exp}, terminal set {x_i, 1}. Nothing else.
enum class NodeKind : std::uint8_t { Add, Sub, Mul, Div, Log, Exp, Var, Const1 };

constexpr int arity(NodeKind k) {
    switch (k) {
    case NodeKind::Add:
    case NodeKind::Sub:
    case NodeKind::Mul:
    case NodeKind::Div: return 2;
    case NodeKind::Log:
    case NodeKind::Exp: return 1;
    default: return 0;
    }
}

constexpr bool is_transcendental(NodeKind k) {
    return k == NodeKind::Log || k == NodeKind::Exp;
}

// Every node carries a multiplicative weight applied to its output, the root
// included. Structural construction initializes weights to 1.
struct Node {
    NodeKind kind = NodeKind::Const1;
    std::uint8_t var = 0; // input index, meaningful for Var nodes
    double weight = 1.0;

    bool operator==(const Node&) const = default;
};

// Domain guards during evaluation: log of a non-positive argument, divisor
// magnitude below kDivGuard, exp argument magnitude above kExpGuard, or any
// non-finite intermediate. A violated observation carries residual magnitude
// kGuardResidual instead of a prediction.
constexpr double kGuardResidual = 1e6;
constexpr double kDivGuard = 1e-12;
constexpr double kExpGuard = 100.0;

struct EvalOutcome {
    double value = 0.0;
    bool flagged = false;
};

// Parameterized expression tree stored as a pre-order (prefix) node array.
// Pre-order storage makes the subtree rooted at index i a contiguous range
// [i, subtree_end(i)), which variation operators use for O(1) point indexing
// and splice-based subtree exchange.
class ExpressionTree {
public:
    ExpressionTree() = default;
    explicit ExpressionTree(std::vector<Node> preorder);

    static ExpressionTree variable(int index, double weight = 1.0);
    static ExpressionTree constant_one(double weight = 1.0);
    static ExpressionTree unary(NodeKind op, const ExpressionTree& child, double weight = 1.0);
    static ExpressionTree binary(NodeKind op, const ExpressionTree& lhs,
                                 const ExpressionTree& rhs, double weight = 1.0);

    bool empty() const { return nodes_.empty(); }
    int node_count() const { return static_cast<int>(nodes_.size()); }
    int depth() const; // root at depth 0
    int transcendental_count() const;
    int max_var_index() const; // -1 when the tree has no Var node

    const Node& node(int pre_index) const { return nodes_[static_cast<std::size_t>(pre_index)]; }
    Node& node(int pre_index) { return nodes_[static_cast<std::size_t>(pre_index)]; }
    std::span<const Node> nodes() const { return nodes_; }

    // One-past-end index of the subtree rooted at pos.
    int subtree_end(int pos) const;
    ExpressionTree subtree(int pos) const;
    ExpressionTree with_replaced_subtree(int pos, const ExpressionTree& replacement) const;

    // Pre-order weight serialization; set_weights throws std::invalid_argument
    // on a length mismatch.
    std::vector<double> weights_vector() const;
    void set_weights(std::span<const double> weights);
    ExpressionTree with_weights(std::span<const double> weights) const;

    EvalOutcome evaluate(std::span<const double> x) const;
    EvalOutcome evaluate_scalar(double x) const { return evaluate(std::span<const double>(&x, 1)); }

    // Canonical text form, e.g. (mul w=1 (var0 w=1) (const1 w=2)).
    // print -> parse round-trips exactly (17 significant digits).
    std::string to_text() const;
    static ExpressionTree parse(std::string_view text); // throws std::runtime_error

    bool operator==(const ExpressionTree&) const = default;

private:
    std::vector<Node> nodes_;
};

std::string node_kind_name(NodeKind k, int var_index = 0);

} // namespace drsr
