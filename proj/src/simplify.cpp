#include "drsr/simplify.hpp"

#include <cmath>
#include <optional>

namespace drsr {

std::vector<std::vector<double>> draw_probe_inputs(const Dataset& ds, int count, Rng& rng) {
    const auto bounds = ds.input_bounds();
    std::vector<std::vector<double>> probes(static_cast<std::size_t>(count));
    for (auto& p : probes) {
        p.resize(bounds.size());
        for (std::size_t j = 0; j < bounds.size(); ++j)
            p[j] = rng.uniform(bounds[j].first, bounds[j].second);
    }
    return probes;
}

namespace {

bool contains_var(const ExpressionTree& t) {
    for (const Node& n : t.nodes())
        if (n.kind == NodeKind::Var) return true;
    return false;
}

std::optional<double> eval_const(const ExpressionTree& t) {
    const auto out = t.evaluate({});
    if (out.flagged) return std::nullopt;
    return out.value;
}

ExpressionTree scaled(ExpressionTree t, double s) {
    t.node(0).weight *= s;
    return t;
}

ExpressionTree fold_rec(const ExpressionTree& t) {
    if (!contains_var(t)) {
        if (const auto v = eval_const(t)) return ExpressionTree::constant_one(*v);
        // evaluation trips a guard: keep the node, still fold inside it
    }
    const Node& root = t.node(0);
    switch (arity(root.kind)) {
    case 0: return t;
    case 1: return ExpressionTree::unary(root.kind, fold_rec(t.subtree(1)), root.weight);
    default: {
        const int mid = t.subtree_end(1);
        return ExpressionTree::binary(root.kind, fold_rec(t.subtree(1)), fold_rec(t.subtree(mid)),
                                      root.weight);
    }
    }
}

struct LinearTerm {
    double coef;
    int var;
};

// subtree equivalent to coef * x_var: a Var leaf, or Mul of a constant-only
// side with another linear term
std::optional<LinearTerm> as_linear(const ExpressionTree& t) {
    const Node& r = t.node(0);
    if (r.kind == NodeKind::Var) return LinearTerm{r.weight, r.var};
    if (r.kind != NodeKind::Mul) return std::nullopt;
    const int mid = t.subtree_end(1);
    const ExpressionTree lhs = t.subtree(1);
    const ExpressionTree rhs = t.subtree(mid);
    const bool lc = !contains_var(lhs);
    const bool rc = !contains_var(rhs);
    if (lc == rc) return std::nullopt;
    const auto c = eval_const(lc ? lhs : rhs);
    const auto lin = as_linear(lc ? rhs : lhs);
    if (!c || !lin) return std::nullopt;
    return LinearTerm{r.weight * *c * lin->coef, lin->var};
}

struct MulFactors {
    double coef = 1.0;
    std::vector<ExpressionTree> factors;
    bool ok = true;
};

void flatten_mul(const ExpressionTree& t, MulFactors& out) {
    if (!out.ok) return;
    if (!contains_var(t)) {
        if (const auto v = eval_const(t)) {
            out.coef *= *v;
        } else {
            out.ok = false;
        }
        return;
    }
    const Node& r = t.node(0);
    if (r.kind == NodeKind::Mul) {
        out.coef *= r.weight;
        const int mid = t.subtree_end(1);
        flatten_mul(t.subtree(1), out);
        flatten_mul(t.subtree(mid), out);
        return;
    }
    out.factors.push_back(t);
}

ExpressionTree mul_chain(std::span<const ExpressionTree> fs) {
    ExpressionTree chain = fs.back();
    for (std::size_t i = fs.size() - 1; i-- > 0;)
        chain = ExpressionTree::binary(NodeKind::Mul, fs[i], chain);
    return chain;
}

void div_candidates(const ExpressionTree& sub, std::vector<ExpressionTree>& out) {
    const Node& root = sub.node(0);
    const int mid = sub.subtree_end(1);
    const ExpressionTree num_tree = sub.subtree(1);
    const ExpressionTree den_tree = sub.subtree(mid);

    MulFactors num, den;
    flatten_mul(num_tree, num);
    flatten_mul(den_tree, den);
    if (!num.ok || !den.ok || std::abs(den.coef) < kDivGuard) return;

    std::vector<bool> den_used(den.factors.size(), false);
    std::vector<ExpressionTree> kept_num;
    for (auto& f : num.factors) {
        bool canceled = false;
        for (std::size_t j = 0; j < den.factors.size(); ++j) {
            if (!den_used[j] && den.factors[j] == f) {
                den_used[j] = true;
                canceled = true;
                break;
            }
        }
        if (!canceled) kept_num.push_back(std::move(f));
    }
    std::vector<ExpressionTree> kept_den;
    for (std::size_t j = 0; j < den.factors.size(); ++j)
        if (!den_used[j]) kept_den.push_back(std::move(den.factors[j]));

    ExpressionTree candidate;
    if (kept_num.empty() && kept_den.empty()) {
        const double v = root.weight * num.coef / den.coef;
        if (!std::isfinite(v)) return;
        candidate = ExpressionTree::constant_one(v);
    } else if (kept_den.empty()) {
        const double s = root.weight * num.coef / den.coef;
        if (!std::isfinite(s)) return;
        candidate = scaled(mul_chain(kept_num), s);
    } else {
        ExpressionTree n = kept_num.empty() ? ExpressionTree::constant_one(num.coef)
                                            : scaled(mul_chain(kept_num), num.coef);
        ExpressionTree d = scaled(mul_chain(kept_den), den.coef);
        candidate = ExpressionTree::binary(NodeKind::Div, n, d, root.weight);
    }
    out.push_back(std::move(candidate));
}

// candidate local rewrites at the root of `sub`, in preference order
std::vector<ExpressionTree> local_candidates(const ExpressionTree& sub) {
    std::vector<ExpressionTree> out;
    const Node& root = sub.node(0);

    if (root.kind == NodeKind::Add || root.kind == NodeKind::Sub) {
        const int mid = sub.subtree_end(1);
        const auto l1 = as_linear(sub.subtree(1));
        const auto l2 = as_linear(sub.subtree(mid));
        if (l1 && l2 && l1->var == l2->var) {
            const double coef = root.weight * (root.kind == NodeKind::Add ? l1->coef + l2->coef
                                                                          : l1->coef - l2->coef);
            out.push_back(ExpressionTree::variable(l1->var, coef));
        }
    }

    if (root.kind == NodeKind::Div) {
        div_candidates(sub, out);
        const int mid = sub.subtree_end(1);
        const Node& ln = sub.node(1);
        const Node& rn = sub.node(mid);
        if (ln.kind == NodeKind::Exp && rn.kind == NodeKind::Exp && rn.weight != 0.0) {
            // w (w1 e^A) / (w2 e^B) = (w w1 / w2) e^(A - B)
            const ExpressionTree arg = ExpressionTree::binary(
                NodeKind::Sub, sub.subtree(2), sub.subtree(mid + 1));
            out.push_back(
                ExpressionTree::unary(NodeKind::Exp, arg, root.weight * ln.weight / rn.weight));
        }
    }

    if (root.kind == NodeKind::Mul) {
        const int mid = sub.subtree_end(1);
        const Node& ln = sub.node(1);
        const Node& rn = sub.node(mid);
        if (ln.kind == NodeKind::Exp && rn.kind == NodeKind::Exp) {
            // w (w1 e^A)(w2 e^B) = (w w1 w2) e^(A + B)
            const ExpressionTree arg = ExpressionTree::binary(
                NodeKind::Add, sub.subtree(2), sub.subtree(mid + 1));
            out.push_back(ExpressionTree::unary(NodeKind::Exp, arg,
                                                root.weight * ln.weight * rn.weight));
        }
    }

    if (root.kind == NodeKind::Log && sub.node(1).kind == NodeKind::Exp) {
        const double w2 = sub.node(1).weight;
        if (w2 == 1.0) {
            out.push_back(scaled(sub.subtree(2), root.weight)); // w ln(e^A) = w A
        } else if (w2 > 0.0) {
            // w ln(w2 e^A) = w (ln w2 + A)
            out.push_back(ExpressionTree::binary(NodeKind::Add,
                                                 ExpressionTree::constant_one(std::log(w2)),
                                                 sub.subtree(2), root.weight));
        }
    }

    if (root.kind == NodeKind::Exp && sub.node(1).kind == NodeKind::Log &&
        sub.node(1).weight == 1.0) {
        out.push_back(scaled(sub.subtree(2), root.weight)); // w e^(ln A) = w A
    }

    return out;
}

bool probes_agree(const ExpressionTree& a, const ExpressionTree& b,
                  const std::vector<std::vector<double>>& probes, double rel_tol) {
    for (const auto& x : probes) {
        const auto ea = a.evaluate(x);
        const auto eb = b.evaluate(x);
        if (ea.flagged != eb.flagged) return false;
        if (!ea.flagged && std::abs(ea.value - eb.value) > rel_tol * (1.0 + std::abs(ea.value)))
            return false;
    }
    return true;
}

} // namespace

ExpressionTree constant_fold(const ExpressionTree& tree) { return fold_rec(tree); }

ExpressionTree algebraic_simplify(const ExpressionTree& tree,
                                  const std::vector<std::vector<double>>& probes,
                                  const SimplifyOptions& options) {
    ExpressionTree cur = tree;
    for (int pass = 0; pass < 200; ++pass) {
        bool changed = false;
        for (int pos = 0; pos < cur.node_count() && !changed; ++pos) {
            const ExpressionTree sub = cur.subtree(pos);
            for (const ExpressionTree& local : local_candidates(sub)) {
                if (local == sub) continue;
                ExpressionTree candidate = cur.with_replaced_subtree(pos, local);
                if (candidate.node_count() > cur.node_count()) continue;
                if (candidate.depth() > std::max(cur.depth(), options.limits.max_depth)) continue;
                if (!probes_agree(cur, candidate, probes, options.rel_tol)) continue;
                cur = constant_fold(candidate);
                changed = true;
                break;
            }
        }
        if (!changed) break;
    }
    return cur;
}

ExpressionTree simplify_expression(const ExpressionTree& tree,
                                   const std::vector<std::vector<double>>& probes,
                                   const SimplifyOptions& options) {
    return algebraic_simplify(constant_fold(tree), probes, options);
}

} // namespace drsr
