#include <doctest.h>

#include <cmath>
#include <vector>

#include "drsr/datasets.hpp"
#include "drsr/rng.hpp"
#include "drsr/simplify.hpp"
#include "drsr/variation.hpp"

using namespace drsr;

namespace {

std::vector<std::vector<double>> unit_probes(int count = 32, double lo = -3.0, double hi = 3.0) {
    Rng rng(1234);
    std::vector<std::vector<double>> probes(static_cast<std::size_t>(count));
    for (auto& p : probes) p = {rng.uniform(lo, hi)};
    return probes;
}

bool agree_at(const ExpressionTree& a, const ExpressionTree& b, double x, double tol = 1e-9) {
    const auto ea = a.evaluate_scalar(x);
    const auto eb = b.evaluate_scalar(x);
    if (ea.flagged || eb.flagged) return ea.flagged == eb.flagged;
    return std::abs(ea.value - eb.value) <= tol * (1.0 + std::abs(ea.value));
}

} // namespace

TEST_CASE("constant folding collapses constant sums") {
    const auto t = ExpressionTree::binary(NodeKind::Add, ExpressionTree::constant_one(),
                                          ExpressionTree::constant_one());
    const auto folded = constant_fold(t);
    CHECK(folded.node_count() == 1);
    CHECK(folded.node(0).kind == NodeKind::Const1);
    CHECK(folded.node(0).weight == 2.0);
}

TEST_CASE("constant folding keeps variable factors") {
    const auto t = ExpressionTree::binary(
        NodeKind::Mul, ExpressionTree::variable(0),
        ExpressionTree::binary(NodeKind::Add, ExpressionTree::constant_one(),
                               ExpressionTree::constant_one()));
    const auto folded = constant_fold(t);
    CHECK(folded.node_count() == 3);
    CHECK(folded.evaluate_scalar(2.5).value == doctest::Approx(5.0));
}

TEST_CASE("folding that would trip a guard is skipped") {
    const auto t = ExpressionTree::unary(NodeKind::Log, ExpressionTree::constant_one(-1.0));
    const auto folded = constant_fold(t);
    CHECK(folded == t);
    // flagging behavior is identical before and after
    CHECK(folded.evaluate_scalar(0.0).flagged == t.evaluate_scalar(0.0).flagged);
}

TEST_CASE("cancellation: x*1/x reduces to the constant 1") {
    const auto t = ExpressionTree::binary(
        NodeKind::Div,
        ExpressionTree::binary(NodeKind::Mul, ExpressionTree::variable(0),
                               ExpressionTree::constant_one()),
        ExpressionTree::variable(0));
    const auto s = simplify_expression(t, unit_probes());
    CHECK(s.node_count() == 1);
    CHECK(s.node(0).kind == NodeKind::Const1);
    CHECK(s.node(0).weight == doctest::Approx(1.0));
}

TEST_CASE("exponent combination does not grow the tree") {
    const auto ex = ExpressionTree::unary(NodeKind::Exp, ExpressionTree::variable(0));
    const auto t = ExpressionTree::binary(NodeKind::Mul, ex, ex);
    const auto s = simplify_expression(t, unit_probes());
    CHECK(s.node_count() <= t.node_count());
    for (double x : {-2.0, -0.5, 0.0, 1.0, 2.0}) CHECK(agree_at(t, s, x));
    // exp(x)*exp(x) admits the in-alphabet form exp(2x)
    CHECK(s.node_count() == 2);
    CHECK(s.node(0).kind == NodeKind::Exp);
}

TEST_CASE("term collection merges like terms") {
    const auto term = ExpressionTree::binary(NodeKind::Mul, ExpressionTree::variable(0),
                                             ExpressionTree::constant_one());
    const auto t = ExpressionTree::binary(NodeKind::Add, term, term);
    const auto s = simplify_expression(t, unit_probes());
    CHECK(s.node_count() == 1);
    CHECK(s.node(0).kind == NodeKind::Var);
    CHECK(s.node(0).weight == doctest::Approx(2.0));
}

TEST_CASE("log of exp composition reduces") {
    const auto t = ExpressionTree::unary(
        NodeKind::Log, ExpressionTree::unary(NodeKind::Exp, ExpressionTree::variable(0)));
    const auto probes = unit_probes(32, -3.0, 3.0);
    const auto s = simplify_expression(t, probes);
    CHECK(s.node_count() == 1);
    CHECK(s.node(0).kind == NodeKind::Var);
}

TEST_CASE("rewrites that disagree on probes are rejected") {
    // exp(log(x)) = x only for x > 0; probes straddling zero expose the
    // domain difference, so the rewrite must be discarded
    const auto t = ExpressionTree::unary(
        NodeKind::Exp, ExpressionTree::unary(NodeKind::Log, ExpressionTree::variable(0)));
    const auto probes = unit_probes(32, -3.0, 3.0);
    CHECK(simplify_expression(t, probes) == t);
    // with positive-only probes the reduction is sound and accepted
    const auto pos = unit_probes(32, 0.5, 3.0);
    CHECK(simplify_expression(t, pos).node_count() == 1);
}

TEST_CASE("random trees: node count never grows and semantics are preserved") {
    Rng rng(2024);
    Dataset domain;
    domain.input_dim = 1;
    domain.inputs = {-3.0, 3.0};
    domain.targets = {0.0, 0.0};
    Rng probe_rng(55);
    const auto probes = draw_probe_inputs(domain, 32, probe_rng);

    int simplified_something = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto t = random_tree_grow(1, 5, rng);
        const auto s = simplify_expression(t, probes);
        CHECK(s.node_count() <= t.node_count());
        if (s.node_count() < t.node_count()) ++simplified_something;
        for (int i = 0; i < 100; ++i) {
            const double x = rng.uniform(-3.0, 3.0);
            const auto a = t.evaluate_scalar(x);
            const auto b = s.evaluate_scalar(x);
            if (a.flagged || b.flagged) continue; // guard boundaries may shift
            CHECK(std::abs(a.value - b.value) <= 1e-9 * (1.0 + std::abs(a.value)));
        }
    }
    CHECK(simplified_something > 0);
}

TEST_CASE("simplification reaches a fixpoint") {
    Rng rng(31);
    const auto probes = unit_probes();
    for (int trial = 0; trial < 200; ++trial) {
        const auto t = random_tree_grow(1, 5, rng);
        const auto once = simplify_expression(t, probes);
        const auto twice = simplify_expression(once, probes);
        CHECK(twice.node_count() == once.node_count());
    }
}

TEST_CASE("probe inputs respect the dataset bounds") {
    const auto ds = gen_mixture(50, 8);
    Rng rng(9);
    const auto probes = draw_probe_inputs(ds, 32, rng);
    REQUIRE(probes.size() == 32);
    const auto bounds = ds.input_bounds();
    for (const auto& p : probes) {
        REQUIRE(p.size() == 1);
        CHECK(p[0] >= bounds[0].first);
        CHECK(p[0] <= bounds[0].second);
    }
}
