#include <doctest.h>

#include <cmath>
#include <vector>

#include "drsr/expression.hpp"
#include "drsr/rng.hpp"
#include "drsr/variation.hpp"

using namespace drsr;

namespace {

// Div(1, Add(1, Exp(x))): six nodes, one exp, the reference parameterized
// tree shape used throughout
ExpressionTree sigmoid_tree() {
    using T = ExpressionTree;
    const auto den = T::binary(NodeKind::Add, T::constant_one(), T::unary(NodeKind::Exp, T::variable(0)));
    return T::binary(NodeKind::Div, T::constant_one(), den);
}

double closed_form_sigmoid(double x) { return 1.0 / (1.0 + std::exp(x)); }

} // namespace

TEST_CASE("sigmoid tree evaluates to 1/2 at x = 0") {
    const auto out = sigmoid_tree().evaluate_scalar(0.0);
    REQUIRE_FALSE(out.flagged);
    CHECK(out.value == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("log of a negative argument flags the observation") {
    const auto tree = ExpressionTree::unary(NodeKind::Log, ExpressionTree::variable(0));
    CHECK(tree.evaluate_scalar(-1.0).flagged);
    CHECK(tree.evaluate_scalar(0.0).flagged); // boundary counts as a violation
    CHECK_FALSE(tree.evaluate_scalar(1.0).flagged);
}

TEST_CASE("root weight scales the output") {
    const auto tree = ExpressionTree::unary(NodeKind::Exp, ExpressionTree::variable(0), 2.0);
    const auto out = tree.evaluate_scalar(0.0);
    REQUIRE_FALSE(out.flagged);
    CHECK(out.value == doctest::Approx(2.0));
}

TEST_CASE("guards: division by near-zero and oversized exp arguments") {
    const auto div = ExpressionTree::binary(NodeKind::Div, ExpressionTree::constant_one(),
                                            ExpressionTree::variable(0));
    CHECK(div.evaluate_scalar(1e-13).flagged);
    CHECK_FALSE(div.evaluate_scalar(1e-11).flagged);

    const auto ex = ExpressionTree::unary(NodeKind::Exp, ExpressionTree::variable(0));
    CHECK(ex.evaluate_scalar(100.5).flagged);
    CHECK(ex.evaluate_scalar(-100.5).flagged);
    CHECK_FALSE(ex.evaluate_scalar(100.0).flagged);
}

TEST_CASE("unit-weight parameterized sigmoid matches the closed form on a grid") {
    const auto tree = sigmoid_tree();
    for (int i = 0; i <= 100; ++i) {
        const double x = -5.0 + 0.1 * i;
        const auto out = tree.evaluate_scalar(x);
        REQUIRE_FALSE(out.flagged);
        CHECK(out.value == doctest::Approx(closed_form_sigmoid(x)).epsilon(1e-12));
    }
}

TEST_CASE("node counting") {
    CHECK(sigmoid_tree().node_count() == 6);
    CHECK(ExpressionTree::variable(0).node_count() == 1);
    const auto add = ExpressionTree::binary(NodeKind::Add, ExpressionTree::variable(0),
                                            ExpressionTree::constant_one());
    CHECK(add.node_count() == 3);
    CHECK(add.depth() == 1);
}

TEST_CASE("transcendental counting") {
    CHECK(sigmoid_tree().transcendental_count() == 1);
    const auto add = ExpressionTree::binary(NodeKind::Add, ExpressionTree::variable(0),
                                            ExpressionTree::constant_one());
    CHECK(add.transcendental_count() == 0);
    const auto nested = ExpressionTree::unary(
        NodeKind::Exp, ExpressionTree::unary(NodeKind::Log, ExpressionTree::variable(0)));
    CHECK(nested.transcendental_count() == 2);
}

TEST_CASE("weights vector round trip") {
    const auto tree = sigmoid_tree();
    const auto w = tree.weights_vector();
    REQUIRE(w.size() == 6);
    for (double v : w) CHECK(v == 1.0);

    Rng rng(7);
    TreeLimits limits;
    for (int trial = 0; trial < 50; ++trial) {
        auto t = random_tree_grow(2, 5, rng);
        const auto round = t.with_weights(t.weights_vector());
        CHECK(round == t);
        for (int i = 0; i < 10; ++i) {
            const std::vector<double> x{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
            const auto a = t.evaluate(x);
            const auto b = round.evaluate(x);
            CHECK(a.flagged == b.flagged);
            if (!a.flagged) CHECK(a.value == b.value);
        }
    }
}

TEST_CASE("set_weights scales terminals") {
    auto t = ExpressionTree::variable(0);
    const std::vector<double> w{3.0};
    t.set_weights(w);
    CHECK(t.evaluate_scalar(2.0).value == doctest::Approx(6.0));

    std::vector<double> wrong{1.0, 2.0};
    CHECK_THROWS_AS(t.set_weights(wrong), std::invalid_argument);
}

TEST_CASE("counts are invariant under weight changes") {
    auto t = sigmoid_tree();
    std::vector<double> w(6, 0.25);
    t.set_weights(w);
    CHECK(t.node_count() == 6);
    CHECK(t.transcendental_count() == 1);
}

TEST_CASE("evaluation never leaks non-finite values") {
    Rng rng(99);
    for (int trial = 0; trial < 500; ++trial) {
        const auto t = random_tree_grow(1, 6, rng);
        const double x = rng.uniform(-50.0, 50.0);
        const auto out = t.evaluate_scalar(x);
        if (!out.flagged) CHECK(std::isfinite(out.value));
    }
}

TEST_CASE("evaluation is deterministic") {
    Rng rng(3);
    const auto t = random_tree_grow(1, 6, rng);
    const auto a = t.evaluate_scalar(0.731);
    const auto b = t.evaluate_scalar(0.731);
    CHECK(a.flagged == b.flagged);
    CHECK(a.value == b.value);
}

TEST_CASE("canonical text round trip") {
    const auto t = sigmoid_tree();
    const std::string text = t.to_text();
    CHECK(text == "(div w=1 (const1 w=1) (add w=1 (const1 w=1) (exp w=1 (var0 w=1))))");
    CHECK(ExpressionTree::parse(text) == t);

    Rng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        auto random = random_tree_grow(3, 5, rng);
        auto w = random.weights_vector();
        for (auto& v : w) v = rng.normal(0.0, 10.0);
        random.set_weights(w);
        const auto reparsed = ExpressionTree::parse(random.to_text());
        CHECK(reparsed == random);
        CHECK(reparsed.to_text() == random.to_text());
    }
}

TEST_CASE("parse rejects malformed input") {
    CHECK_THROWS_AS(ExpressionTree::parse("(bogus w=1)"), std::runtime_error);
    CHECK_THROWS_AS(ExpressionTree::parse("(add w=1 (var0 w=1))"), std::runtime_error);
    CHECK_THROWS_AS(ExpressionTree::parse("(var0 w=x)"), std::runtime_error);
    CHECK_THROWS_AS(ExpressionTree::parse("(var0 w=1) trailing"), std::runtime_error);
}

TEST_CASE("subtree extraction and replacement") {
    const auto t = sigmoid_tree();
    // pre-order: div const1 add const1 exp var0
    CHECK(t.subtree(2).node_count() == 4);
    CHECK(t.subtree(4).node_count() == 2);
    const auto replaced = t.with_replaced_subtree(4, ExpressionTree::variable(0));
    CHECK(replaced.node_count() == 5);
    // 1 / (1 + x) at x = 1
    CHECK(replaced.evaluate_scalar(1.0).value == doctest::Approx(0.5));
}
