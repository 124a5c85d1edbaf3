#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "drsr/datasets.hpp"
#include "drsr/objectives.hpp"
#include "drsr/rng.hpp"

using namespace drsr;

namespace {

Dataset make_dataset(std::vector<double> xs, std::vector<double> ys) {
    Dataset ds;
    ds.input_dim = 1;
    ds.inputs = std::move(xs);
    ds.targets = std::move(ys);
    return ds;
}

} // namespace

TEST_CASE("residuals of an exact fit are zero") {
    const auto ds = make_dataset({1.0, 2.0}, {1.0, 2.0});
    const auto r = residuals(ExpressionTree::variable(0), ds);
    CHECK(r == std::vector<double>{0.0, 0.0});
}

TEST_CASE("guard-flagged observations carry the penalty residual") {
    const auto ds = make_dataset({-1.0}, {0.0});
    const auto tree = ExpressionTree::unary(NodeKind::Log, ExpressionTree::variable(0));
    const auto r = residuals(tree, ds);
    REQUIRE(r.size() == 1);
    CHECK(r[0] == 1e6);
}

TEST_CASE("rounded mixture fit stays within 0.02 on the linear subset") {
    // y = 1.00 - 0.101 x against the true linear component over [0, 10]
    const auto fit = ExpressionTree::binary(NodeKind::Sub, ExpressionTree::constant_one(),
                                            ExpressionTree::variable(0, 0.101));
    const auto mixture = gen_mixture(200, 5);
    const auto linear = mixture.subset("linear");
    REQUIRE(linear.size() >= 5);
    for (double r : residuals(fit, linear)) CHECK(std::abs(r) <= 0.02);
}

TEST_CASE("empty dataset is rejected") {
    Dataset empty;
    empty.input_dim = 1;
    CHECK_THROWS_AS(residuals(ExpressionTree::variable(0), empty), std::invalid_argument);
}

TEST_CASE("median convention") {
    CHECK(median_of({0.0, 1.0, 2.0, 3.0, 4.0}) == 2.0);
    CHECK(median_of({1.0, 3.0}) == 2.0);
    CHECK(median_of({5.0}) == 5.0);
    CHECK(median_of({4.0, 1.0, 3.0, 2.0}) == 2.5);
}

TEST_CASE("loss values on frozen residual vectors") {
    const std::vector<double> r1{1.0, -1.0};
    CHECK(loss_from_residuals(LossKind::MSE, r1) == doctest::Approx(1.0));
    CHECK(loss_from_residuals(LossKind::MAE, r1) == doctest::Approx(1.0));

    // one guard-level outlier among four observations
    const std::vector<double> r2{0.0, 0.0, 0.0, 1e6};
    CHECK(loss_from_residuals(LossKind::MedAE, r2) == 0.0);
    CHECK(loss_from_residuals(LossKind::MAE, r2) == doctest::Approx(2.5e5));
    CHECK(loss_from_residuals(LossKind::MSE, r2) == doctest::Approx(2.5e11));
}

TEST_CASE("fitness transform") {
    CHECK(fitness_from_loss(0.0) == 1.0);
    CHECK(fitness_from_loss(1.0) == 0.5);
    CHECK(fitness_from_loss(1e6) == doctest::Approx(9.99999e-7).epsilon(1e-6));
}

TEST_CASE("MedAE ignores growth of residuals above the median") {
    Rng rng(21);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 3 + rng.uniform_int(0, 8);
        std::vector<double> r(static_cast<std::size_t>(n));
        for (auto& v : r) v = std::abs(rng.normal(0.0, 2.0));
        const double med = loss_from_residuals(LossKind::MedAE, r);
        auto above = r;
        bool changed = false;
        for (auto& v : above)
            if (v > med && !changed) {
                v += 1.0 + std::abs(rng.normal(0.0, 100.0));
                changed = true;
            }
        if (changed) CHECK(loss_from_residuals(LossKind::MedAE, above) == doctest::Approx(med));
    }
}

TEST_CASE("all losses agree on identical absolute residuals, odd n") {
    const std::vector<double> r{0.5, -0.5, 0.5};
    const double mse = loss_from_residuals(LossKind::MSE, r);
    const double mae = loss_from_residuals(LossKind::MAE, r);
    const double med = loss_from_residuals(LossKind::MedAE, r);
    CHECK(mae == doctest::Approx(med));
    CHECK(mse == doctest::Approx(0.25));
    CHECK(mae == doctest::Approx(0.5));
}

TEST_CASE("summation is independent of evaluation order") {
    Rng rng(17);
    std::vector<double> values(1000);
    for (auto& v : values) v = rng.normal(0.0, 1.0) * std::pow(10.0, rng.uniform_int(-8, 8));
    const double base_mse = loss_from_residuals(LossKind::MSE, values);
    const double base_mae = loss_from_residuals(LossKind::MAE, values);

    auto shuffled = values;
    for (std::size_t i = shuffled.size(); i > 1; --i)
        std::swap(shuffled[i - 1], shuffled[rng.uniform_index(i)]);
    CHECK(loss_from_residuals(LossKind::MSE, shuffled) ==
          doctest::Approx(base_mse).epsilon(1e-12));
    CHECK(loss_from_residuals(LossKind::MAE, shuffled) ==
          doctest::Approx(base_mae).epsilon(1e-12));
}

TEST_CASE("loss and fitness bounds") {
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> r(static_cast<std::size_t>(1 + rng.uniform_int(0, 20)));
        for (auto& v : r) v = rng.normal(0.0, 100.0);
        for (const auto kind : {LossKind::MSE, LossKind::MAE, LossKind::MedAE}) {
            const double l = loss_from_residuals(kind, r);
            CHECK(l >= 0.0);
            const double f = fitness_from_loss(l);
            CHECK(f > 0.0);
            CHECK(f <= 1.0);
        }
        double max_abs = 0.0;
        for (double v : r) max_abs = std::max(max_abs, std::abs(v));
        CHECK(loss_from_residuals(LossKind::MAE, r) <= max_abs + 1e-12);
    }
}
