#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "drsr/datasets.hpp"
#include "drsr/objectives.hpp"

using namespace drsr;

namespace {

std::filesystem::path write_temp_csv(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    return path;
}

} // namespace

TEST_CASE("ground-truth values at fixed points") {
    CHECK(nguyen_ground_truth(1).evaluate_scalar(1.0).value == doctest::Approx(3.0));
    CHECK(nguyen_ground_truth(7).evaluate_scalar(0.0).value == doctest::Approx(0.0));
    const std::vector<double> x{0.5, 1.0};
    CHECK(nguyen_ground_truth(11).evaluate(x).value == doctest::Approx(0.5));
    const std::vector<double> x12{1.0, 1.0};
    CHECK(nguyen_ground_truth(12).evaluate(x12).value == doctest::Approx(-0.5));
}

TEST_CASE("generators are seed deterministic") {
    const auto a = gen_nguyen(1, 20, 20, 42);
    const auto b = gen_nguyen(1, 20, 20, 42);
    CHECK(a.inputs == b.inputs);
    CHECK(a.targets == b.targets);
    const auto c = gen_nguyen(1, 20, 20, 43);
    CHECK(a.inputs != c.inputs);
}

TEST_CASE("ground truth trees have zero residual on clean rows") {
    for (const int name : {1, 7, 11, 12}) {
        const auto ds = gen_nguyen(name, 20, 5, 9);
        const auto base = ds.subset("base");
        REQUIRE(base.size() == 20);
        for (double r : residuals(nguyen_ground_truth(name), base)) CHECK(r == 0.0);
    }
    const auto mix = gen_mixture(100, 3);
    for (double r : residuals(mixture_linear_truth(), mix.subset("linear"))) CHECK(r == 0.0);
    for (double r : residuals(mixture_logistic_truth(), mix.subset("logistic"))) CHECK(r == 0.0);
}

TEST_CASE("mixture component values") {
    CHECK(mixture_linear_truth().evaluate_scalar(0.0).value == doctest::Approx(1.0));
    CHECK(mixture_logistic_truth().evaluate_scalar(2.5).value == doctest::Approx(0.5));
    // 1 / (1 + e^12)
    CHECK(mixture_logistic_truth().evaluate_scalar(10.0).value ==
          doctest::Approx(6.144174602214718e-06).epsilon(1e-12));
}

TEST_CASE("mixture labels are close to balanced over many rows") {
    const auto ds = gen_mixture(10000, 77);
    int linear = 0;
    for (const auto& l : ds.labels) linear += l == "linear";
    const double frac = linear / 10000.0;
    CHECK(frac >= 0.48);
    CHECK(frac <= 0.52);
}

TEST_CASE("mixture inputs stay in range and rows are labeled") {
    const auto ds = gen_mixture(40, 4);
    REQUIRE(ds.size() == 40);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        CHECK(ds.inputs[i] >= 0.0);
        CHECK(ds.inputs[i] <= 10.0);
        CHECK((ds.labels[i] == "linear" || ds.labels[i] == "logistic"));
    }
}

TEST_CASE("csv loading") {
    const auto ok = write_temp_csv("drsr_ok.csv", "a,b,y\n1,2,3\n4,5,6\n7,8,9\n");
    const auto res = load_csv(ok.string(), {"a", "b"}, "y");
    CHECK(res.dataset.size() == 3);
    CHECK(res.dataset.input_dim == 2);
    CHECK(res.skipped_rows == 0);
    CHECK(res.dataset.targets == std::vector<double>{3.0, 6.0, 9.0});

    const auto gap = write_temp_csv("drsr_gap.csv", "x,y\n1,2\n3,\n5,6\n");
    const auto res2 = load_csv(gap.string(), {"x"}, "y");
    CHECK(res2.dataset.size() == 2);
    CHECK(res2.skipped_rows == 1);

    const auto header_only = write_temp_csv("drsr_header.csv", "x,y\n");
    CHECK_THROWS_WITH_AS(load_csv(header_only.string(), {"x"}, "y"),
                         doctest::Contains("no valid rows"), std::runtime_error);

    CHECK_THROWS_AS(load_csv("/nonexistent/file.csv", {"x"}, "y"), std::runtime_error);
    CHECK_THROWS_AS(load_csv(ok.string(), {"missing"}, "y"), std::runtime_error);

    // numeric index fallback
    const auto by_index = load_csv(ok.string(), {"0"}, "2");
    CHECK(by_index.dataset.size() == 3);
}

TEST_CASE("minmax01 transform and its inverse") {
    Dataset ds;
    ds.input_dim = 1;
    ds.inputs = {0.0, 5.0, 10.0};
    ds.targets = {2.0, 4.0, 6.0};
    const auto t = apply_transform(ds, TransformKind::MinMax01);
    CHECK(t.inputs == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(t.targets == std::vector<double>{0.0, 0.5, 1.0});
    REQUIRE(t.transform.steps.size() == 1);
    CHECK(t.transform.steps[0].col_min_max[0] == std::pair<double, double>{0.0, 10.0});

    for (std::size_t i = 0; i < ds.size(); ++i) {
        const double back_x = inverse_transform_value(t.transform, 0, t.inputs[i]);
        const double back_y = inverse_transform_value(t.transform, 1, t.targets[i]);
        CHECK(back_x == doctest::Approx(ds.inputs[i]).epsilon(1e-12));
        CHECK(back_y == doctest::Approx(ds.targets[i]).epsilon(1e-12));
    }
}

TEST_CASE("constant columns map to one half") {
    Dataset ds;
    ds.input_dim = 1;
    ds.inputs = {3.0, 3.0, 3.0};
    ds.targets = {1.0, 2.0, 3.0};
    const auto t = apply_transform(ds, TransformKind::MinMax01);
    CHECK(t.inputs == std::vector<double>{0.5, 0.5, 0.5});
}

TEST_CASE("log-luminosity normalization constants") {
    // range constants used in the mass-luminosity experiment
    Dataset ds;
    ds.input_dim = 1;
    ds.inputs = {-0.9682, 1.4357};
    ds.targets = {-2.313, 5.187};
    const auto t = apply_transform(ds, TransformKind::MinMax01);
    CHECK(t.inputs[0] == doctest::Approx(0.0));
    CHECK(t.inputs[1] == doctest::Approx(1.0));
    // y = 1 maps back to log L = 7.5 * 1 - 2.313
    CHECK(inverse_transform_value(t.transform, 1, 1.0) == doctest::Approx(5.187).epsilon(1e-12));
    CHECK(inverse_transform_value(t.transform, 0, 0.5) ==
          doctest::Approx(0.5 * 2.4039 - 0.9682).epsilon(1e-12));
}

TEST_CASE("log10 and delog10 transforms invert each other") {
    Dataset ds;
    ds.input_dim = 1;
    ds.inputs = {1.0, 10.0, 100.0};
    ds.targets = {0.5, 5.0, 50.0};
    const auto logged = apply_transform(ds, TransformKind::Log10);
    CHECK(logged.inputs == std::vector<double>{0.0, 1.0, 2.0});
    const auto back = apply_transform(logged, TransformKind::Delog10);
    for (std::size_t i = 0; i < ds.size(); ++i)
        CHECK(back.inputs[i] == doctest::Approx(ds.inputs[i]).epsilon(1e-12));
    CHECK(inverse_transform_value(logged.transform, 0, 2.0) == doctest::Approx(100.0));

    Dataset bad;
    bad.input_dim = 1;
    bad.inputs = {-1.0};
    bad.targets = {1.0};
    CHECK_THROWS_AS(apply_transform(bad, TransformKind::Log10), std::domain_error);
}

TEST_CASE("dataset csv snapshot has a label column") {
    const auto ds = gen_mixture(5, 2);
    std::ostringstream out;
    write_dataset_csv(ds, out);
    const auto text = out.str();
    CHECK(text.rfind("x0,y,label\n", 0) == 0);
    CHECK(text.find("linear") != std::string::npos);
}

TEST_CASE("transform record serializes to JSON") {
    Dataset ds;
    ds.input_dim = 1;
    ds.inputs = {0.0, 2.0};
    ds.targets = {1.0, 3.0};
    const auto t = apply_transform(ds, TransformKind::MinMax01);
    const auto json_text = transform_record_to_json(t.transform);
    CHECK(json_text.find("minmax01") != std::string::npos);
    CHECK(json_text.find("\"max\":2.0") != std::string::npos);
}
