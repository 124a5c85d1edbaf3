#include "drsr/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "drsr/rng.hpp"

namespace drsr {

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct NguyenInfo {
    int dim;
    double lo, hi;
};

NguyenInfo nguyen_info(int name) {
    switch (name) {
    case 1: return {1, -1.0, 1.0};
    case 7: return {1, 0.0, 2.0};
    case 11: return {2, 0.0, 1.0};
    case 12: return {2, 0.0, 1.0};
    default: throw std::invalid_argument("unknown Nguyen benchmark: " + std::to_string(name));
    }
}

} // namespace

std::string transform_kind_name(TransformKind k) {
    switch (k) {
    case TransformKind::Delog10: return "delog10";
    case TransformKind::Log10: return "log10";
    case TransformKind::MinMax01: return "minmax01";
    }
    return "?";
}

TransformKind transform_kind_from_name(const std::string& name) {
    if (name == "delog10") return TransformKind::Delog10;
    if (name == "log10") return TransformKind::Log10;
    if (name == "minmax01") return TransformKind::MinMax01;
    throw std::invalid_argument("unknown transform: " + name);
}

double inverse_transform_value(const TransformRecord& record, int col, double value) {
    double v = value;
    for (auto it = record.steps.rbegin(); it != record.steps.rend(); ++it) {
        switch (it->kind) {
        case TransformKind::Delog10:
            v = std::log10(v);
            break;
        case TransformKind::Log10:
            v = std::pow(10.0, v);
            break;
        case TransformKind::MinMax01: {
            const auto [lo, hi] = it->col_min_max.at(static_cast<std::size_t>(col));
            v = v * (hi - lo) + lo;
            break;
        }
        }
    }
    return v;
}

std::string transform_record_to_json(const TransformRecord& record) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : record.steps) {
        nlohmann::json j;
        j["kind"] = transform_kind_name(s.kind);
        if (s.kind == TransformKind::MinMax01) {
            nlohmann::json cols = nlohmann::json::array();
            for (const auto& [lo, hi] : s.col_min_max) cols.push_back({{"min", lo}, {"max", hi}});
            j["columns"] = cols;
        }
        steps.push_back(j);
    }
    return nlohmann::json{{"steps", steps}}.dump();
}

bool Dataset::has_label(std::string_view label) const {
    return std::find(labels.begin(), labels.end(), label) != labels.end();
}

Dataset Dataset::subset(std::string_view label) const {
    Dataset out;
    out.input_dim = input_dim;
    out.provenance = provenance;
    out.transform = transform;
    for (std::size_t i = 0; i < size(); ++i) {
        if (labels[i] != label) continue;
        const auto r = row(i);
        out.inputs.insert(out.inputs.end(), r.begin(), r.end());
        out.targets.push_back(targets[i]);
        out.labels.push_back(labels[i]);
    }
    return out;
}

std::vector<std::pair<double, double>> Dataset::input_bounds() const {
    std::vector<std::pair<double, double>> bounds(
        static_cast<std::size_t>(input_dim),
        {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()});
    for (std::size_t i = 0; i < size(); ++i) {
        const auto r = row(i);
        for (int j = 0; j < input_dim; ++j) {
            bounds[static_cast<std::size_t>(j)].first =
                std::min(bounds[static_cast<std::size_t>(j)].first, r[static_cast<std::size_t>(j)]);
            bounds[static_cast<std::size_t>(j)].second =
                std::max(bounds[static_cast<std::size_t>(j)].second, r[static_cast<std::size_t>(j)]);
        }
    }
    return bounds;
}

ExpressionTree nguyen_ground_truth(int name) {
    using T = ExpressionTree;
    const auto x = T::variable(0);
    switch (name) {
    case 1: {
        // x^3 + x^2 + x
        const auto x2 = T::binary(NodeKind::Mul, x, x);
        const auto x3 = T::binary(NodeKind::Mul, x2, x);
        return T::binary(NodeKind::Add, T::binary(NodeKind::Add, x3, x2), x);
    }
    case 7: {
        // log(x+1) + log(x^2+1)
        const auto one = T::constant_one();
        const auto l1 = T::unary(NodeKind::Log, T::binary(NodeKind::Add, x, one));
        const auto l2 = T::unary(
            NodeKind::Log, T::binary(NodeKind::Add, T::binary(NodeKind::Mul, x, x), one));
        return T::binary(NodeKind::Add, l1, l2);
    }
    case 11: {
        // x1^x2 = exp(x2 * log(x1))
        const auto x1 = T::variable(0);
        const auto x2 = T::variable(1);
        return T::unary(NodeKind::Exp,
                        T::binary(NodeKind::Mul, x2, T::unary(NodeKind::Log, x1)));
    }
    case 12: {
        // x1^4 - x1^3 + x2^2/2 - x2
        const auto x1 = T::variable(0);
        const auto x2 = T::variable(1);
        const auto sq1 = T::binary(NodeKind::Mul, x1, x1);
        const auto p4 = T::binary(NodeKind::Mul, sq1, sq1);
        const auto p3 = T::binary(NodeKind::Mul, sq1, x1);
        const auto half_sq2 = T::binary(NodeKind::Mul, x2, x2, 0.5);
        return T::binary(NodeKind::Sub,
                         T::binary(NodeKind::Add, T::binary(NodeKind::Sub, p4, p3), half_sq2), x2);
    }
    default: throw std::invalid_argument("unknown Nguyen benchmark: " + std::to_string(name));
    }
}

ExpressionTree mixture_linear_truth() {
    // 1 - 0.1 x
    return ExpressionTree::binary(NodeKind::Sub, ExpressionTree::constant_one(),
                                  ExpressionTree::variable(0, 0.1));
}

ExpressionTree mixture_logistic_truth() {
    // 1 / (1 + exp(-4 + 1.6 x))
    using T = ExpressionTree;
    const auto arg = T::binary(NodeKind::Add, T::constant_one(-4.0), T::variable(0, 1.6));
    const auto den = T::binary(NodeKind::Add, T::constant_one(), T::unary(NodeKind::Exp, arg));
    return T::binary(NodeKind::Div, T::constant_one(), den);
}

Dataset gen_nguyen(int name, int n_base, int n_noise, std::uint64_t seed) {
    const NguyenInfo info = nguyen_info(name);
    const ExpressionTree truth = nguyen_ground_truth(name);
    Rng rng(seed);

    Dataset ds;
    ds.input_dim = info.dim;
    ds.provenance = "nguyen-" + std::to_string(name);

    auto sample_row = [&](bool noisy) {
        std::vector<double> x(static_cast<std::size_t>(info.dim));
        EvalOutcome out;
        do {
            for (auto& v : x) v = rng.uniform(info.lo, info.hi);
            out = truth.evaluate(x);
        } while (out.flagged);
        ds.inputs.insert(ds.inputs.end(), x.begin(), x.end());
        ds.targets.push_back(noisy ? out.value + rng.normal() : out.value);
        ds.labels.emplace_back(noisy ? "noise" : "base");
    };

    for (int i = 0; i < n_base; ++i) sample_row(false);
    for (int i = 0; i < n_noise; ++i) sample_row(true);
    return ds;
}

Dataset gen_mixture(int n, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("mixture dataset requires n >= 2");
    const ExpressionTree lin = mixture_linear_truth();
    const ExpressionTree log = mixture_logistic_truth();
    Rng rng(seed);

    Dataset ds;
    ds.input_dim = 1;
    ds.provenance = "mixture";
    for (int i = 0; i < n; ++i) {
        const double x = rng.uniform(0.0, 10.0);
        const bool linear = rng.bernoulli(0.5);
        const auto out = (linear ? lin : log).evaluate_scalar(x);
        ds.inputs.push_back(x);
        ds.targets.push_back(out.value);
        ds.labels.emplace_back(linear ? "linear" : "logistic");
    }
    return ds;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

bool parse_field(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* endp = nullptr;
    out = std::strtod(s.c_str(), &endp);
    if (endp == s.c_str()) return false;
    while (*endp == ' ' || *endp == '\t') ++endp;
    return *endp == '\0' && std::isfinite(out);
}

int resolve_column(const std::vector<std::string>& header, const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    // fall back to a numeric index
    char* endp = nullptr;
    const long idx = std::strtol(name.c_str(), &endp, 10);
    if (endp != name.c_str() && *endp == '\0' && idx >= 0 &&
        idx < static_cast<long>(header.size()))
        return static_cast<int>(idx);
    throw std::runtime_error("column '" + name + "' not found in CSV header");
}

} // namespace

CsvLoadResult load_csv(const std::string& path, const std::vector<std::string>& x_cols,
                       const std::string& y_col) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open CSV file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty CSV file: " + path);
    const auto header = split_csv_line(line);

    std::vector<int> xi;
    xi.reserve(x_cols.size());
    for (const auto& c : x_cols) xi.push_back(resolve_column(header, c));
    const int yi = resolve_column(header, y_col);

    CsvLoadResult result;
    result.dataset.input_dim = static_cast<int>(xi.size());
    result.dataset.provenance = path;

    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        std::vector<double> x(xi.size());
        double y = 0.0;
        bool ok = true;
        for (std::size_t j = 0; j < xi.size() && ok; ++j)
            ok = static_cast<std::size_t>(xi[j]) < fields.size() &&
                 parse_field(fields[static_cast<std::size_t>(xi[j])], x[j]);
        ok = ok && static_cast<std::size_t>(yi) < fields.size() &&
             parse_field(fields[static_cast<std::size_t>(yi)], y);
        if (!ok) {
            ++result.skipped_rows;
            continue;
        }
        result.dataset.inputs.insert(result.dataset.inputs.end(), x.begin(), x.end());
        result.dataset.targets.push_back(y);
    }
    if (result.dataset.targets.empty())
        throw std::runtime_error("no valid rows in CSV file: " + path);
    return result;
}

Dataset apply_transform(const Dataset& ds, TransformKind kind) {
    Dataset out = ds;
    const int cols = ds.input_dim + 1;
    auto column_value = [&](int col, std::size_t row) -> double& {
        return col < out.input_dim
                   ? out.inputs[row * static_cast<std::size_t>(out.input_dim) +
                                static_cast<std::size_t>(col)]
                   : out.targets[row];
    };

    TransformStep step{kind, {}};
    for (int col = 0; col < cols; ++col) {
        if (kind == TransformKind::MinMax01) {
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            for (std::size_t i = 0; i < out.size(); ++i) {
                lo = std::min(lo, column_value(col, i));
                hi = std::max(hi, column_value(col, i));
            }
            step.col_min_max.emplace_back(lo, hi);
            for (std::size_t i = 0; i < out.size(); ++i) {
                double& v = column_value(col, i);
                v = hi > lo ? (v - lo) / (hi - lo) : 0.5;
            }
        } else {
            for (std::size_t i = 0; i < out.size(); ++i) {
                double& v = column_value(col, i);
                if (kind == TransformKind::Log10) {
                    if (!(v > 0.0))
                        throw std::domain_error("log10 transform requires positive values");
                    v = std::log10(v);
                } else {
                    v = std::pow(10.0, v);
                }
            }
        }
    }
    out.transform.steps.push_back(std::move(step));
    return out;
}

void write_dataset_csv(const Dataset& ds, std::ostream& out) {
    for (int j = 0; j < ds.input_dim; ++j) out << "x" << j << ",";
    out << "y,label\n";
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto r = ds.row(i);
        for (double v : r) out << format_double(v) << ",";
        out << format_double(ds.targets[i]) << "," << (ds.has_labels() ? ds.labels[i] : "")
            << "\n";
    }
}

} // namespace drsr
