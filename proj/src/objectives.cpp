#include "drsr/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace drsr {

std::string loss_kind_name(LossKind k) {
    switch (k) {
    case LossKind::MSE: return "mse";
    case LossKind::MAE: return "mae";
    case LossKind::MedAE: return "medae";
    }
    return "?";
}

LossKind loss_kind_from_name(const std::string& name) {
    if (name == "mse") return LossKind::MSE;
    if (name == "mae") return LossKind::MAE;
    if (name == "medae") return LossKind::MedAE;
    throw std::invalid_argument("unknown loss: " + name);
}

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

std::vector<double> residuals(const ExpressionTree& tree, const Dataset& ds) {
    if (ds.size() == 0) throw std::invalid_argument("residuals over an empty dataset");
    std::vector<double> r(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto out = tree.evaluate(ds.row(i));
        r[i] = out.flagged ? kGuardResidual : ds.targets[i] - out.value;
    }
    return r;
}

double median_of(std::vector<double> values) {
    const std::size_t n = values.size();
    const std::size_t mid = n / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    const double upper = values[mid];
    if (n % 2 == 1) return upper;
    const double lower =
        *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

double loss_from_residuals(LossKind kind, std::span<const double> r) {
    if (r.empty()) throw std::invalid_argument("loss over an empty residual vector");
    const double n = static_cast<double>(r.size());
    switch (kind) {
    case LossKind::MSE: {
        std::vector<double> sq(r.size());
        for (std::size_t i = 0; i < r.size(); ++i) sq[i] = r[i] * r[i];
        return pairwise_sum(sq) / n;
    }
    case LossKind::MAE: {
        std::vector<double> ab(r.size());
        for (std::size_t i = 0; i < r.size(); ++i) ab[i] = std::abs(r[i]);
        return pairwise_sum(ab) / n;
    }
    case LossKind::MedAE: {
        std::vector<double> ab(r.size());
        for (std::size_t i = 0; i < r.size(); ++i) ab[i] = std::abs(r[i]);
        return median_of(std::move(ab));
    }
    }
    throw std::logic_error("unreachable loss kind");
}

double loss(LossKind kind, const ExpressionTree& tree, const Dataset& ds) {
    return loss_from_residuals(kind, residuals(tree, ds));
}

double fitness_from_loss(double loss_value) { return 1.0 / (1.0 + loss_value); }

double fitness(LossKind kind, const ExpressionTree& tree, const Dataset& ds) {
    return fitness_from_loss(loss(kind, tree, ds));
}

} // namespace drsr
