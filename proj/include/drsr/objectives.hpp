#pragma once

#include <span>
#include <string>
#include <vector>

#include "drsr/datasets.hpp"
#include "drsr/expression.hpp"

namespace drsr {

enum class LossKind { MSE, MAE, MedAE };

std::string loss_kind_name(LossKind k);
LossKind loss_kind_from_name(const std::string& name); // throws on unknown

// Order-independent summation (recursive pairwise), so parallel or shuffled
// residual evaluation yields the same loss to well below 1e-12.
double pairwise_sum(std::span<const double> values);

// r_i = y_i - f(x_i); guard-flagged observations carry +kGuardResidual.
// Throws std::invalid_argument on an empty dataset.
std::vector<double> residuals(const ExpressionTree& tree, const Dataset& ds);

double loss_from_residuals(LossKind kind, std::span<const double> residuals);
double loss(LossKind kind, const ExpressionTree& tree, const Dataset& ds);

// 1 / (1 + loss): maps minimization onto (0, 1] maximization.
double fitness_from_loss(double loss_value);
double fitness(LossKind kind, const ExpressionTree& tree, const Dataset& ds);

// Median with the even-n convention: mean of the two middle order statistics.
double median_of(std::vector<double> values);

} // namespace drsr
