#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "drsr/expression.hpp"

namespace drsr {

enum class TransformKind { Delog10, Log10, MinMax01 };

std::string transform_kind_name(TransformKind k);
TransformKind transform_kind_from_name(const std::string& name); // throws on unknown

// One applied transform step over all columns (inputs first, target last).
// MinMax01 records the (min, max) observed per column so it can be inverted
// exactly; the log transforms are self-describing.
struct TransformStep {
    TransformKind kind;
    std::vector<std::pair<double, double>> col_min_max; // only for MinMax01
};

struct TransformRecord {
    std::vector<TransformStep> steps;
    bool empty() const { return steps.empty(); }
};

// Maps a value of column `col` from the transformed space back to the
// original units by undoing the recorded steps in reverse order.
double inverse_transform_value(const TransformRecord& record, int col, double value);

std::string transform_record_to_json(const TransformRecord&);

// Observations (x, y) with optional per-row subset labels (base/noise,
// linear/logistic) used by the experiment metrics.
struct Dataset {
    int input_dim = 1;
    std::vector<double> inputs; // row-major, size n * input_dim
    std::vector<double> targets;
    std::vector<std::string> labels; // empty, or one label per row
    std::string provenance;
    TransformRecord transform;

    std::size_t size() const { return targets.size(); }
    std::span<const double> row(std::size_t i) const {
        return {inputs.data() + i * static_cast<std::size_t>(input_dim),
                static_cast<std::size_t>(input_dim)};
    }
    bool has_labels() const { return !labels.empty(); }
    bool has_label(std::string_view label) const;
    Dataset subset(std::string_view label) const;

    // per-input-dimension [min, max] over the rows
    std::vector<std::pair<double, double>> input_bounds() const;
};

// Nguyen benchmark datasets with injected outliers: n_base clean rows plus
// n_noise rows with additive N(0,1) noise. Supported names: 1, 7, 11, 12.
Dataset gen_nguyen(int name, int n_base, int n_noise, std::uint64_t seed);

// Equal-probability mixture of a linear and a logistic price-demand regime
// over x in [0, 10]; rows are labeled "linear" / "logistic".
Dataset gen_mixture(int n, std::uint64_t seed);

// Ground-truth expressions built from the tree alphabet (powers expanded
// into products). Targets produced by the generators evaluate these trees,
// so ground-truth residuals on clean rows are exactly zero.
ExpressionTree nguyen_ground_truth(int name);
ExpressionTree mixture_linear_truth();
ExpressionTree mixture_logistic_truth();

struct CsvLoadResult {
    Dataset dataset;
    int skipped_rows = 0;
};

// Comma-separated, first row header, UTF-8. Columns are selected by header
// name, or by 0-based index when the name is not present and parses as an
// integer. Rows with a missing or non-numeric selected field are skipped
// and counted. Throws std::runtime_error on unreadable files or when no
// valid rows remain.
CsvLoadResult load_csv(const std::string& path, const std::vector<std::string>& x_cols,
                       const std::string& y_col);

// Applies the transform to every column (inputs and target), appending to
// the dataset's transform record. Log10 throws std::domain_error on
// non-positive values.
Dataset apply_transform(const Dataset& ds, TransformKind kind);

void write_dataset_csv(const Dataset& ds, std::ostream& out);

} // namespace drsr
