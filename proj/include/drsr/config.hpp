#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "drsr/datasets.hpp"
#include "drsr/engines.hpp"

namespace drsr {

// Validation failure; `field` holds the JSON path of the offending entry.
struct ConfigError : std::runtime_error {
    ConfigError(const std::string& field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_path(field) {}
    std::string field_path;
};

struct DatasetSpec {
    enum class Kind { Nguyen, Mixture, Csv } kind = Kind::Mixture;
    // nguyen
    int nguyen_name = 1;
    int n_base = 20;
    int n_noise = 20;
    // mixture
    int mixture_n = 40;
    // csv
    std::string csv_path;
    std::vector<std::string> x_cols;
    std::string y_col;
    std::vector<TransformKind> transforms;
};

struct RunSpec {
    EngineConfig engine;
    DatasetSpec dataset;
    int trials = 1;
};

// Parses and validates the experiment configuration document. Unknown or
// ill-typed fields throw ConfigError naming the field.
RunSpec parse_run_spec(const nlohmann::json& doc);
RunSpec load_run_spec(const std::string& path); // throws ConfigError / runtime_error

nlohmann::json run_spec_to_json(const RunSpec& spec);

// 16-hex-digit FNV-1a over the canonical (sorted-key) config dump
std::string config_hash(const nlohmann::json& doc);

// Generator datasets draw from a stream derived from the trial seed; CSV
// datasets are loaded and transformed as specified.
Dataset materialize_dataset(const DatasetSpec& spec, std::uint64_t seed);

} // namespace drsr
