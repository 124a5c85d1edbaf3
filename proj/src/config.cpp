#include "drsr/config.hpp"

#include <cstdio>
#include <fstream>

#include "drsr/rng.hpp"

namespace drsr {

namespace {

const nlohmann::json* find(const nlohmann::json& obj, const std::string& key) {
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

template <typename T>
T get_or(const nlohmann::json& obj, const std::string& path, const std::string& key, T fallback) {
    const auto* v = find(obj, key);
    if (!v) return fallback;
    try {
        return v->get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(path + key, "has the wrong type");
    }
}

std::string get_string(const nlohmann::json& obj, const std::string& path, const std::string& key,
                       const std::string& fallback) {
    return get_or<std::string>(obj, path, key, fallback);
}

void check_positive(std::int64_t v, const std::string& field) {
    if (v <= 0) throw ConfigError(field, "must be positive");
}

DatasetSpec parse_dataset(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("dataset", "must be an object");
    DatasetSpec spec;
    const std::string kind = get_string(j, "dataset.", "kind", "");
    if (kind == "nguyen") {
        spec.kind = DatasetSpec::Kind::Nguyen;
        spec.nguyen_name = get_or<int>(j, "dataset.", "name", 1);
        if (spec.nguyen_name != 1 && spec.nguyen_name != 7 && spec.nguyen_name != 11 &&
            spec.nguyen_name != 12)
            throw ConfigError("dataset.name", "must be one of 1, 7, 11, 12");
        spec.n_base = get_or<int>(j, "dataset.", "n_base", 20);
        spec.n_noise = get_or<int>(j, "dataset.", "n_noise", 20);
        check_positive(spec.n_base, "dataset.n_base");
        if (spec.n_noise < 0) throw ConfigError("dataset.n_noise", "must be non-negative");
    } else if (kind == "mixture") {
        spec.kind = DatasetSpec::Kind::Mixture;
        spec.mixture_n = get_or<int>(j, "dataset.", "n", 40);
        if (spec.mixture_n < 2) throw ConfigError("dataset.n", "must be at least 2");
    } else if (kind == "csv") {
        spec.kind = DatasetSpec::Kind::Csv;
        spec.csv_path = get_string(j, "dataset.", "path", "");
        if (spec.csv_path.empty()) throw ConfigError("dataset.path", "is required");
        spec.x_cols = get_or<std::vector<std::string>>(j, "dataset.", "x_cols", {});
        if (spec.x_cols.empty()) throw ConfigError("dataset.x_cols", "is required");
        spec.y_col = get_string(j, "dataset.", "y_col", "");
        if (spec.y_col.empty()) throw ConfigError("dataset.y_col", "is required");
        for (const auto& name :
             get_or<std::vector<std::string>>(j, "dataset.", "transforms", {})) {
            try {
                spec.transforms.push_back(transform_kind_from_name(name));
            } catch (const std::invalid_argument&) {
                throw ConfigError("dataset.transforms", "unknown transform '" + name + "'");
            }
        }
    } else {
        throw ConfigError("dataset.kind", "must be one of nguyen, mixture, csv");
    }
    return spec;
}

} // namespace

RunSpec parse_run_spec(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ConfigError("", "config must be a JSON object");
    RunSpec spec;
    auto& e = spec.engine;

    try {
        e.method = method_from_name(get_string(doc, "", "method", "drsr"));
    } catch (const std::invalid_argument& ex) {
        throw ConfigError("method", ex.what());
    }
    try {
        e.loss = loss_kind_from_name(get_string(doc, "", "loss", "medae"));
    } catch (const std::invalid_argument& ex) {
        throw ConfigError("loss", ex.what());
    }
    e.budget = get_or<std::uint64_t>(doc, "", "budget", e.budget);
    if (e.budget == 0) throw ConfigError("budget", "must be positive");
    e.population = get_or<int>(doc, "", "population", e.population);
    if (e.population < 2) throw ConfigError("population", "must be at least 2");
    e.seed = get_or<std::uint64_t>(doc, "", "seed", e.seed);
    e.trace_stride = get_or<int>(doc, "", "trace_stride", e.trace_stride);
    check_positive(e.trace_stride, "trace_stride");
    e.tournament = get_or<int>(doc, "", "tournament", e.tournament);
    check_positive(e.tournament, "tournament");

    if (const auto* archive = find(doc, "archive")) {
        e.clusters = get_or<int>(*archive, "archive.", "clusters", e.clusters);
        check_positive(e.clusters, "archive.clusters");
        e.limits.max_nodes = get_or<int>(*archive, "archive.", "max_nodes", e.limits.max_nodes);
        check_positive(e.limits.max_nodes, "archive.max_nodes");
        e.limits.max_depth = get_or<int>(*archive, "archive.", "max_depth", e.limits.max_depth);
        check_positive(e.limits.max_depth, "archive.max_depth");
        e.trans_cap = get_or<int>(*archive, "archive.", "trans_cap", e.trans_cap);
        if (e.trans_cap < 0) throw ConfigError("archive.trans_cap", "must be non-negative");
    }
    if (const auto* ops = find(doc, "operators")) {
        e.crossover_rate = get_or<double>(*ops, "operators.", "crossover_rate", e.crossover_rate);
        e.mutation_rate = get_or<double>(*ops, "operators.", "mutation_rate", e.mutation_rate);
        if (e.crossover_rate < 0.0 || e.crossover_rate > 1.0)
            throw ConfigError("operators.crossover_rate", "must lie in [0, 1]");
        if (e.mutation_rate < 0.0 || e.mutation_rate > 1.0)
            throw ConfigError("operators.mutation_rate", "must lie in [0, 1]");
    }
    if (const auto* es = find(doc, "es")) {
        e.es.lambda = get_or<int>(*es, "es.", "lambda", e.es.lambda);
        if (e.es.lambda < 2) throw ConfigError("es.lambda", "must be at least 2");
        e.es.generations = get_or<int>(*es, "es.", "generations", e.es.generations);
        check_positive(e.es.generations, "es.generations");
        e.es.sigma0 = get_or<double>(*es, "es.", "sigma0", e.es.sigma0);
        if (!(e.es.sigma0 > 0.0)) throw ConfigError("es.sigma0", "must be positive");
    }
    e.probe_count = get_or<int>(doc, "", "probe_count", e.probe_count);
    if (e.probe_count < 0) throw ConfigError("probe_count", "must be non-negative");

    const auto* ds = find(doc, "dataset");
    if (!ds) throw ConfigError("dataset", "is required");
    spec.dataset = parse_dataset(*ds);

    spec.trials = get_or<int>(doc, "", "trials", 1);
    check_positive(spec.trials, "trials");
    return spec;
}

RunSpec load_run_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError("", std::string("invalid JSON: ") + ex.what());
    }
    return parse_run_spec(doc);
}

nlohmann::json run_spec_to_json(const RunSpec& spec) {
    const auto& e = spec.engine;
    nlohmann::json doc;
    doc["method"] = method_name(e.method);
    doc["loss"] = loss_kind_name(e.loss);
    doc["budget"] = e.budget;
    doc["population"] = e.population;
    doc["seed"] = e.seed;
    doc["trials"] = spec.trials;
    doc["trace_stride"] = e.trace_stride;
    doc["tournament"] = e.tournament;
    doc["probe_count"] = e.probe_count;
    doc["archive"] = {{"clusters", e.clusters},
                      {"max_nodes", e.limits.max_nodes},
                      {"max_depth", e.limits.max_depth},
                      {"trans_cap", e.trans_cap}};
    doc["operators"] = {{"crossover_rate", e.crossover_rate},
                        {"mutation_rate", e.mutation_rate}};
    doc["es"] = {{"lambda", e.es.lambda},
                 {"generations", e.es.generations},
                 {"sigma0", e.es.sigma0}};
    nlohmann::json ds;
    switch (spec.dataset.kind) {
    case DatasetSpec::Kind::Nguyen:
        ds = {{"kind", "nguyen"},
              {"name", spec.dataset.nguyen_name},
              {"n_base", spec.dataset.n_base},
              {"n_noise", spec.dataset.n_noise}};
        break;
    case DatasetSpec::Kind::Mixture:
        ds = {{"kind", "mixture"}, {"n", spec.dataset.mixture_n}};
        break;
    case DatasetSpec::Kind::Csv: {
        nlohmann::json transforms = nlohmann::json::array();
        for (const auto t : spec.dataset.transforms) transforms.push_back(transform_kind_name(t));
        ds = {{"kind", "csv"},
              {"path", spec.dataset.csv_path},
              {"x_cols", spec.dataset.x_cols},
              {"y_col", spec.dataset.y_col},
              {"transforms", transforms}};
        break;
    }
    }
    doc["dataset"] = ds;
    return doc;
}

std::string config_hash(const nlohmann::json& doc) {
    const std::string canon = doc.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Dataset materialize_dataset(const DatasetSpec& spec, std::uint64_t seed) {
    switch (spec.kind) {
    case DatasetSpec::Kind::Nguyen:
        return gen_nguyen(spec.nguyen_name, spec.n_base, spec.n_noise, derive_seed(seed, 0));
    case DatasetSpec::Kind::Mixture:
        return gen_mixture(spec.mixture_n, derive_seed(seed, 0));
    case DatasetSpec::Kind::Csv: {
        Dataset ds = load_csv(spec.csv_path, spec.x_cols, spec.y_col).dataset;
        for (const auto t : spec.transforms) ds = apply_transform(ds, t);
        return ds;
    }
    }
    throw std::logic_error("unreachable dataset kind");
}

} // namespace drsr
