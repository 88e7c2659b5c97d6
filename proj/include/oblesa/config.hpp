#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "oblesa/harness.hpp"

namespace oblesa::config {

inline constexpr std::string_view kToolVersion = "0.1.0";

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using json = nlohmann::json;

/// Full-grid defaults: 3 strategies x 2 optimizers x 6 dimensions x
/// (10 functions x 3 instances) x seeds 1-10, n_pop 100, 500 iterations.
inline harness::GridConfig default_grid() { return harness::GridConfig{}; }

/// Shrunken grids for quick runs.
///  - desk:    dims {2, 5, 10}, seeds 1-3, a 5-function subset.
///  - desk-hd: the same subset at dims {20, 40}, seeds 1-5.
inline void apply_preset(harness::GridConfig& grid, const std::string& name) {
    const std::vector<bench::FunctionId> subset{
        bench::FunctionId::Sphere,     bench::FunctionId::Rastrigin,
        bench::FunctionId::Rosenbrock, bench::FunctionId::BentCigar,
        bench::FunctionId::SchaffersF7,
    };
    if (name == "full") return;
    if (name == "desk") {
        grid.dimensions = {2, 5, 10};
        grid.seeds = {1, 2, 3};
        grid.suite.functions = subset;
        return;
    }
    if (name == "desk-hd") {
        grid.dimensions = {20, 40};
        grid.seeds = {1, 2, 3, 4, 5};
        grid.suite.functions = subset;
        return;
    }
    throw ConfigError("unknown preset '" + name + "' (expected full, desk, or desk-hd)");
}

inline json to_json(const harness::GridConfig& grid) {
    json suite_functions = json::array();
    for (bench::FunctionId f : grid.suite.functions)
        suite_functions.push_back(std::string(bench::function_name(f)));
    json strategies = json::array();
    for (init::Strategy s : grid.strategies)
        strategies.push_back(std::string(init::strategy_name(s)));
    json optimizers = json::array();
    for (optim::Algorithm a : grid.optimizers)
        optimizers.push_back(std::string(optim::algorithm_name(a)));

    return json{
        {"dimensions", grid.dimensions},
        {"seeds", grid.seeds},
        {"strategies", strategies},
        {"optimizers", optimizers},
        {"suite",
         {{"functions", suite_functions},
          {"instances", grid.suite.instances},
          {"target_precision", grid.suite.target_precision},
          {"budget_multiplier", grid.suite.budget_multiplier}}},
        {"init", {{"n_pop", grid.init.n_pop}}},
        {"esa",
         {{"k", grid.init.esa_params.k ? json(*grid.init.esa_params.k) : json(nullptr)},
          {"sigma",
           grid.init.esa_params.sigma ? json(*grid.init.esa_params.sigma) : json(nullptr)},
          {"n_steps", grid.init.esa_params.n_steps},
          {"alpha", grid.init.esa_params.alpha},
          {"delta", grid.init.esa_params.delta},
          {"exact_knn", grid.init.esa_params.exact_knn}}},
        {"optimizer",
         {{"max_iterations", grid.optimizer.max_iterations},
          {"de_f", grid.optimizer.de_f},
          {"de_cr", grid.optimizer.de_cr},
          {"de_mutant_retries", grid.optimizer.de_mutant_retries}}},
        {"parallelism", grid.parallelism},
    };
}

namespace detail {

inline void check_known_keys(const json& value, const json& schema, const std::string& path) {
    if (!value.is_object()) return;
    for (const auto& [key, sub] : value.items()) {
        if (!schema.contains(key))
            throw ConfigError("unknown config key '" + (path.empty() ? key : path + "." + key) +
                              "'");
        check_known_keys(sub, schema.at(key), path.empty() ? key : path + "." + key);
    }
}

template <typename T>
inline T get(const json& obj, const std::string& key, const std::string& path) {
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("config key '" + path + "." + key + "': " + e.what());
    }
}

// Object-wise merge that keeps explicit nulls (json::merge_patch would treat
// them as key deletions, but null is a meaningful "unset" here, e.g. esa.k).
inline void deep_merge(json& base, const json& patch) {
    if (!patch.is_object() || !base.is_object()) {
        base = patch;
        return;
    }
    for (const auto& [key, value] : patch.items()) {
        if (value.is_object() && base.contains(key) && base.at(key).is_object())
            deep_merge(base[key], value);
        else
            base[key] = value;
    }
}

} // namespace detail

/// Builds a grid from a fully resolved config object (defaults already
/// merged in). Every key must be known and every invariant satisfied.
inline harness::GridConfig from_json(const json& cfg) {
    detail::check_known_keys(cfg, to_json(default_grid()), "");
    harness::GridConfig grid;
    try {
        grid.dimensions = detail::get<std::vector<int>>(cfg, "dimensions", "");
        grid.seeds = detail::get<std::vector<int>>(cfg, "seeds", "");

        grid.strategies.clear();
        for (const auto& name : detail::get<std::vector<std::string>>(cfg, "strategies", "")) {
            const auto s = init::strategy_from_name(name);
            if (!s) throw ConfigError("unknown strategy '" + name + "'");
            grid.strategies.push_back(*s);
        }
        grid.optimizers.clear();
        for (const auto& name : detail::get<std::vector<std::string>>(cfg, "optimizers", "")) {
            const auto a = optim::algorithm_from_name(name);
            if (!a) throw ConfigError("unknown optimizer '" + name + "'");
            grid.optimizers.push_back(*a);
        }

        const json& suite = cfg.at("suite");
        grid.suite.functions.clear();
        for (const auto& name : detail::get<std::vector<std::string>>(suite, "functions", "suite")) {
            const auto f = bench::function_from_name(name);
            if (!f) throw ConfigError("unknown function '" + name + "'");
            grid.suite.functions.push_back(*f);
        }
        grid.suite.instances = detail::get<int>(suite, "instances", "suite");
        grid.suite.target_precision = detail::get<double>(suite, "target_precision", "suite");
        grid.suite.budget_multiplier = detail::get<std::int64_t>(suite, "budget_multiplier", "suite");

        grid.init.n_pop = detail::get<int>(cfg.at("init"), "n_pop", "init");

        const json& esa = cfg.at("esa");
        if (!esa.at("k").is_null()) grid.init.esa_params.k = detail::get<int>(esa, "k", "esa");
        if (!esa.at("sigma").is_null())
            grid.init.esa_params.sigma = detail::get<double>(esa, "sigma", "esa");
        grid.init.esa_params.n_steps = detail::get<int>(esa, "n_steps", "esa");
        grid.init.esa_params.alpha = detail::get<double>(esa, "alpha", "esa");
        grid.init.esa_params.delta = detail::get<double>(esa, "delta", "esa");
        grid.init.esa_params.exact_knn = detail::get<bool>(esa, "exact_knn", "esa");

        const json& opt = cfg.at("optimizer");
        grid.optimizer.max_iterations = detail::get<int>(opt, "max_iterations", "optimizer");
        grid.optimizer.de_f = detail::get<double>(opt, "de_f", "optimizer");
        grid.optimizer.de_cr = detail::get<double>(opt, "de_cr", "optimizer");
        grid.optimizer.de_mutant_retries =
            detail::get<int>(opt, "de_mutant_retries", "optimizer");

        grid.parallelism = detail::get<int>(cfg, "parallelism", "");
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }

    try {
        harness::validate(grid);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return grid;
}

inline json load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config file '" + path.string() + "': " + e.what());
    }
}

/// Applies one `dotted.path=value` override onto a config object. The value
/// is parsed as JSON when possible and falls back to a bare string.
inline void apply_override(json& cfg, const std::string& keyval) {
    const std::size_t eq = keyval.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override must look like key=value, got '" + keyval + "'");
    const std::string path = keyval.substr(0, eq);
    const std::string raw = keyval.substr(eq + 1);

    json value;
    try {
        value = json::parse(raw);
    } catch (const json::exception&) {
        value = raw;
    }

    json* node = &cfg;
    std::size_t start = 0;
    while (true) {
        const std::size_t dot = path.find('.', start);
        const std::string part = path.substr(start, dot - start);
        if (part.empty()) throw ConfigError("bad override path '" + path + "'");
        if (dot == std::string::npos) {
            (*node)[part] = value;
            return;
        }
        node = &(*node)[part];
        start = dot + 1;
    }
}

/// Resolution order: defaults, then preset, then config file (merge-patch),
/// then individual overrides.
inline harness::GridConfig resolve(const json* file_cfg, const std::string& preset,
                                   const std::vector<std::string>& overrides) {
    harness::GridConfig base = default_grid();
    if (!preset.empty()) apply_preset(base, preset);
    json cfg = to_json(base);
    if (file_cfg) {
        detail::check_known_keys(*file_cfg, cfg, "");
        detail::deep_merge(cfg, *file_cfg);
    }
    for (const auto& kv : overrides) apply_override(cfg, kv);
    return from_json(cfg);
}

inline std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return 0;
    std::uint64_t h = 1469598103934665603ULL;
    char buf[65536];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
        if (got < static_cast<std::streamsize>(sizeof(buf))) break;
    }
    return h;
}

/// Provenance record written next to records.csv: the resolved config, the
/// derived per-cell stream seeds, and content hashes of config and binary.
inline json make_manifest(const harness::GridConfig& grid,
                          const std::filesystem::path& binary_path) {
    const json cfg = to_json(grid);
    json cells = json::array();
    for (const auto& cell : harness::enumerate_cells(grid)) {
        cells.push_back(json{
            {"strategy", std::string(init::strategy_name(cell.strategy))},
            {"optimizer", std::string(optim::algorithm_name(cell.optimizer))},
            {"function", std::string(bench::function_name(cell.spec.function_id))},
            {"instance", cell.spec.instance},
            {"dim", cell.spec.dimension},
            {"seed", cell.seed},
            {"rng_seed", harness::cell_seed(cell.seed, cell.strategy, cell.optimizer,
                                            cell.spec.function_id, cell.spec.instance,
                                            cell.spec.dimension)},
        });
    }
    return json{
        {"tool", "oblesa"},
        {"version", std::string(kToolVersion)},
        {"config", cfg},
        {"config_fnv64", fnv1a64(cfg.dump())},
        {"binary_fnv64", fnv1a64_file(binary_path)},
        {"cell_seed_rule",
         "splitmix64 chain over (seed, strategy, optimizer, function, instance, dim)"},
        {"cells", cells},
    };
}

} // namespace oblesa::config
