#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "oblesa/benchmarks.hpp"
#include "oblesa/core.hpp"
#include "oblesa/init.hpp"
#include "oblesa/optim.hpp"

namespace oblesa::harness {

/// Outcome of one grid cell. The key
/// (strategy, optimizer, function, instance, dimension, seed) is unique
/// within a grid. diagnostic is empty unless the cell failed; failures never
/// abort a sweep, they are recorded as unsolved.
struct RunRecord {
    init::Strategy strategy = init::Strategy::Random;
    optim::Algorithm optimizer = optim::Algorithm::De;
    bench::FunctionId function_id = bench::FunctionId::Sphere;
    int instance = 0;
    int dimension = 2;
    int seed = 1;
    bool solved = false;
    std::int64_t evals = 0;
    double best_fitness = std::numeric_limits<double>::infinity();
    std::string diagnostic;

    auto key() const {
        return std::make_tuple(static_cast<int>(strategy), static_cast<int>(optimizer),
                               dimension, static_cast<int>(function_id), instance, seed);
    }
};

struct GridConfig {
    std::vector<int> dimensions{2, 3, 5, 10, 20, 40};
    std::vector<int> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::vector<init::Strategy> strategies{init::Strategy::Random, init::Strategy::Obl,
                                           init::Strategy::Oblesa};
    std::vector<optim::Algorithm> optimizers{optim::Algorithm::De, optim::Algorithm::Egwo};
    bench::SuiteConfig suite;
    init::InitConfig init; // strategy field is ignored; the grid supplies it
    optim::OptimizerConfig optimizer; // algorithm field is ignored likewise
    int parallelism = 0; // 0 = hardware concurrency
};

inline void validate(const GridConfig& cfg) {
    if (cfg.dimensions.empty()) throw std::invalid_argument("GridConfig: dimensions empty");
    for (int d : cfg.dimensions)
        if (!bench::protocol_dimension(d))
            throw std::invalid_argument("GridConfig: dimension must be one of 2, 3, 5, 10, 20, 40");
    if (cfg.seeds.empty()) throw std::invalid_argument("GridConfig: seeds empty");
    std::vector<int> seeds = cfg.seeds;
    std::sort(seeds.begin(), seeds.end());
    if (std::adjacent_find(seeds.begin(), seeds.end()) != seeds.end())
        throw std::invalid_argument("GridConfig: seeds must be distinct");
    if (cfg.strategies.empty()) throw std::invalid_argument("GridConfig: strategies empty");
    if (cfg.optimizers.empty()) throw std::invalid_argument("GridConfig: optimizers empty");
    if (cfg.suite.functions.empty()) throw std::invalid_argument("GridConfig: suite functions empty");
    if (cfg.suite.instances < 1) throw std::invalid_argument("GridConfig: suite instances >= 1");
    if (cfg.parallelism < 0) throw std::invalid_argument("GridConfig: parallelism >= 0");
    init::InitConfig icfg = cfg.init;
    icfg.strategy = init::Strategy::Random;
    init::validate(icfg);
    optim::OptimizerConfig ocfg = cfg.optimizer;
    optim::validate(ocfg);
}

/// Stream seed for one cell: a pure function of the cell key, so a rerun of
/// any subset of the grid reproduces the exact same cell.
inline std::uint64_t cell_seed(int seed, init::Strategy strategy, optim::Algorithm optimizer,
                               bench::FunctionId function_id, int instance, int dimension) {
    std::uint64_t h = fnv1a64("oblesa.cell");
    h = RandomSource::mix_seed(h, static_cast<std::uint64_t>(seed));
    h = RandomSource::mix_seed(h, static_cast<std::uint64_t>(strategy));
    h = RandomSource::mix_seed(h, static_cast<std::uint64_t>(optimizer));
    h = RandomSource::mix_seed(h, static_cast<std::uint64_t>(function_id));
    h = RandomSource::mix_seed(h, static_cast<std::uint64_t>(instance));
    h = RandomSource::mix_seed(h, static_cast<std::uint64_t>(dimension));
    return h;
}

struct Cell {
    init::Strategy strategy;
    optim::Algorithm optimizer;
    bench::BenchmarkSpec spec;
    int seed;
};

inline std::vector<Cell> enumerate_cells(const GridConfig& cfg) {
    std::vector<Cell> cells;
    for (init::Strategy s : cfg.strategies)
        for (optim::Algorithm o : cfg.optimizers)
            for (int dim : cfg.dimensions)
                for (const bench::BenchmarkSpec& spec : bench::suite(dim, cfg.suite))
                    for (int seed : cfg.seeds) cells.push_back(Cell{s, o, spec, seed});
    return cells;
}

/// Runs one cell to completion. Never throws: budget exhaustion is a normal
/// ending, anything else is recorded in the diagnostic field.
inline RunRecord run_cell(const Cell& cell, const GridConfig& cfg) {
    RunRecord rec;
    rec.strategy = cell.strategy;
    rec.optimizer = cell.optimizer;
    rec.function_id = cell.spec.function_id;
    rec.instance = cell.spec.instance;
    rec.dimension = cell.spec.dimension;
    rec.seed = cell.seed;

    RandomSource instance_rng = bench::make_instance_rng(cell.spec);
    Problem problem = bench::make_problem(cell.spec, instance_rng);
    RandomSource rng(cell_seed(cell.seed, cell.strategy, cell.optimizer, cell.spec.function_id,
                               cell.spec.instance, cell.spec.dimension));

    auto finalize_from_problem = [&] {
        rec.solved = problem.target_reached();
        rec.evals = problem.evals_used();
        rec.best_fitness = problem.best_value();
    };

    try {
        init::InitConfig icfg = cfg.init;
        icfg.strategy = cell.strategy;
        Population pop = init::initialize(problem, icfg, rng);

        optim::OptimizerConfig ocfg = cfg.optimizer;
        ocfg.algorithm = cell.optimizer;
        const optim::OptResult result = optim::run(problem, std::move(pop), ocfg, rng);
        rec.solved = result.reached_target;
        rec.evals = result.evals_used;
        rec.best_fitness = result.best_fitness;
    } catch (const BudgetExhausted&) {
        finalize_from_problem();
    } catch (const std::exception& e) {
        finalize_from_problem();
        rec.solved = false;
        rec.diagnostic = e.what();
    }
    if (std::isnan(rec.best_fitness)) {
        rec.solved = false;
        if (rec.diagnostic.empty()) rec.diagnostic = "nan fitness";
    }
    return rec;
}

/// Runs the whole strategy x optimizer x dimension x (function, instance) x
/// seed grid. Cells execute in parallel, each with its own problem and
/// stream; the result is sorted canonically, so it does not depend on the
/// schedule or thread count.
inline std::vector<RunRecord> run_grid(const GridConfig& cfg) {
    validate(cfg);
    const std::vector<Cell> cells = enumerate_cells(cfg);
    std::vector<RunRecord> records(cells.size());

    unsigned workers = cfg.parallelism > 0 ? static_cast<unsigned>(cfg.parallelism)
                                           : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(cells.size()));

    if (workers <= 1) {
        for (std::size_t i = 0; i < cells.size(); ++i) records[i] = run_cell(cells[i], cfg);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1))
                    records[i] = run_cell(cells[i], cfg);
            });
        }
        for (auto& t : pool) t.join();
    }

    std::sort(records.begin(), records.end(),
              [](const RunRecord& a, const RunRecord& b) { return a.key() < b.key(); });
    return records;
}

// ---------------------------------------------------------------------------
// records.csv

inline constexpr std::string_view kRecordsCsvHeader =
    "strategy,optimizer,function,instance,dim,seed,solved,evals,best_fitness";

/// Shortest decimal form that round-trips through a double.
inline std::string format_double(double v) {
    char buf[40];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, p);
}

inline void write_records_csv(std::ostream& os, const std::vector<RunRecord>& records) {
    os << kRecordsCsvHeader << '\n';
    for (const auto& r : records) {
        os << init::strategy_name(r.strategy) << ',' << optim::algorithm_name(r.optimizer) << ','
           << bench::function_name(r.function_id) << ',' << r.instance << ',' << r.dimension
           << ',' << r.seed << ',' << (r.solved ? '1' : '0') << ',' << r.evals << ','
           << format_double(r.best_fitness) << '\n';
    }
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

template <typename T>
inline T parse_number(const std::string& s, std::size_t line_no, const char* what) {
    T value{};
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || p != end)
        throw std::runtime_error("records csv line " + std::to_string(line_no) + ": bad " + what +
                                 " '" + s + "'");
    return value;
}

} // namespace detail

inline std::vector<RunRecord> read_records_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line))
        throw std::runtime_error("records csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kRecordsCsvHeader)
        throw std::runtime_error("records csv: unexpected header '" + line + "'");

    std::vector<RunRecord> records;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != 9)
            throw std::runtime_error("records csv line " + std::to_string(line_no) +
                                     ": expected 9 fields, got " + std::to_string(fields.size()));
        RunRecord r;
        const auto strategy = init::strategy_from_name(fields[0]);
        if (!strategy)
            throw std::runtime_error("records csv line " + std::to_string(line_no) +
                                     ": unknown strategy '" + fields[0] + "'");
        r.strategy = *strategy;
        const auto optimizer = optim::algorithm_from_name(fields[1]);
        if (!optimizer)
            throw std::runtime_error("records csv line " + std::to_string(line_no) +
                                     ": unknown optimizer '" + fields[1] + "'");
        r.optimizer = *optimizer;
        const auto function_id = bench::function_from_name(fields[2]);
        if (!function_id)
            throw std::runtime_error("records csv line " + std::to_string(line_no) +
                                     ": unknown function '" + fields[2] + "'");
        r.function_id = *function_id;
        r.instance = detail::parse_number<int>(fields[3], line_no, "instance");
        r.dimension = detail::parse_number<int>(fields[4], line_no, "dim");
        r.seed = detail::parse_number<int>(fields[5], line_no, "seed");
        if (fields[6] == "1")
            r.solved = true;
        else if (fields[6] == "0")
            r.solved = false;
        else
            throw std::runtime_error("records csv line " + std::to_string(line_no) +
                                     ": bad solved flag '" + fields[6] + "'");
        r.evals = detail::parse_number<std::int64_t>(fields[7], line_no, "evals");
        r.best_fitness = detail::parse_number<double>(fields[8], line_no, "best_fitness");
        records.push_back(std::move(r));
    }
    return records;
}

// ---------------------------------------------------------------------------
// fraction of targets reached

inline const std::vector<std::string>& default_group_by() {
    static const std::vector<std::string> keys{"strategy", "optimizer", "dim", "seed"};
    return keys;
}

inline std::string record_field(const RunRecord& r, const std::string& field) {
    if (field == "strategy") return std::string(init::strategy_name(r.strategy));
    if (field == "optimizer") return std::string(optim::algorithm_name(r.optimizer));
    if (field == "function") return std::string(bench::function_name(r.function_id));
    if (field == "instance") return std::to_string(r.instance);
    if (field == "dim") return std::to_string(r.dimension);
    if (field == "seed") return std::to_string(r.seed);
    throw std::invalid_argument("record_field: unknown field '" + field + "'");
}

struct FractionRow {
    std::vector<std::string> key; // values of the group_by fields, in order
    int solved = 0;
    int total = 0;
    double fraction = 0.0;
};

/// Share of runs per group that reached the target. Default grouping pools
/// all (function, instance) cells per strategy x optimizer x dim x seed.
inline std::vector<FractionRow> fraction_solved(
    const std::vector<RunRecord>& records,
    const std::vector<std::string>& group_by = default_group_by()) {
    if (records.empty()) throw std::invalid_argument("fraction_solved: no records");
    if (group_by.empty()) throw std::invalid_argument("fraction_solved: no grouping keys");

    std::map<std::vector<std::string>, std::pair<int, int>> groups;
    for (const auto& r : records) {
        std::vector<std::string> key;
        key.reserve(group_by.size());
        for (const auto& field : group_by) key.push_back(record_field(r, field));
        auto& [solved, total] = groups[key];
        if (r.solved) ++solved;
        ++total;
    }

    std::vector<FractionRow> rows;
    rows.reserve(groups.size());
    for (const auto& [key, counts] : groups) {
        FractionRow row;
        row.key = key;
        row.solved = counts.first;
        row.total = counts.second;
        row.fraction = static_cast<double>(counts.first) / static_cast<double>(counts.second);
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace oblesa::harness
