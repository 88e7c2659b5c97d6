#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

#include "oblesa/core.hpp"
#include "oblesa/esa.hpp"

namespace oblesa::init {

enum class Strategy { Random, Obl, Oblesa };

constexpr std::string_view strategy_name(Strategy s) {
    switch (s) {
        case Strategy::Random: return "random";
        case Strategy::Obl: return "obl";
        case Strategy::Oblesa: return "oblesa";
    }
    return "unknown";
}

inline std::optional<Strategy> strategy_from_name(std::string_view name) {
    for (Strategy s : {Strategy::Random, Strategy::Obl, Strategy::Oblesa})
        if (strategy_name(s) == name) return s;
    return std::nullopt;
}

struct InitConfig {
    int n_pop = 100;
    Strategy strategy = Strategy::Random;
    esa::EsaParams esa_params;
};

inline void validate(const InitConfig& cfg) {
    if (cfg.n_pop < 2) throw std::invalid_argument("InitConfig: n_pop >= 2 required");
    esa::validate(cfg.esa_params);
}

/// n points uniform in the box, fitness unset. Draw order is one point at a
/// time, dimension by dimension; callers that must share a stream rely on it.
inline Population random_init(const Bounds& bounds, int n, RandomSource& rng) {
    if (n < 1) throw std::invalid_argument("random_init: n >= 1 required");
    std::vector<Individual> members;
    members.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        Vector x(bounds.dim());
        for (std::size_t j = 0; j < bounds.dim(); ++j)
            x[j] = rng.uniform(bounds.lower()[j], bounds.upper()[j]);
        members.push_back(Individual{std::move(x), std::nullopt});
    }
    return Population(std::move(members), bounds);
}

/// Boundary reflection x'_i = lower_i + upper_i - x_i, computed from the
/// nearer endpoint so the result stays inside the box under floating-point
/// rounding. Requires the input to be inside the bounds.
inline Vector opposite(const Vector& position, const Bounds& bounds) {
    if (position.size() != bounds.dim())
        throw std::invalid_argument("opposite: dimension mismatch");
    Vector out(position.size());
    for (std::size_t i = 0; i < position.size(); ++i) {
        const double a = bounds.lower()[i];
        const double b = bounds.upper()[i];
        const double x = position[i];
        const double mid = a + 0.5 * (b - a);
        out[i] = x <= mid ? b - (x - a) : a + (b - x);
    }
    return out;
}

namespace detail {

// Keep the n fittest candidates. Stable, so candidates keep the pool order
// on fitness ties (random block, then opposite block, then agent block).
inline Population take_best(std::vector<Individual> pool, const Bounds& bounds, int n) {
    std::stable_sort(pool.begin(), pool.end(), [](const Individual& a, const Individual& b) {
        return *a.fitness < *b.fitness;
    });
    pool.resize(static_cast<std::size_t>(n));
    return Population(std::move(pool), bounds);
}

} // namespace detail

/// n random points plus their reflections, all 2n evaluated, best n kept.
inline Population obl_init(Problem& problem, int n, RandomSource& rng) {
    if (n < 1) throw std::invalid_argument("obl_init: n >= 1 required");
    const Bounds& bounds = problem.bounds();
    Population randoms = random_init(bounds, n, rng);

    std::vector<Individual> pool;
    pool.reserve(2 * static_cast<std::size_t>(n));
    for (const auto& m : randoms.members()) pool.push_back(Individual{m.position, std::nullopt});
    for (const auto& m : randoms.members())
        pool.push_back(Individual{opposite(m.position, bounds), std::nullopt});

    for (auto& ind : pool) ind.fitness = problem.evaluate(ind.position);
    return detail::take_best(std::move(pool), bounds, n);
}

/// Hybrid initializer. Candidate pool of 3 * n_pop points:
///   1. n_pop random points,
///   2. their n_pop reflections (the 2*n_pop points so far form the fixed
///      dataset the agents search),
///   3. n_pop empty-space agents launched from fresh random coordinates,
/// then everything is evaluated and the best third kept. The first two
/// blocks reuse the exact draw sequence of obl_init on the same stream, so
/// the pool is a strict superset of the one obl_init would select from.
///
/// An agent that fails falls back to its seed coordinate; the indices of
/// such agents are appended to *esa_fallbacks when given.
inline Population oblesa_initialize(Problem& problem, const InitConfig& cfg, RandomSource& rng,
                                    std::vector<int>* esa_fallbacks = nullptr) {
    validate(cfg);
    const int n = cfg.n_pop;
    const Bounds& bounds = problem.bounds();

    Population randoms = random_init(bounds, n, rng);
    std::vector<Vector> dataset;
    dataset.reserve(2 * static_cast<std::size_t>(n));
    for (const auto& m : randoms.members()) dataset.push_back(m.position);
    for (const auto& m : randoms.members()) dataset.push_back(opposite(m.position, bounds));

    Population seeds = random_init(bounds, n, rng);
    const std::uint64_t index_seed = rng.next_u64();

    std::vector<Individual> pool;
    pool.reserve(3 * static_cast<std::size_t>(n));
    for (const auto& p : dataset) pool.push_back(Individual{p, std::nullopt});

    const esa::NeighborIndex index(dataset,
                                   cfg.esa_params.exact_knn ? esa::NeighborIndex::Mode::Exact
                                                            : esa::NeighborIndex::Mode::Auto,
                                   index_seed);
    esa::EsaParams params = cfg.esa_params;
    if (!params.k) params.k = static_cast<int>(bounds.dim()) + 1;

    for (int i = 0; i < n; ++i) {
        const Vector& seed_pos = seeds.members()[static_cast<std::size_t>(i)].position;
        Vector final_pos;
        try {
            final_pos = esa::run_agent(index, bounds, params, seed_pos).position;
        } catch (const std::exception&) {
            final_pos = seed_pos;
            if (esa_fallbacks) esa_fallbacks->push_back(i);
        }
        pool.push_back(Individual{std::move(final_pos), std::nullopt});
    }

    for (auto& ind : pool) ind.fitness = problem.evaluate(ind.position);
    return detail::take_best(std::move(pool), bounds, n);
}

/// Strategy dispatch. Random defers all evaluation to the optimizer; the
/// other two charge the shared budget during selection.
inline Population initialize(Problem& problem, const InitConfig& cfg, RandomSource& rng) {
    validate(cfg);
    switch (cfg.strategy) {
        case Strategy::Random: return random_init(problem.bounds(), cfg.n_pop, rng);
        case Strategy::Obl: return obl_init(problem, cfg.n_pop, rng);
        case Strategy::Oblesa: return oblesa_initialize(problem, cfg, rng);
    }
    throw std::invalid_argument("initialize: unknown strategy");
}

} // namespace oblesa::init
