#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "oblesa/core.hpp"

namespace oblesa::optim {

enum class Algorithm { De, Egwo };

constexpr std::string_view algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::De: return "de";
        case Algorithm::Egwo: return "egwo";
    }
    return "unknown";
}

inline std::optional<Algorithm> algorithm_from_name(std::string_view name) {
    for (Algorithm a : {Algorithm::De, Algorithm::Egwo})
        if (algorithm_name(a) == name) return a;
    return std::nullopt;
}

struct OptimizerConfig {
    Algorithm algorithm = Algorithm::De;
    int max_iterations = 500;
    double de_f = 0.5;  // mutation weight
    double de_cr = 0.7; // crossover rate
    int de_mutant_retries = 10; // re-samples of an out-of-bounds mutant before clamping
    // Control-scalar schedule for the wolf update; defaults to the linear
    // decay 2 * (1 - iteration / max_iterations) when unset.
    std::function<double(int iteration, int max_iterations)> egwo_a_schedule;
};

inline void validate(const OptimizerConfig& cfg) {
    if (cfg.max_iterations < 1)
        throw std::invalid_argument("OptimizerConfig: max_iterations >= 1 required");
    if (!(cfg.de_f > 0.0) || cfg.de_f > 2.0)
        throw std::invalid_argument("OptimizerConfig: 0 < de_f <= 2 required");
    if (cfg.de_cr < 0.0 || cfg.de_cr > 1.0)
        throw std::invalid_argument("OptimizerConfig: 0 <= de_cr <= 1 required");
    if (cfg.de_mutant_retries < 0)
        throw std::invalid_argument("OptimizerConfig: de_mutant_retries >= 0 required");
}

struct OptResult {
    Vector best_position;
    double best_fitness;
    std::int64_t evals_used;
    bool reached_target;
    int iterations_run;
};

namespace detail {

inline void require_evaluated(const Population& pop, const char* fn) {
    for (const auto& m : pop.members())
        if (!m.fitness)
            throw std::invalid_argument(std::string(fn) + ": population must be fully evaluated");
}

} // namespace detail

/// One rand/1/bin generation, updating the population in place.
///
/// For each member: mutant = x_r1 + F * (x_r2 - x_r3) over distinct partners,
/// re-sampled up to de_mutant_retries times while it falls outside the box
/// and clamped afterwards; binomial crossover with one forced dimension; the
/// trial replaces the member when its fitness is no worse. Stops early once
/// the problem target is reached. A BudgetExhausted mid-generation leaves the
/// members processed so far committed and propagates.
inline void de_step(Population& pop, Problem& problem, const OptimizerConfig& cfg,
                    RandomSource& rng) {
    const std::size_t np = pop.size();
    if (np < 4) throw std::invalid_argument("de_step: population size >= 4 required");
    detail::require_evaluated(pop, "de_step");
    const Bounds& bounds = pop.bounds();
    const std::size_t d = bounds.dim();
    auto& members = pop.members();

    Vector mutant(d);
    for (std::size_t i = 0; i < np; ++i) {
        if (problem.target_reached()) return;

        bool inside = false;
        for (int attempt = 0; attempt <= cfg.de_mutant_retries && !inside; ++attempt) {
            std::size_t r1 = rng.index(np);
            while (r1 == i) r1 = rng.index(np);
            std::size_t r2 = rng.index(np);
            while (r2 == i || r2 == r1) r2 = rng.index(np);
            std::size_t r3 = rng.index(np);
            while (r3 == i || r3 == r1 || r3 == r2) r3 = rng.index(np);
            inside = true;
            for (std::size_t j = 0; j < d; ++j) {
                mutant[j] = members[r1].position[j] +
                            cfg.de_f * (members[r2].position[j] - members[r3].position[j]);
                if (mutant[j] < bounds.lower()[j] || mutant[j] > bounds.upper()[j]) inside = false;
            }
        }
        if (!inside) mutant = clamp(std::move(mutant), bounds);

        Vector trial = members[i].position;
        const std::size_t forced = rng.index(d);
        for (std::size_t j = 0; j < d; ++j)
            if (rng.uniform() < cfg.de_cr || j == forced) trial[j] = mutant[j];

        const double trial_fitness = problem.evaluate(trial);
        if (trial_fitness <= *members[i].fitness) {
            members[i].position = std::move(trial);
            members[i].fitness = trial_fitness;
        }
    }
}

/// Test hook: pins the per-dimension uniforms of the wolf update.
struct EgwoStepHook {
    std::optional<double> r1;
    std::optional<double> r2;
};

/// One wolf-pack generation, updating the population in place.
///
/// The three fittest members lead; every member moves (unconditionally) to
/// the mean of the three leader-guided positions
///   X_j = leader_j - A_j * |C_j * leader_j - x|,
/// with A = 2a r1 - a and C = 2 r2 drawn fresh per leader per dimension and
/// a decaying from 2 to 0 over the run. Best-ever tracking lives in the
/// problem, not in the population.
inline void egwo_step(Population& pop, Problem& problem, int iteration,
                      const OptimizerConfig& cfg, RandomSource& rng,
                      const EgwoStepHook* hook = nullptr) {
    detail::require_evaluated(pop, "egwo_step");
    const std::size_t np = pop.size();
    const Bounds& bounds = pop.bounds();
    const std::size_t d = bounds.dim();
    auto& members = pop.members();

    const double a = cfg.egwo_a_schedule
                         ? cfg.egwo_a_schedule(iteration, cfg.max_iterations)
                         : 2.0 * (1.0 - static_cast<double>(iteration) /
                                            static_cast<double>(cfg.max_iterations));

    // Snapshot leader positions before any member moves.
    std::vector<std::size_t> ranking(np);
    for (std::size_t i = 0; i < np; ++i) ranking[i] = i;
    std::stable_sort(ranking.begin(), ranking.end(), [&](std::size_t x, std::size_t y) {
        return *members[x].fitness < *members[y].fitness;
    });
    std::array<Vector, 3> leaders;
    for (std::size_t l = 0; l < 3; ++l)
        leaders[l] = members[ranking[std::min(l, np - 1)]].position;

    Vector sum(d);
    for (std::size_t i = 0; i < np; ++i) {
        if (problem.target_reached()) return;

        std::fill(sum.begin(), sum.end(), 0.0);
        for (const Vector& leader : leaders) {
            for (std::size_t j = 0; j < d; ++j) {
                const double r1 = hook && hook->r1 ? *hook->r1 : rng.uniform();
                const double r2 = hook && hook->r2 ? *hook->r2 : rng.uniform();
                const double big_a = 2.0 * a * r1 - a;
                const double big_c = 2.0 * r2;
                sum[j] += leader[j] -
                          big_a * std::abs(big_c * leader[j] - members[i].position[j]);
            }
        }
        Vector next(d);
        for (std::size_t j = 0; j < d; ++j) next[j] = sum[j] / 3.0;
        next = clamp(std::move(next), bounds);

        const double fitness = problem.evaluate(next);
        members[i].position = std::move(next);
        members[i].fitness = fitness;
    }
}

/// Evaluates any unevaluated members, then iterates the configured step
/// until the target is reached, the budget runs out, or max_iterations pass.
/// Returns the best-ever outcome; all termination modes are encoded in the
/// result.
inline OptResult run(Problem& problem, Population pop, const OptimizerConfig& cfg,
                     RandomSource& rng) {
    validate(cfg);
    int iterations = 0;
    try {
        for (auto& m : pop.members())
            if (!m.fitness) m.fitness = problem.evaluate(m.position);
        for (int t = 1; t <= cfg.max_iterations && !problem.target_reached(); ++t) {
            if (cfg.algorithm == Algorithm::De)
                de_step(pop, problem, cfg, rng);
            else
                egwo_step(pop, problem, t, cfg, rng);
            ++iterations;
        }
    } catch (const BudgetExhausted&) {
        // Run ends here; whatever was evaluated already counts.
    }

    double best = problem.best_value();
    Vector best_pos = problem.best_position();
    for (const auto& m : pop.members()) {
        if (m.fitness && *m.fitness < best) {
            best = *m.fitness;
            best_pos = m.position;
        }
    }
    return OptResult{std::move(best_pos), best, problem.evals_used(),
                     best <= problem.target_value(), iterations};
}

} // namespace oblesa::optim
