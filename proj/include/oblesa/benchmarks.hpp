#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "oblesa/core.hpp"

namespace oblesa::bench {

// Noiseless benchmark catalog. Each function is written over shifted
// coordinates z = x - shift and has a known base optimum with value 0, so
// per-instance variants are plain translations of one landscape.
enum class FunctionId {
    Sphere,
    Ellipsoid,
    Rastrigin,
    LinearSlope,
    AttractiveSector,
    Rosenbrock,
    Discus,
    BentCigar,
    SchaffersF7,
    Schwefel,
};

inline constexpr std::array<FunctionId, 10> kAllFunctions = {
    FunctionId::Sphere,        FunctionId::Ellipsoid,  FunctionId::Rastrigin,
    FunctionId::LinearSlope,   FunctionId::AttractiveSector,
    FunctionId::Rosenbrock,    FunctionId::Discus,     FunctionId::BentCigar,
    FunctionId::SchaffersF7,   FunctionId::Schwefel,
};

constexpr std::string_view function_name(FunctionId id) {
    switch (id) {
        case FunctionId::Sphere: return "sphere";
        case FunctionId::Ellipsoid: return "ellipsoid";
        case FunctionId::Rastrigin: return "rastrigin";
        case FunctionId::LinearSlope: return "linear_slope";
        case FunctionId::AttractiveSector: return "attractive_sector";
        case FunctionId::Rosenbrock: return "rosenbrock";
        case FunctionId::Discus: return "discus";
        case FunctionId::BentCigar: return "bent_cigar";
        case FunctionId::SchaffersF7: return "schaffers_f7";
        case FunctionId::Schwefel: return "schwefel";
    }
    return "unknown";
}

inline std::optional<FunctionId> function_from_name(std::string_view name) {
    for (FunctionId id : kAllFunctions)
        if (function_name(id) == name) return id;
    return std::nullopt;
}

inline constexpr std::array<int, 6> kProtocolDimensions = {2, 3, 5, 10, 20, 40};

inline bool protocol_dimension(int d) {
    return std::find(kProtocolDimensions.begin(), kProtocolDimensions.end(), d) !=
           kProtocolDimensions.end();
}

/// One benchmark problem: function x dimension x instance, plus the target
/// precision added on top of the optimum and the per-dimension budget factor.
struct BenchmarkSpec {
    FunctionId function_id = FunctionId::Sphere;
    int dimension = 2;
    int instance = 0; // 0 = unshifted optimum
    double target_precision = 1e-8;
    std::int64_t budget_multiplier = 10000; // budget = multiplier * dimension
};

namespace detail {

inline constexpr double kSchwefelArgOpt = 420.9687462275036;

inline double schwefel_term_offset() {
    static const double offset = kSchwefelArgOpt * std::sin(std::sqrt(kSchwefelArgOpt));
    return offset;
}

inline void require_dim_at_least(std::size_t d, std::size_t min_d, const char* fn) {
    if (d < min_d)
        throw std::invalid_argument(std::string(fn) + ": dimension too small");
}

} // namespace detail

/// Base landscape evaluated at shifted coordinates. The minimum is 0, at the
/// origin for every function except Rosenbrock (all-ones).
inline double eval_base(FunctionId id, const Vector& z) {
    const std::size_t d = z.size();
    if (d == 0) throw std::invalid_argument("eval_base: empty input");
    switch (id) {
        case FunctionId::Sphere: {
            double s = 0.0;
            for (double v : z) s += v * v;
            return s;
        }
        case FunctionId::Ellipsoid: {
            detail::require_dim_at_least(d, 2, "ellipsoid");
            double s = 0.0;
            for (std::size_t i = 0; i < d; ++i)
                s += std::pow(1e6, static_cast<double>(i) / static_cast<double>(d - 1)) * z[i] * z[i];
            return s;
        }
        case FunctionId::Rastrigin: {
            double s = 10.0 * static_cast<double>(d);
            for (double v : z) s += v * v - 10.0 * std::cos(2.0 * std::numbers::pi * v);
            return s;
        }
        case FunctionId::LinearSlope: {
            // Piecewise-linear pull toward the optimum with per-dimension
            // gradients spanning 1..10; keeps the minimum interior so
            // instance shifts stay plain translations.
            detail::require_dim_at_least(d, 2, "linear_slope");
            double s = 0.0;
            for (std::size_t i = 0; i < d; ++i)
                s += std::pow(10.0, static_cast<double>(i) / static_cast<double>(d - 1)) * std::abs(z[i]);
            return s;
        }
        case FunctionId::AttractiveSector: {
            double s = 0.0;
            for (double v : z) {
                const double c = v > 0.0 ? 100.0 * v : v;
                s += c * c;
            }
            return s;
        }
        case FunctionId::Rosenbrock: {
            detail::require_dim_at_least(d, 2, "rosenbrock");
            double s = 0.0;
            for (std::size_t i = 0; i + 1 < d; ++i) {
                const double a = z[i + 1] - z[i] * z[i];
                const double b = 1.0 - z[i];
                s += 100.0 * a * a + b * b;
            }
            return s;
        }
        case FunctionId::Discus: {
            double s = 1e6 * z[0] * z[0];
            for (std::size_t i = 1; i < d; ++i) s += z[i] * z[i];
            return s;
        }
        case FunctionId::BentCigar: {
            double s = z[0] * z[0];
            for (std::size_t i = 1; i < d; ++i) s += 1e6 * z[i] * z[i];
            return s;
        }
        case FunctionId::SchaffersF7: {
            detail::require_dim_at_least(d, 2, "schaffers_f7");
            double acc = 0.0;
            for (std::size_t i = 0; i + 1 < d; ++i) {
                const double s = std::hypot(z[i], z[i + 1]);
                const double root = std::sqrt(s);
                const double t = std::sin(50.0 * std::pow(s, 0.2));
                acc += root + root * t * t;
            }
            acc /= static_cast<double>(d - 1);
            return acc * acc;
        }
        case FunctionId::Schwefel: {
            // Classic deceptive landscape rescaled to a [-5,5]-sized box:
            // y = 100 z + y*, per-dimension value y*sin(sqrt(y*)) - y sin(sqrt|y|),
            // zero exactly at z = 0. The quadratic penalty kills the spurious
            // dips that appear once |y| leaves the classic [-500, 500] region.
            const double offset = detail::schwefel_term_offset();
            double s = 0.0;
            for (double v : z) {
                const double y = 100.0 * v + detail::kSchwefelArgOpt;
                s += offset - y * std::sin(std::sqrt(std::abs(y)));
                const double excess = std::abs(y) - 500.0;
                if (excess > 0.0) s += 100.0 * excess * excess;
            }
            return s;
        }
    }
    throw std::invalid_argument("eval_base: unknown function id");
}

/// Location of the base minimum (f = 0 there).
inline Vector base_optimum(FunctionId id, int dimension) {
    if (dimension < 1) throw std::invalid_argument("base_optimum: dimension >= 1");
    Vector x(static_cast<std::size_t>(dimension), 0.0);
    if (id == FunctionId::Rosenbrock) std::fill(x.begin(), x.end(), 1.0);
    return x;
}

/// Suite shape: which functions, how many shift instances of each, and the
/// shared target precision / budget factor.
struct SuiteConfig {
    std::vector<FunctionId> functions{kAllFunctions.begin(), kAllFunctions.end()};
    int instances = 3;
    double target_precision = 1e-8;
    std::int64_t budget_multiplier = 10000;
};

inline void validate(const BenchmarkSpec& spec) {
    if (!protocol_dimension(spec.dimension))
        throw std::invalid_argument("BenchmarkSpec: dimension must be one of 2, 3, 5, 10, 20, 40");
    if (spec.instance < 0)
        throw std::invalid_argument("BenchmarkSpec: instance must be nonnegative");
    if (!(spec.target_precision > 0.0))
        throw std::invalid_argument("BenchmarkSpec: target_precision must be positive");
    if (spec.budget_multiplier < 1)
        throw std::invalid_argument("BenchmarkSpec: budget_multiplier must be >= 1");
}

/// Stream that determines the instance shift. Depends only on
/// (function, instance, dimension): every strategy and seed sees the same
/// landscape for a given spec.
inline RandomSource make_instance_rng(const BenchmarkSpec& spec) {
    std::uint64_t h = fnv1a64("oblesa.instance");
    h = RandomSource::mix_seed(h, static_cast<std::uint64_t>(spec.function_id));
    h = RandomSource::mix_seed(h, static_cast<std::uint64_t>(spec.instance));
    h = RandomSource::mix_seed(h, static_cast<std::uint64_t>(spec.dimension));
    return RandomSource(h);
}

/// Optimum shift for the instance: zero for instance 0, else uniform in
/// [-4, 4] per dimension so the shifted optimum stays inside [-5, 5].
inline Vector instance_shift(const BenchmarkSpec& spec, RandomSource& rng) {
    Vector shift(static_cast<std::size_t>(spec.dimension), 0.0);
    if (spec.instance != 0)
        for (double& s : shift) s = rng.uniform(-4.0, 4.0);
    return shift;
}

struct ProblemInfo {
    Vector shift;
    Vector optimum_position; // base optimum + shift
    double optimum_value;    // 0 for every catalog function
    double target_value;
    std::int64_t budget;
};

inline ProblemInfo problem_info(const BenchmarkSpec& spec, RandomSource& rng) {
    validate(spec);
    ProblemInfo info;
    info.shift = instance_shift(spec, rng);
    info.optimum_position = base_optimum(spec.function_id, spec.dimension);
    for (std::size_t i = 0; i < info.optimum_position.size(); ++i)
        info.optimum_position[i] += info.shift[i];
    info.optimum_value = 0.0;
    info.target_value = info.optimum_value + spec.target_precision;
    info.budget = spec.budget_multiplier * spec.dimension;
    return info;
}

inline Problem make_problem(const BenchmarkSpec& spec, RandomSource& rng) {
    const ProblemInfo info = problem_info(spec, rng);
    const FunctionId fid = spec.function_id;
    auto objective = [fid, shift = info.shift,
                      z = Vector(static_cast<std::size_t>(spec.dimension))](const Vector& x) mutable {
        for (std::size_t i = 0; i < z.size(); ++i) z[i] = x[i] - shift[i];
        return eval_base(fid, z);
    };
    return Problem(std::move(objective),
                   Bounds::cube(static_cast<std::size_t>(spec.dimension), -5.0, 5.0),
                   info.target_value, info.budget);
}

inline std::vector<BenchmarkSpec> suite(int dimension, const SuiteConfig& cfg = {}) {
    if (!protocol_dimension(dimension))
        throw std::invalid_argument("suite: dimension must be one of 2, 3, 5, 10, 20, 40");
    if (cfg.functions.empty())
        throw std::invalid_argument("suite: at least one function required");
    if (cfg.instances < 1)
        throw std::invalid_argument("suite: instances must be >= 1");
    std::vector<BenchmarkSpec> specs;
    specs.reserve(cfg.functions.size() * static_cast<std::size_t>(cfg.instances));
    for (FunctionId fid : cfg.functions)
        for (int inst = 0; inst < cfg.instances; ++inst)
            specs.push_back(BenchmarkSpec{fid, dimension, inst, cfg.target_precision,
                                          cfg.budget_multiplier});
    return specs;
}

} // namespace oblesa::bench
