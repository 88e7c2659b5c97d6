#pragma once

#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

namespace oblesa {

using Vector = std::vector<double>;

inline double squared_distance(const Vector& a, const Vector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline double distance(const Vector& a, const Vector& b) {
    return std::sqrt(squared_distance(a, b));
}

inline double norm(const Vector& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

/// Box search space: one closed interval [lower_i, upper_i] per dimension.
/// Degenerate intervals (lower_i >= upper_i) are rejected.
class Bounds {
public:
    Bounds(Vector lower, Vector upper)
        : lower_(std::move(lower)), upper_(std::move(upper)) {
        if (lower_.empty() || lower_.size() != upper_.size())
            throw std::invalid_argument("Bounds: lower/upper must be nonempty and equally sized");
        for (std::size_t i = 0; i < lower_.size(); ++i)
            if (!(lower_[i] < upper_[i]))
                throw std::invalid_argument("Bounds: lower[i] < upper[i] required in every dimension");
    }

    /// Hypercube [lo, hi]^dim.
    static Bounds cube(std::size_t dim, double lo, double hi) {
        return Bounds(Vector(dim, lo), Vector(dim, hi));
    }

    std::size_t dim() const { return lower_.size(); }
    const Vector& lower() const { return lower_; }
    const Vector& upper() const { return upper_; }

    bool contains(const Vector& x) const {
        if (x.size() != dim()) return false;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (x[i] < lower_[i] || x[i] > upper_[i]) return false;
        return true;
    }

    /// Euclidean length of the box diagonal.
    double diagonal() const {
        double s = 0.0;
        for (std::size_t i = 0; i < dim(); ++i) {
            const double w = upper_[i] - lower_[i];
            s += w * w;
        }
        return std::sqrt(s);
    }

private:
    Vector lower_;
    Vector upper_;
};

/// Componentwise clip into the box. Feasible inputs come back unchanged.
inline Vector clamp(Vector position, const Bounds& bounds) {
    if (position.size() != bounds.dim())
        throw std::invalid_argument("clamp: dimension mismatch");
    for (std::size_t i = 0; i < position.size(); ++i) {
        if (position[i] < bounds.lower()[i])
            position[i] = bounds.lower()[i];
        else if (position[i] > bounds.upper()[i])
            position[i] = bounds.upper()[i];
    }
    return position;
}

/// Candidate solution with an optionally cached objective value (lower is better).
struct Individual {
    Vector position;
    std::optional<double> fitness;
};

/// Nonempty set of individuals constrained to a common box.
class Population {
public:
    Population(std::vector<Individual> members, Bounds bounds)
        : members_(std::move(members)), bounds_(std::move(bounds)) {
        if (members_.empty())
            throw std::invalid_argument("Population: at least one member required");
        for (const auto& m : members_)
            if (!bounds_.contains(m.position))
                throw std::invalid_argument("Population: member outside bounds");
    }

    std::size_t size() const { return members_.size(); }
    const Bounds& bounds() const { return bounds_; }
    std::vector<Individual>& members() { return members_; }
    const std::vector<Individual>& members() const { return members_; }

private:
    std::vector<Individual> members_;
    Bounds bounds_;
};

/// Raised when an evaluation is requested past the problem budget.
struct BudgetExhausted : std::exception {
    const char* what() const noexcept override { return "evaluation budget exhausted"; }
};

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

/// Deterministic random stream.
///
/// Identical seeds give identical draw sequences (the engine is the fully
/// specified std::mt19937_64 and all conversions are done here, not via
/// distribution objects). Child streams come from derive()/mix_seed() and
/// depend only on the constructor seed plus the tag, never on how many
/// draws the parent has made.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

    /// Uniform index in [0, n).
    std::size_t index(std::size_t n) {
        if (n == 0) throw std::invalid_argument("RandomSource::index: n must be positive");
        return static_cast<std::size_t>(uniform() * static_cast<double>(n));
    }

    /// Child stream keyed by `tag`.
    RandomSource derive(std::uint64_t tag) const {
        return RandomSource(mix_seed(seed_, tag));
    }

    /// splitmix64 finalizer.
    static std::uint64_t scramble(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    /// Combine two words into a well-scrambled seed. Order-sensitive, so
    /// chained calls hash a whole key: h = mix_seed(mix_seed(h, a), b).
    static std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
        return scramble(scramble(a) + b);
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

/// Objective + box bounds + convergence target + evaluation budget.
///
/// Every evaluate() call costs one unit of budget and feeds the best-so-far
/// tracker; any value at or below target_value flips target_reached() for
/// good. One Problem instance belongs to exactly one run.
class Problem {
public:
    using Objective = std::function<double(const Vector&)>;

    Problem(Objective objective, Bounds bounds, double target_value, std::int64_t budget)
        : objective_(std::move(objective)),
          bounds_(std::move(bounds)),
          target_value_(target_value),
          budget_(budget) {
        if (!objective_) throw std::invalid_argument("Problem: null objective");
        if (budget_ < 0) throw std::invalid_argument("Problem: negative budget");
    }

    double evaluate(const Vector& position) {
        if (position.size() != bounds_.dim())
            throw std::invalid_argument("Problem::evaluate: dimension mismatch");
        if (evals_used_ >= budget_) throw BudgetExhausted{};
        const double value = objective_(position);
        ++evals_used_;
        if (value < best_value_) {
            best_value_ = value;
            best_position_ = position;
        }
        if (value <= target_value_) target_reached_ = true;
        return value;
    }

    const Bounds& bounds() const { return bounds_; }
    double target_value() const { return target_value_; }
    std::int64_t budget() const { return budget_; }
    std::int64_t evals_used() const { return evals_used_; }
    bool target_reached() const { return target_reached_; }

    /// Best objective value seen so far (+inf before the first evaluation).
    double best_value() const { return best_value_; }
    const Vector& best_position() const { return best_position_; }

private:
    Objective objective_;
    Bounds bounds_;
    double target_value_;
    std::int64_t budget_;
    std::int64_t evals_used_ = 0;
    double best_value_ = std::numeric_limits<double>::infinity();
    Vector best_position_;
    bool target_reached_ = false;
};

} // namespace oblesa
