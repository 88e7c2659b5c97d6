#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "oblesa/core.hpp"
#include "oblesa/neighbors.hpp"

namespace oblesa::esa {

/// Parameters of the empty-space search loop.
///
/// Unset k resolves to dimension + 1 at run time; unset sigma is recomputed
/// every step as half the mean distance to the current neighbors. alpha is
/// the step length as a fraction of the bounds diagonal.
struct EsaParams {
    std::optional<int> k;
    std::optional<double> sigma;
    int n_steps = 1000;
    double alpha = 0.01;
    double delta = 1e-6;
    bool exact_knn = false; // force exact neighbor queries in any dimension
};

inline void validate(const EsaParams& p) {
    if (p.k && *p.k < 1) throw std::invalid_argument("EsaParams: k >= 1 required");
    if (p.n_steps < 1) throw std::invalid_argument("EsaParams: n_steps >= 1 required");
    if (!(p.alpha > 0.0)) throw std::invalid_argument("EsaParams: alpha > 0 required");
    if (!(p.delta > 0.0)) throw std::invalid_argument("EsaParams: delta > 0 required");
}

enum class AgentStatus { Converged, StepLimit, ConstraintExit };

constexpr std::string_view agent_status_name(AgentStatus s) {
    switch (s) {
        case AgentStatus::Converged: return "converged";
        case AgentStatus::StepLimit: return "step_limit";
        case AgentStatus::ConstraintExit: return "constraint_exit";
    }
    return "unknown";
}

/// Final state of one search agent. The position is always feasible: on a
/// constraint violation the agent reports the last feasible point.
struct Agent {
    Vector position;
    AgentStatus status;
    int steps_taken;
};

/// Scalar interaction between the agent and one fixed point at distance r.
/// Positive means repulsion (the agent is pushed away from the point),
/// negative means attraction. Zero crossing at r = sigma * 2^(1/6).
inline double lj_force(double r, double sigma) {
    if (!(r > 0.0)) throw std::domain_error("lj_force: r must be positive");
    if (!(sigma > 0.0)) throw std::domain_error("lj_force: sigma must be positive");
    const double s = sigma / r;
    const double s2 = s * s;
    const double s4 = s2 * s2;
    const double s7 = s4 * s2 * s;
    const double s13 = s7 * s4 * s2;
    return 24.0 / sigma * (2.0 * s13 - s7);
}

/// Half the mean distance from the agent to its neighbors.
inline double adaptive_sigma(const Vector& agent_pos, const std::vector<Vector>& neighbors) {
    if (neighbors.empty())
        throw std::invalid_argument("adaptive_sigma: neighbors must be nonempty");
    double sum = 0.0;
    for (const auto& nb : neighbors) sum += distance(agent_pos, nb);
    return 0.5 * sum / static_cast<double>(neighbors.size());
}

struct ResultantForce {
    Vector direction; // unit vector, or all zeros when the forces cancel
    double magnitude;
};

/// Net force over the neighbor set. Repulsive (positive) terms push the
/// agent away from the corresponding point, attractive terms pull it back;
/// the returned direction is the normalized sum.
inline ResultantForce resultant_direction(const Vector& agent_pos,
                                          const std::vector<Vector>& neighbors,
                                          double sigma) {
    if (neighbors.empty())
        throw std::invalid_argument("resultant_direction: neighbors must be nonempty");
    const std::size_t d = agent_pos.size();
    Vector sum(d, 0.0);
    for (const auto& nb : neighbors) {
        if (nb.size() != d)
            throw std::invalid_argument("resultant_direction: dimension mismatch");
        const double r = distance(agent_pos, nb);
        if (r <= 0.0)
            throw std::domain_error("resultant_direction: coincident point");
        const double f = lj_force(r, sigma);
        // (nb - agent)/r is the unit vector toward the point; a positive
        // force contributes along the opposite of it.
        const double coef = -f / r;
        for (std::size_t i = 0; i < d; ++i) sum[i] += coef * (nb[i] - agent_pos[i]);
    }
    const double magnitude = norm(sum);
    if (magnitude < std::numeric_limits<double>::min())
        return ResultantForce{Vector(d, 0.0), 0.0};
    for (double& v : sum) v /= magnitude;
    return ResultantForce{std::move(sum), magnitude};
}

/// Extra feasibility predicates beyond the box; true means satisfied.
using Constraint = std::function<bool(const Vector&)>;

/// Walks one agent through the point set until the net force vanishes
/// (Converged), a step would leave the feasible region (ConstraintExit,
/// reporting the last feasible position), or the step limit is hit.
inline Agent run_agent(const NeighborIndex& index, const Bounds& bounds,
                       const EsaParams& params, Vector start,
                       const std::vector<Constraint>& extra_constraints = {}) {
    validate(params);
    if (index.dim() != bounds.dim())
        throw std::invalid_argument("run_agent: index/bounds dimension mismatch");
    if (!bounds.contains(start))
        throw std::invalid_argument("run_agent: start must be inside bounds");
    for (const auto& c : extra_constraints)
        if (!c(start)) throw std::invalid_argument("run_agent: start violates a constraint");

    const std::size_t k =
        std::min<std::size_t>(params.k ? static_cast<std::size_t>(*params.k) : index.dim() + 1,
                              index.size());
    const double step_len = params.alpha * bounds.diagonal();
    const std::size_t d = bounds.dim();

    Vector pos = std::move(start);
    std::vector<std::size_t> ids;
    std::vector<Vector> neighbors(k);
    for (int step = 0; step < params.n_steps; ++step) {
        index.query(pos, k, ids);
        neighbors.resize(ids.size());
        for (std::size_t i = 0; i < ids.size(); ++i) neighbors[i] = index.point(ids[i]);

        const double sigma = params.sigma ? *params.sigma : adaptive_sigma(pos, neighbors);
        const ResultantForce rf = resultant_direction(pos, neighbors, sigma);
        if (rf.magnitude < params.delta) return Agent{std::move(pos), AgentStatus::Converged, step};

        Vector next(d);
        for (std::size_t i = 0; i < d; ++i) next[i] = pos[i] + rf.direction[i] * step_len;

        bool feasible = bounds.contains(next);
        for (std::size_t c = 0; feasible && c < extra_constraints.size(); ++c)
            feasible = extra_constraints[c](next);
        if (!feasible) return Agent{std::move(pos), AgentStatus::ConstraintExit, step};
        pos = std::move(next);
    }
    return Agent{std::move(pos), AgentStatus::StepLimit, params.n_steps};
}

} // namespace oblesa::esa
