#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "oblesa/harness.hpp"

namespace oblesa::stats {

// ---------------------------------------------------------------------------
// distribution machinery

namespace detail {

inline double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Continued fraction for the incomplete beta (Lentz's method).
inline double ibeta_cf(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 3e-16;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) return h;
    }
    throw std::runtime_error("ibeta_cf: continued fraction did not converge");
}

// 16-point Gauss-Legendre nodes/weights on [-1, 1].
inline constexpr std::array<double, 8> kGlNodes = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
    0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499,
};
inline constexpr std::array<double, 8> kGlWeights = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541,
};

template <typename F>
inline double gauss_legendre(F&& f, double lo, double hi, int panels) {
    const double width = (hi - lo) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = lo + (p + 0.5) * width;
        const double half = 0.5 * width;
        double acc = 0.0;
        for (std::size_t i = 0; i < kGlNodes.size(); ++i) {
            const double dx = half * kGlNodes[i];
            acc += kGlWeights[i] * (f(mid + dx) + f(mid - dx));
        }
        total += half * acc;
    }
    return total;
}

inline double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// CDF of the range of k independent standard normals.
inline double normal_range_cdf(double r, int k) {
    if (r <= 0.0) return 0.0;
    auto integrand = [r, k](double z) {
        const double band = normal_cdf(z) - normal_cdf(z - r);
        return normal_pdf(z) * std::pow(band, k - 1);
    };
    return k * gauss_legendre(integrand, -8.0, 8.0, 32);
}

} // namespace detail

/// Regularized incomplete beta I_x(a, b), accurate to ~1e-15 relative.
inline double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::invalid_argument("regularized_incomplete_beta: a, b must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_bt = a * std::log(x) + b * std::log1p(-x) - detail::log_beta(a, b);
    const double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * detail::ibeta_cf(a, b, x) / a;
    return 1.0 - bt * detail::ibeta_cf(b, a, 1.0 - x) / b;
}

/// Upper tail of the F distribution: P(F_{df1, df2} > f).
inline double f_upper_tail(double f, int df1, int df2) {
    if (df1 < 1 || df2 < 1) throw std::invalid_argument("f_upper_tail: degrees of freedom >= 1");
    if (!(f > 0.0)) return 1.0;
    if (std::isinf(f)) return 0.0;
    const double x = df2 / (df2 + df1 * f);
    return regularized_incomplete_beta(0.5 * df2, 0.5 * df1, x);
}

/// CDF of the studentized range with k groups and df within-group degrees of
/// freedom, by direct quadrature of the scale-mixture representation.
inline double studentized_range_cdf(double q, int k, int df) {
    if (k < 2) throw std::invalid_argument("studentized_range_cdf: k >= 2 required");
    if (df < 1) throw std::invalid_argument("studentized_range_cdf: df >= 1 required");
    if (q <= 0.0) return 0.0;

    const double nu = df;
    // ln of the pdf of sqrt(chi^2_nu / nu) up to the u-dependent part.
    const double ln_norm = std::log(2.0) + 0.5 * nu * std::log(nu) - 0.5 * nu * std::log(2.0) -
                           std::lgamma(0.5 * nu);
    auto integrand = [&](double u) {
        if (u <= 0.0) return 0.0;
        const double ln_pdf = ln_norm + (nu - 1.0) * std::log(u) - 0.5 * nu * u * u;
        return std::exp(ln_pdf) * detail::normal_range_cdf(q * u, k);
    };
    // The scale factor concentrates around 1 with spread ~1/sqrt(2 nu).
    const double spread = 14.0 / std::sqrt(2.0 * nu);
    const double lo = std::max(0.0, 1.0 - spread);
    const double hi = std::min(8.0, 1.0 + spread);
    return std::min(1.0, detail::gauss_legendre(integrand, lo, hi, 32));
}

// ---------------------------------------------------------------------------
// rank scoring

/// Rank-based points per strategy: the best of g strategies earns g points,
/// the worst 1; tied strategies share the mean of the points they span, so
/// every call distributes exactly g(g+1)/2 points.
inline std::map<std::string, double> rank_scores(const std::map<std::string, double>& fractions,
                                                 bool higher_better = true) {
    const std::size_t g = fractions.size();
    if (g < 2) throw std::invalid_argument("rank_scores: at least two strategies required");
    for (const auto& [name, value] : fractions)
        if (std::isnan(value))
            throw std::invalid_argument("rank_scores: NaN fraction for '" + name + "'");

    std::vector<std::pair<std::string, double>> order(fractions.begin(), fractions.end());
    std::sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
        if (a.second != b.second) return higher_better ? a.second > b.second : a.second < b.second;
        return a.first < b.first;
    });

    std::map<std::string, double> scores;
    std::size_t i = 0;
    while (i < g) {
        std::size_t j = i;
        while (j + 1 < g && order[j + 1].second == order[i].second) ++j;
        // Positions i..j (0-based) share the mean of points (g - i)..(g - j).
        double points = 0.0;
        for (std::size_t p = i; p <= j; ++p) points += static_cast<double>(g - p);
        points /= static_cast<double>(j - i + 1);
        for (std::size_t p = i; p <= j; ++p) scores[order[p].first] = points;
        i = j + 1;
    }
    return scores;
}

/// Per-seed rank scores and their sums for one (optimizer, dimension) slice
/// of a record set. Fractions pool all (function, instance) cells.
struct ScoreTable {
    optim::Algorithm optimizer = optim::Algorithm::De;
    int dimension = 0;
    std::vector<int> seeds; // ascending
    std::map<std::string, double> score_sums;
    std::map<std::string, std::vector<double>> per_seed_scores; // aligned with seeds
};

inline ScoreTable score_table(const std::vector<harness::RunRecord>& records,
                              optim::Algorithm optimizer, int dimension) {
    // seed -> strategy -> (solved, total)
    std::map<int, std::map<std::string, std::pair<int, int>>> counts;
    std::set<std::string> strategies;
    for (const auto& r : records) {
        if (r.optimizer != optimizer || r.dimension != dimension) continue;
        const std::string name(init::strategy_name(r.strategy));
        strategies.insert(name);
        auto& [solved, total] = counts[r.seed][name];
        if (r.solved) ++solved;
        ++total;
    }
    if (counts.empty())
        throw std::invalid_argument("score_table: no records for the requested slice");
    if (strategies.size() < 2)
        throw std::invalid_argument("score_table: at least two strategies required");

    ScoreTable table;
    table.optimizer = optimizer;
    table.dimension = dimension;
    for (const auto& name : strategies) {
        table.score_sums[name] = 0.0;
        table.per_seed_scores[name] = {};
    }
    for (const auto& [seed, by_strategy] : counts) {
        std::map<std::string, double> fractions;
        for (const auto& name : strategies) {
            const auto it = by_strategy.find(name);
            if (it == by_strategy.end())
                throw std::invalid_argument("score_table: strategy '" + name +
                                            "' missing for seed " + std::to_string(seed));
            fractions[name] =
                static_cast<double>(it->second.first) / static_cast<double>(it->second.second);
        }
        const auto scores = rank_scores(fractions, /*higher_better=*/true);
        table.seeds.push_back(seed);
        for (const auto& [name, score] : scores) {
            table.score_sums[name] += score;
            table.per_seed_scores[name].push_back(score);
        }
    }
    return table;
}

// ---------------------------------------------------------------------------
// ANOVA and post-hoc

struct AnovaResult {
    double f_statistic = 0.0;
    double p_value = 1.0;
    int df_between = 0;
    int df_within = 0;
};

namespace detail {

struct GroupStats {
    int groups = 0;
    int observations = 0;
    double ss_between = 0.0;
    double ss_within = 0.0;
    std::map<std::string, double> means;
    std::map<std::string, int> sizes;
};

inline GroupStats group_stats(const std::map<std::string, std::vector<double>>& samples) {
    if (samples.size() < 2)
        throw std::invalid_argument("anova: at least two groups required");
    GroupStats st;
    st.groups = static_cast<int>(samples.size());
    double grand_sum = 0.0;
    for (const auto& [name, values] : samples) {
        if (values.size() < 2)
            throw std::invalid_argument("anova: group '" + name + "' needs >= 2 observations");
        double sum = 0.0;
        for (double v : values) {
            if (std::isnan(v))
                throw std::invalid_argument("anova: NaN observation in group '" + name + "'");
            sum += v;
        }
        st.sizes[name] = static_cast<int>(values.size());
        st.means[name] = sum / static_cast<double>(values.size());
        st.observations += static_cast<int>(values.size());
        grand_sum += sum;
    }
    const double grand_mean = grand_sum / st.observations;
    for (const auto& [name, values] : samples) {
        const double mean = st.means[name];
        const double dm = mean - grand_mean;
        st.ss_between += static_cast<double>(values.size()) * dm * dm;
        for (double v : values) {
            const double dv = v - mean;
            st.ss_within += dv * dv;
        }
    }
    return st;
}

} // namespace detail

/// One-way fixed-effects ANOVA across the groups. Degenerate variance cases
/// resolve by convention: no spread anywhere gives p = 1, zero within-group
/// spread with distinct means gives p = 0.
inline AnovaResult anova_oneway(const std::map<std::string, std::vector<double>>& samples) {
    const auto st = detail::group_stats(samples);
    AnovaResult res;
    res.df_between = st.groups - 1;
    res.df_within = st.observations - st.groups;
    if (st.ss_within == 0.0) {
        if (st.ss_between == 0.0) {
            res.f_statistic = 0.0;
            res.p_value = 1.0;
        } else {
            res.f_statistic = std::numeric_limits<double>::infinity();
            res.p_value = 0.0;
        }
        return res;
    }
    res.f_statistic =
        (st.ss_between / res.df_between) / (st.ss_within / res.df_within);
    res.p_value = f_upper_tail(res.f_statistic, res.df_between, res.df_within);
    return res;
}

/// Tukey HSD p-value for one pair, using the pooled within-group variance of
/// the full group set. Symmetric in the pair order.
inline double tukey_p(const std::map<std::string, std::vector<double>>& samples,
                      const std::string& a, const std::string& b) {
    if (!samples.count(a) || !samples.count(b))
        throw std::invalid_argument("tukey_p: unknown group name");
    if (a == b) throw std::invalid_argument("tukey_p: identical group names");
    const auto st = detail::group_stats(samples);
    const double diff = std::fabs(st.means.at(a) - st.means.at(b));
    if (st.ss_within == 0.0) return diff == 0.0 ? 1.0 : 0.0;
    const int dfw = st.observations - st.groups;
    const double msw = st.ss_within / dfw;
    const double se = std::sqrt(0.5 * msw *
                                (1.0 / st.sizes.at(a) + 1.0 / st.sizes.at(b)));
    const double q = diff / se;
    return 1.0 - studentized_range_cdf(q, st.groups, dfw);
}

/// p-values of `focus` against every other group, keyed by the other name.
inline std::map<std::string, double> posthoc_pairwise(
    const std::map<std::string, std::vector<double>>& samples, const std::string& focus) {
    if (!samples.count(focus)) throw std::invalid_argument("posthoc_pairwise: unknown focus group");
    std::map<std::string, double> out;
    for (const auto& [name, values] : samples)
        if (name != focus) out[name] = tukey_p(samples, focus, name);
    return out;
}

// ---------------------------------------------------------------------------
// per-dimension analysis and rendering

struct DimensionAnalysis {
    int dimension = 0;
    ScoreTable scores;
    AnovaResult anova;
    std::map<std::string, double> posthoc; // focus vs other, keyed by other
};

struct OptimizerAnalysis {
    optim::Algorithm optimizer = optim::Algorithm::De;
    std::string focus;
    std::vector<DimensionAnalysis> by_dimension; // ascending dimension
};

inline std::vector<OptimizerAnalysis> analyze(const std::vector<harness::RunRecord>& records) {
    if (records.empty()) throw std::invalid_argument("analyze: no records");
    std::set<int> dims;
    std::set<optim::Algorithm> optimizers;
    std::set<std::string> strategies;
    for (const auto& r : records) {
        dims.insert(r.dimension);
        optimizers.insert(r.optimizer);
        strategies.insert(std::string(init::strategy_name(r.strategy)));
    }
    const std::string focus = strategies.count("oblesa") ? "oblesa" : *strategies.begin();

    std::vector<OptimizerAnalysis> out;
    for (optim::Algorithm opt : optimizers) {
        OptimizerAnalysis oa;
        oa.optimizer = opt;
        oa.focus = focus;
        for (int dim : dims) {
            DimensionAnalysis da;
            da.dimension = dim;
            da.scores = score_table(records, opt, dim);
            da.anova = anova_oneway(da.scores.per_seed_scores);
            da.posthoc = posthoc_pairwise(da.scores.per_seed_scores, focus);
            oa.by_dimension.push_back(std::move(da));
        }
        out.push_back(std::move(oa));
    }
    return out;
}

namespace detail {

inline std::string display_strategy(const std::string& name) {
    std::string s = name;
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

// Fixed preference order mirroring the published table rows.
inline std::vector<std::string> strategy_row_order(const std::map<std::string, double>& sums) {
    std::vector<std::string> order;
    for (const char* pref : {"oblesa", "obl", "random"})
        if (sums.count(pref)) order.push_back(pref);
    for (const auto& [name, _] : sums)
        if (std::find(order.begin(), order.end(), name) == order.end()) order.push_back(name);
    return order;
}

inline std::string format_score(double v) {
    std::ostringstream os;
    if (v == std::floor(v))
        os << static_cast<long long>(v);
    else
        os << std::fixed << std::setprecision(1) << v;
    return os.str();
}

inline std::string format_p(double p) {
    if (p < 1e-4) return "<0.0001";
    std::ostringstream os;
    os << std::fixed << std::setprecision(3) << p;
    return os.str();
}

} // namespace detail

/// Aligned text rendering: per optimizer, one strategy-score table with an
/// ANOVA p-value row and one post-hoc table, dimensions as columns.
inline std::string format_report(const std::vector<OptimizerAnalysis>& analyses) {
    std::ostringstream os;
    constexpr int kLabelWidth = 16;
    constexpr int kCellWidth = 9;
    for (const auto& oa : analyses) {
        if (oa.by_dimension.empty()) continue;
        os << "advantage scores: " << optim::algorithm_name(oa.optimizer) << '\n';
        os << std::left << std::setw(kLabelWidth) << "strategy" << std::right;
        for (const auto& da : oa.by_dimension)
            os << std::setw(kCellWidth) << (std::to_string(da.dimension) + "D");
        os << '\n';
        const auto rows = detail::strategy_row_order(oa.by_dimension.front().scores.score_sums);
        for (const auto& name : rows) {
            os << std::left << std::setw(kLabelWidth) << detail::display_strategy(name)
               << std::right;
            for (const auto& da : oa.by_dimension)
                os << std::setw(kCellWidth) << detail::format_score(da.scores.score_sums.at(name));
            os << '\n';
        }
        os << std::left << std::setw(kLabelWidth) << "p-value" << std::right;
        for (const auto& da : oa.by_dimension)
            os << std::setw(kCellWidth) << detail::format_p(da.anova.p_value);
        os << "\n\n";

        os << "post-hoc: " << optim::algorithm_name(oa.optimizer) << '\n';
        os << std::left << std::setw(kLabelWidth) << "pair" << std::right;
        for (const auto& da : oa.by_dimension)
            os << std::setw(kCellWidth) << (std::to_string(da.dimension) + "D");
        os << '\n';
        for (const auto& name : rows) {
            if (name == oa.focus) continue;
            os << std::left << std::setw(kLabelWidth)
               << (detail::display_strategy(oa.focus) + "-" + detail::display_strategy(name))
               << std::right;
            for (const auto& da : oa.by_dimension)
                os << std::setw(kCellWidth) << detail::format_p(da.posthoc.at(name));
            os << '\n';
        }
        os << '\n';
    }
    return os.str();
}

inline std::string scores_csv(const std::vector<OptimizerAnalysis>& analyses) {
    std::ostringstream os;
    os << "optimizer,dim,strategy,score_sum,anova_f,anova_p\n";
    for (const auto& oa : analyses)
        for (const auto& da : oa.by_dimension)
            for (const auto& name : detail::strategy_row_order(da.scores.score_sums))
                os << optim::algorithm_name(oa.optimizer) << ',' << da.dimension << ',' << name
                   << ',' << harness::format_double(da.scores.score_sums.at(name)) << ','
                   << harness::format_double(da.anova.f_statistic) << ','
                   << harness::format_double(da.anova.p_value) << '\n';
    return os.str();
}

inline std::string posthoc_csv(const std::vector<OptimizerAnalysis>& analyses) {
    std::ostringstream os;
    os << "optimizer,dim,pair,p_value\n";
    for (const auto& oa : analyses)
        for (const auto& da : oa.by_dimension)
            for (const auto& [other, p] : da.posthoc)
                os << optim::algorithm_name(oa.optimizer) << ',' << da.dimension << ','
                   << oa.focus << '-' << other << ',' << harness::format_double(p) << '\n';
    return os.str();
}

} // namespace oblesa::stats
