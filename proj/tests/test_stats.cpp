#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "oblesa/stats.hpp"

using namespace oblesa;
using namespace oblesa::stats;

TEST_CASE("rank scores: direct assignment and ties") {
    const auto plain = rank_scores({{"a", 0.5}, {"b", 0.3}, {"c", 0.2}});
    CHECK(plain.at("a") == 3.0);
    CHECK(plain.at("b") == 2.0);
    CHECK(plain.at("c") == 1.0);

    const auto tie = rank_scores({{"a", 0.4}, {"b", 0.4}, {"c", 0.1}});
    CHECK(tie.at("a") == 2.5);
    CHECK(tie.at("b") == 2.5);
    CHECK(tie.at("c") == 1.0);

    const auto full_tie = rank_scores({{"a", 0.2}, {"b", 0.2}, {"c", 0.2}});
    CHECK(full_tie.at("a") == 2.0);
    CHECK(full_tie.at("b") == 2.0);
    CHECK(full_tie.at("c") == 2.0);

    const auto lower = rank_scores({{"a", 0.5}, {"b", 0.3}}, /*higher_better=*/false);
    CHECK(lower.at("b") == 2.0);
    CHECK(lower.at("a") == 1.0);
}

TEST_CASE("rank scores: validation") {
    CHECK_THROWS_AS(rank_scores({{"a", 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(rank_scores({{"a", 1.0}, {"b", std::nan("")}}), std::invalid_argument);
}

TEST_CASE("rank scores: conservation and argrank invariance") {
    RandomSource rng(55);
    for (int trial = 0; trial < 200; ++trial) {
        const int g = 2 + static_cast<int>(rng.index(4));
        std::map<std::string, double> fractions;
        for (int i = 0; i < g; ++i) {
            // quantized fractions so ties actually happen
            fractions["s" + std::to_string(i)] = rng.index(5) / 4.0;
        }
        const auto scores = rank_scores(fractions);
        double total = 0.0;
        for (const auto& [name, s] : scores) total += s;
        CHECK(total == Catch::Approx(g * (g + 1) / 2.0).margin(1e-12));

        // strictly monotone transforms leave the ranks alone
        std::map<std::string, double> transformed;
        for (const auto& [name, f] : fractions) transformed[name] = std::exp(3.0 * f) - 2.0;
        CHECK(rank_scores(transformed) == scores);
    }
}

TEST_CASE("anova conventions and the hand-computed fixture") {
    const std::map<std::string, std::vector<double>> identical{
        {"a", {1.0, 2.0, 3.0}}, {"b", {1.0, 2.0, 3.0}}, {"c", {1.0, 2.0, 3.0}}};
    const AnovaResult same = anova_oneway(identical);
    CHECK(same.f_statistic == 0.0);
    CHECK(same.p_value == 1.0);

    // Zero spread within groups, distinct means.
    const std::map<std::string, std::vector<double>> constants{
        {"a", {1.0, 1.0}}, {"b", {2.0, 2.0}}};
    const AnovaResult sep = anova_oneway(constants);
    CHECK(sep.p_value == 0.0);

    // Hand computation for {1,2,3},{2,3,4},{3,4,5}: group means 2,3,4, grand
    // mean 3, SSB = 3*((-1)^2 + 0 + 1^2) = 6, SSW = 3 groups * 2 = 6,
    // F = (6/2)/(6/6) = 3, p = (1 + F*df1/df2)^(-df2/2) = 2^-3 = 0.125.
    const std::map<std::string, std::vector<double>> hand{
        {"a", {1.0, 2.0, 3.0}}, {"b", {2.0, 3.0, 4.0}}, {"c", {3.0, 4.0, 5.0}}};
    const AnovaResult res = anova_oneway(hand);
    CHECK(res.df_between == 2);
    CHECK(res.df_within == 6);
    CHECK(res.f_statistic == Catch::Approx(3.0).margin(1e-12));
    CHECK(res.p_value == Catch::Approx(0.125).margin(1e-10));

    const std::map<std::string, std::vector<double>> far{
        {"a", {0.0, 0.001, -0.001}}, {"b", {100.0, 100.001, 99.999}}};
    CHECK(anova_oneway(far).p_value < 1e-4);
}

TEST_CASE("anova validation") {
    CHECK_THROWS_AS(anova_oneway({{"a", {1.0, 2.0}}}), std::invalid_argument);
    CHECK_THROWS_AS(anova_oneway({{"a", {1.0}}, {"b", {1.0, 2.0}}}), std::invalid_argument);
    CHECK_THROWS_AS(anova_oneway({{"a", {1.0, std::nan("")}}, {"b", {1.0, 2.0}}}),
                    std::invalid_argument);
}

TEST_CASE("incomplete beta identities") {
    RandomSource rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        const double a = rng.uniform(0.5, 20.0);
        const double b = rng.uniform(0.5, 20.0);
        const double x = rng.uniform(0.0, 1.0);
        // I_x(a, 1) = x^a and I_x(1, b) = 1 - (1-x)^b
        CHECK(regularized_incomplete_beta(a, 1.0, x) ==
              Catch::Approx(std::pow(x, a)).margin(1e-12));
        CHECK(regularized_incomplete_beta(1.0, b, x) ==
              Catch::Approx(1.0 - std::pow(1.0 - x, b)).margin(1e-12));
        // reflection
        const double lhs = regularized_incomplete_beta(a, b, x);
        const double rhs = 1.0 - regularized_incomplete_beta(b, a, 1.0 - x);
        CHECK(lhs == Catch::Approx(rhs).margin(1e-12));
        CHECK(lhs >= 0.0);
        CHECK(lhs <= 1.0);
    }
}

TEST_CASE("tukey conventions") {
    const std::map<std::string, std::vector<double>> identical{
        {"a", {1.0, 2.0, 3.0}}, {"b", {1.0, 2.0, 3.0}}, {"c", {1.0, 2.0, 3.0}}};
    const auto ps = posthoc_pairwise(identical, "a");
    CHECK(ps.at("b") == Catch::Approx(1.0).margin(1e-9));
    CHECK(ps.at("c") == Catch::Approx(1.0).margin(1e-9));

    const std::map<std::string, std::vector<double>> far{
        {"a", {0.0, 0.001, -0.001}}, {"b", {100.0, 100.001, 99.999}}};
    CHECK(tukey_p(far, "a", "b") < 1e-4);

    const std::map<std::string, std::vector<double>> constants{
        {"a", {1.0, 1.0}}, {"b", {2.0, 2.0}}, {"c", {1.0, 1.0}}};
    CHECK(tukey_p(constants, "a", "b") == 0.0);
    CHECK(tukey_p(constants, "a", "c") == 1.0);

    CHECK_THROWS_AS(tukey_p(far, "a", "zz"), std::invalid_argument);
    CHECK_THROWS_AS(tukey_p(far, "a", "a"), std::invalid_argument);
}

TEST_CASE("tukey p-values are symmetric in the pair order") {
    RandomSource rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        std::map<std::string, std::vector<double>> samples;
        for (int g = 0; g < 3; ++g) {
            std::vector<double> values;
            for (int i = 0; i < 6; ++i) values.push_back(rng.uniform(-2.0, 2.0));
            samples["g" + std::to_string(g)] = values;
        }
        CHECK(tukey_p(samples, "g0", "g1") == tukey_p(samples, "g1", "g0"));
        CHECK(tukey_p(samples, "g0", "g2") == tukey_p(samples, "g2", "g0"));
    }
}

namespace {

nlohmann::json load_fixtures() {
    std::ifstream in(std::string(OBLESA_TEST_DATA_DIR) + "/stats_fixtures.json");
    REQUIRE(in.good());
    return nlohmann::json::parse(in);
}

} // namespace

TEST_CASE("anova and tukey agree with the reference implementation") {
    const auto fixtures = load_fixtures();
    for (const auto& fx : fixtures.at("anova_fixtures")) {
        std::map<std::string, std::vector<double>> samples;
        for (const auto& [name, values] : fx.at("groups").items())
            samples[name] = values.get<std::vector<double>>();

        const AnovaResult res = anova_oneway(samples);
        CHECK(res.f_statistic ==
              Catch::Approx(fx.at("anova_f").get<double>()).margin(1e-10));
        CHECK(res.p_value == Catch::Approx(fx.at("anova_p").get<double>()).margin(1e-8));
        CHECK(res.p_value >= 0.0);
        CHECK(res.p_value <= 1.0);

        for (const auto& pair : fx.at("tukey")) {
            const double p = tukey_p(samples, pair.at("a").get<std::string>(),
                                     pair.at("b").get<std::string>());
            CHECK(p == Catch::Approx(pair.at("p").get<double>()).margin(1e-8));
        }
    }
}

TEST_CASE("studentized range cdf matches reference points") {
    const auto fixtures = load_fixtures();
    for (const auto& pt : fixtures.at("studentized_range")) {
        const double cdf = studentized_range_cdf(pt.at("q").get<double>(),
                                                 pt.at("k").get<int>(), pt.at("df").get<int>());
        CHECK(cdf == Catch::Approx(pt.at("cdf").get<double>()).margin(1e-8));
    }
}

namespace {

harness::RunRecord make_record(init::Strategy s, optim::Algorithm o, int dim, int seed,
                               int function_index, bool solved) {
    harness::RunRecord r;
    r.strategy = s;
    r.optimizer = o;
    r.function_id = static_cast<bench::FunctionId>(function_index);
    r.instance = 0;
    r.dimension = dim;
    r.seed = seed;
    r.solved = solved;
    r.evals = 100;
    r.best_fitness = solved ? 0.0 : 1.0;
    return r;
}

} // namespace

TEST_CASE("score table sums and structure") {
    // oblesa solves everything, obl half, random nothing: per-seed scores
    // 3/2/1 and sums 30/20/10 over ten seeds.
    std::vector<harness::RunRecord> records;
    for (int seed = 1; seed <= 10; ++seed) {
        for (int fn = 0; fn < 4; ++fn) {
            records.push_back(make_record(init::Strategy::Oblesa, optim::Algorithm::De, 10, seed,
                                          fn, true));
            records.push_back(make_record(init::Strategy::Obl, optim::Algorithm::De, 10, seed, fn,
                                          fn % 2 == 0));
            records.push_back(make_record(init::Strategy::Random, optim::Algorithm::De, 10, seed,
                                          fn, false));
        }
    }
    const ScoreTable table = score_table(records, optim::Algorithm::De, 10);
    CHECK(table.seeds.size() == 10);
    CHECK(table.score_sums.at("oblesa") == 30.0);
    CHECK(table.score_sums.at("obl") == 20.0);
    CHECK(table.score_sums.at("random") == 10.0);
    double total = 0.0;
    for (const auto& [name, s] : table.score_sums) total += s;
    CHECK(total == 60.0); // 10 seeds x 6 points
    for (const auto& [name, per_seed] : table.per_seed_scores) {
        CHECK(per_seed.size() == 10);
        for (double v : per_seed) {
            CHECK(v >= 1.0);
            CHECK(v <= 3.0);
        }
    }

    CHECK_THROWS_AS(score_table(records, optim::Algorithm::Egwo, 10), std::invalid_argument);
    CHECK_THROWS_AS(score_table(records, optim::Algorithm::De, 2), std::invalid_argument);

    // drop one strategy for one seed: the slice is rejected
    std::vector<harness::RunRecord> broken = records;
    broken.erase(std::remove_if(broken.begin(), broken.end(),
                                [](const harness::RunRecord& r) {
                                    return r.seed == 5 && r.strategy == init::Strategy::Obl;
                                }),
                 broken.end());
    CHECK_THROWS_AS(score_table(broken, optim::Algorithm::De, 10), std::invalid_argument);
}

TEST_CASE("analysis report mirrors the tables layout") {
    std::vector<harness::RunRecord> records;
    RandomSource rng(123);
    for (int dim : {2, 3, 5, 10, 20, 40})
        for (auto opt : {optim::Algorithm::De, optim::Algorithm::Egwo})
            for (int seed = 1; seed <= 10; ++seed)
                for (int fn = 0; fn < 5; ++fn)
                    for (auto strat :
                         {init::Strategy::Random, init::Strategy::Obl, init::Strategy::Oblesa})
                        records.push_back(
                            make_record(strat, opt, dim, seed, fn, rng.uniform() < 0.5));

    const auto analyses = analyze(records);
    REQUIRE(analyses.size() == 2);
    for (const auto& oa : analyses) {
        CHECK(oa.focus == "oblesa");
        REQUIRE(oa.by_dimension.size() == 6);
        for (const auto& da : oa.by_dimension) {
            double total = 0.0;
            for (const auto& [name, s] : da.scores.score_sums) total += s;
            CHECK(total == Catch::Approx(60.0).margin(1e-9));
            CHECK(da.anova.p_value >= 0.0);
            CHECK(da.anova.p_value <= 1.0);
            CHECK(da.posthoc.size() == 2);
        }
    }

    const std::string report = format_report(analyses);
    for (const char* col : {"2D", "3D", "5D", "10D", "20D", "40D"})
        CHECK(report.find(col) != std::string::npos);
    CHECK(report.find("OBLESA") != std::string::npos);
    CHECK(report.find("OBLESA-OBL") != std::string::npos);
    CHECK(report.find("OBLESA-RANDOM") != std::string::npos);
    CHECK(report.find("p-value") != std::string::npos);

    const std::string scores = scores_csv(analyses);
    CHECK(scores.rfind("optimizer,dim,strategy,score_sum,anova_f,anova_p", 0) == 0);
    const std::string posthoc = posthoc_csv(analyses);
    CHECK(posthoc.rfind("optimizer,dim,pair,p_value", 0) == 0);
}
