#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <sstream>
#include <tuple>

#include "oblesa/harness.hpp"

using namespace oblesa;
using namespace oblesa::harness;

namespace {

GridConfig small_grid() {
    GridConfig cfg;
    cfg.dimensions = {2};
    cfg.seeds = {1, 2};
    cfg.suite.functions = {bench::FunctionId::Sphere, bench::FunctionId::Rastrigin};
    cfg.suite.instances = 1;
    cfg.init.n_pop = 20;
    cfg.init.esa_params.n_steps = 50;
    cfg.optimizer.max_iterations = 10;
    cfg.parallelism = 1;
    return cfg;
}

} // namespace

TEST_CASE("cell seeds are pure and distinguish every key part") {
    const auto base = cell_seed(1, init::Strategy::Random, optim::Algorithm::De,
                                bench::FunctionId::Sphere, 0, 2);
    CHECK(base == cell_seed(1, init::Strategy::Random, optim::Algorithm::De,
                            bench::FunctionId::Sphere, 0, 2));
    CHECK(base != cell_seed(2, init::Strategy::Random, optim::Algorithm::De,
                            bench::FunctionId::Sphere, 0, 2));
    CHECK(base != cell_seed(1, init::Strategy::Obl, optim::Algorithm::De,
                            bench::FunctionId::Sphere, 0, 2));
    CHECK(base != cell_seed(1, init::Strategy::Random, optim::Algorithm::Egwo,
                            bench::FunctionId::Sphere, 0, 2));
    CHECK(base != cell_seed(1, init::Strategy::Random, optim::Algorithm::De,
                            bench::FunctionId::Rastrigin, 0, 2));
    CHECK(base != cell_seed(1, init::Strategy::Random, optim::Algorithm::De,
                            bench::FunctionId::Sphere, 1, 2));
    CHECK(base != cell_seed(1, init::Strategy::Random, optim::Algorithm::De,
                            bench::FunctionId::Sphere, 0, 3));
}

TEST_CASE("run_grid produces exactly one record per cell") {
    const GridConfig cfg = small_grid();
    const auto records = run_grid(cfg);
    // 3 strategies x 2 optimizers x 1 dim x (2 functions x 1 instance) x 2 seeds
    CHECK(records.size() == 24);

    std::set<std::tuple<int, int, int, int, int, int>> keys;
    for (const auto& r : records) {
        keys.insert(r.key());
        CHECK(r.evals <= 20000); // budget_multiplier * dim
        CHECK(r.evals > 0);
        CHECK(r.diagnostic.empty());
    }
    CHECK(keys.size() == records.size());
}

TEST_CASE("run_grid is deterministic and schedule independent") {
    const GridConfig cfg = small_grid();
    const auto a = run_grid(cfg);

    GridConfig parallel = cfg;
    parallel.parallelism = 4;
    const auto b = run_grid(parallel);

    REQUIRE(a.size() == b.size());
    std::ostringstream csv_a, csv_b;
    write_records_csv(csv_a, a);
    write_records_csv(csv_b, b);
    CHECK(csv_a.str() == csv_b.str());

    const auto c = run_grid(cfg);
    std::ostringstream csv_c;
    write_records_csv(csv_c, c);
    CHECK(csv_a.str() == csv_c.str());
}

TEST_CASE("failed cells are recorded, not fatal") {
    GridConfig cfg = small_grid();
    cfg.init.n_pop = 2; // too small for the de mutation partners
    cfg.optimizers = {optim::Algorithm::De};
    cfg.strategies = {init::Strategy::Random};
    const auto records = run_grid(cfg);
    CHECK(records.size() == 4);
    for (const auto& r : records) {
        CHECK_FALSE(r.solved);
        CHECK_FALSE(r.diagnostic.empty());
    }
}

TEST_CASE("records csv round trip") {
    const auto records = run_grid(small_grid());
    std::ostringstream os;
    write_records_csv(os, records);

    const std::string text = os.str();
    CHECK(text.rfind("strategy,optimizer,function,instance,dim,seed,solved,evals,best_fitness\n",
                     0) == 0);
    CHECK(text.find("\r") == std::string::npos); // LF endings only

    std::istringstream is(text);
    const auto parsed = read_records_csv(is);
    REQUIRE(parsed.size() == records.size());
    for (std::size_t i = 0; i < parsed.size(); ++i) {
        CHECK(parsed[i].key() == records[i].key());
        CHECK(parsed[i].solved == records[i].solved);
        CHECK(parsed[i].evals == records[i].evals);
        // shortest round-trip decimals parse back to the identical double
        CHECK(parsed[i].best_fitness == records[i].best_fitness);
    }
}

TEST_CASE("records csv rejects malformed input") {
    {
        std::istringstream is("not,a,header\n");
        CHECK_THROWS_AS(read_records_csv(is), std::runtime_error);
    }
    {
        std::istringstream is("");
        CHECK_THROWS_AS(read_records_csv(is), std::runtime_error);
    }
    {
        std::istringstream is(std::string(kRecordsCsvHeader) + "\nrandom,de,sphere,0,2\n");
        CHECK_THROWS_AS(read_records_csv(is), std::runtime_error);
    }
    {
        std::istringstream is(std::string(kRecordsCsvHeader) +
                              "\nrandom,de,sphere,0,2,1,1,xx,0.5\n");
        CHECK_THROWS_AS(read_records_csv(is), std::runtime_error);
    }
    {
        std::istringstream is(std::string(kRecordsCsvHeader) +
                              "\nrandom,de,unknown_fn,0,2,1,1,10,0.5\n");
        CHECK_THROWS_AS(read_records_csv(is), std::runtime_error);
    }
    {
        std::istringstream is(std::string(kRecordsCsvHeader) +
                              "\nrandom,de,sphere,0,2,1,maybe,10,0.5\n");
        CHECK_THROWS_AS(read_records_csv(is), std::runtime_error);
    }
}

namespace {

RunRecord quick_record(init::Strategy s, int dim, int seed, bool solved) {
    RunRecord r;
    r.strategy = s;
    r.optimizer = optim::Algorithm::De;
    r.function_id = bench::FunctionId::Sphere;
    r.dimension = dim;
    r.seed = seed;
    r.solved = solved;
    return r;
}

} // namespace

TEST_CASE("non-finite fitness survives the csv") {
    RunRecord r = quick_record(init::Strategy::Random, 2, 1, false);
    r.best_fitness = std::numeric_limits<double>::infinity();
    std::ostringstream os;
    write_records_csv(os, {r});
    std::istringstream is(os.str());
    const auto parsed = read_records_csv(is);
    REQUIRE(parsed.size() == 1);
    CHECK(std::isinf(parsed[0].best_fitness));
}

TEST_CASE("fraction_solved arithmetic") {
    std::vector<RunRecord> records;
    for (int i = 0; i < 30; ++i)
        records.push_back(quick_record(init::Strategy::Random, 2, 1, i < 15));
    const auto rows = fraction_solved(records);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].solved == 15);
    CHECK(rows[0].total == 30);
    CHECK(rows[0].fraction == 0.5);

    std::vector<RunRecord> all_solved(10, quick_record(init::Strategy::Obl, 2, 1, true));
    CHECK(fraction_solved(all_solved)[0].fraction == 1.0);
    std::vector<RunRecord> none_solved(10, quick_record(init::Strategy::Obl, 2, 1, false));
    CHECK(fraction_solved(none_solved)[0].fraction == 0.0);
}

TEST_CASE("fraction_solved grouping conserves counts") {
    RandomSource rng(8);
    std::vector<RunRecord> records;
    for (int dim : {2, 5})
        for (int seed : {1, 2, 3})
            for (auto s : {init::Strategy::Random, init::Strategy::Oblesa})
                for (int rep = 0; rep < 4; ++rep)
                    records.push_back(quick_record(s, dim, seed, rng.uniform() < 0.3));

    const auto rows = fraction_solved(records);
    int solved = 0, total = 0;
    for (const auto& row : rows) {
        solved += row.solved;
        total += row.total;
        CHECK(row.key.size() == 4);
        CHECK(row.fraction >= 0.0);
        CHECK(row.fraction <= 1.0);
    }
    CHECK(total == static_cast<int>(records.size()));
    int actually_solved = 0;
    for (const auto& r : records)
        if (r.solved) ++actually_solved;
    CHECK(solved == actually_solved);

    const auto by_strategy = fraction_solved(records, {"strategy"});
    CHECK(by_strategy.size() == 2);

    CHECK_THROWS_AS(fraction_solved({}), std::invalid_argument);
    CHECK_THROWS_AS(fraction_solved(records, {"nope"}), std::invalid_argument);
    CHECK_THROWS_AS(fraction_solved(records, {}), std::invalid_argument);
}

TEST_CASE("grid config validation") {
    GridConfig cfg = small_grid();
    CHECK_NOTHROW(validate(cfg));
    cfg.dimensions = {7};
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg = small_grid();
    cfg.seeds = {1, 1};
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg = small_grid();
    cfg.strategies.clear();
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg = small_grid();
    cfg.init.n_pop = 1;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
}
