// Command-line front end: run the experiment grid, summarize fractions of
// targets reached, score strategies per dimension, and dump empty-space
// search traces for plotting.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oblesa/config.hpp"
#include "oblesa/stats.hpp"

namespace fs = std::filesystem;
using oblesa::Vector;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct RunOptions {
    std::string config_path;
    std::string preset;
    std::string out_dir;
    std::vector<std::string> overrides;
    int parallelism = -1; // -1 = leave to config
    bool exact_knn = false;
    bool force = false;
};

int cmd_run(const RunOptions& opt, const char* argv0) {
    oblesa::config::json file_cfg;
    const bool have_file = !opt.config_path.empty();
    if (!have_file && opt.preset.empty()) {
        std::cerr << "oblesa run: --config or --preset required\n";
        return kExitUsage;
    }
    if (have_file) file_cfg = oblesa::config::load_file(opt.config_path);

    oblesa::harness::GridConfig grid =
        oblesa::config::resolve(have_file ? &file_cfg : nullptr, opt.preset, opt.overrides);
    if (opt.parallelism >= 0) grid.parallelism = opt.parallelism;
    if (opt.exact_knn) grid.init.esa_params.exact_knn = true;
    oblesa::harness::validate(grid);

    const fs::path out(opt.out_dir);
    const fs::path records_path = out / "records.csv";
    if (fs::exists(records_path) && !opt.force) {
        std::cerr << "oblesa run: '" << records_path.string()
                  << "' already exists; pass --force to overwrite\n";
        return kExitUsage;
    }
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) {
        std::cerr << "oblesa run: cannot create '" << out.string() << "': " << ec.message()
                  << "\n";
        return kExitIo;
    }

    const auto records = oblesa::harness::run_grid(grid);

    {
        std::ofstream os(records_path, std::ios::binary);
        if (!os) {
            std::cerr << "oblesa run: cannot write '" << records_path.string() << "'\n";
            return kExitIo;
        }
        oblesa::harness::write_records_csv(os, records);
    }
    {
        std::ofstream os(out / "manifest.json", std::ios::binary);
        if (!os) {
            std::cerr << "oblesa run: cannot write manifest\n";
            return kExitIo;
        }
        os << oblesa::config::make_manifest(grid, fs::path(argv0)).dump(2) << '\n';
    }

    int failures = 0;
    for (const auto& r : records)
        if (!r.diagnostic.empty()) {
            ++failures;
            std::cerr << "warning: cell " << oblesa::init::strategy_name(r.strategy) << '/'
                      << oblesa::optim::algorithm_name(r.optimizer) << '/'
                      << oblesa::bench::function_name(r.function_id) << ":" << r.instance << "/d"
                      << r.dimension << "/s" << r.seed << " failed: " << r.diagnostic << '\n';
        }
    std::cout << records.size() << " records written to " << records_path.string();
    if (failures > 0) std::cout << " (" << failures << " failed cells recorded as unsolved)";
    std::cout << '\n';
    return kExitOk;
}

std::vector<oblesa::harness::RunRecord> read_records_or_throw(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::ios_base::failure("cannot read '" + path + "'");
    return oblesa::harness::read_records_csv(is);
}

int cmd_report(const std::string& records_path, const std::string& out_path, bool per_function) {
    std::vector<oblesa::harness::RunRecord> records;
    try {
        records = read_records_or_throw(records_path);
    } catch (const std::ios_base::failure& e) {
        std::cerr << "oblesa report: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "oblesa report: " << e.what() << '\n';
        return kExitUsage;
    }

    std::vector<std::string> group_by = oblesa::harness::default_group_by();
    if (per_function) group_by.push_back("function");
    const auto rows = oblesa::harness::fraction_solved(records, group_by);

    std::ostringstream os;
    for (const auto& field : group_by) os << field << ',';
    os << "solved,total,fraction\n";
    for (const auto& row : rows) {
        for (const auto& k : row.key) os << k << ',';
        os << row.solved << ',' << row.total << ','
           << oblesa::harness::format_double(row.fraction) << '\n';
    }

    if (out_path.empty()) {
        std::cout << os.str();
    } else {
        std::ofstream of(out_path, std::ios::binary);
        if (!of) {
            std::cerr << "oblesa report: cannot write '" << out_path << "'\n";
            return kExitIo;
        }
        of << os.str();
    }
    return kExitOk;
}

int cmd_stats(const std::string& records_path, const std::string& out_dir) {
    std::vector<oblesa::harness::RunRecord> records;
    std::vector<oblesa::stats::OptimizerAnalysis> analyses;
    try {
        records = read_records_or_throw(records_path);
        analyses = oblesa::stats::analyze(records);
    } catch (const std::ios_base::failure& e) {
        std::cerr << "oblesa stats: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "oblesa stats: " << e.what() << '\n';
        return kExitUsage;
    }

    const std::string report = oblesa::stats::format_report(analyses);
    std::cout << report;

    const fs::path out(out_dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) {
        std::cerr << "oblesa stats: cannot create '" << out.string() << "': " << ec.message()
                  << '\n';
        return kExitIo;
    }
    const auto write = [&](const fs::path& p, const std::string& text) {
        std::ofstream os(p, std::ios::binary);
        if (!os) throw std::ios_base::failure("cannot write '" + p.string() + "'");
        os << text;
    };
    try {
        write(out / "scores.csv", oblesa::stats::scores_csv(analyses));
        write(out / "posthoc.csv", oblesa::stats::posthoc_csv(analyses));
        write(out / "report.txt", report);
    } catch (const std::ios_base::failure& e) {
        std::cerr << "oblesa stats: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitOk;
}

struct DemoOptions {
    int dimension = 2;
    int n_points = 200;
    int n_agents = 10;
    int k = 0; // 0 = scene default
    std::uint64_t seed = 1;
    std::string scene = "uniform";
    std::string out_path;
};

// Writes the dataset, every agent trajectory, and the final agent positions
// as rows `kind,step,x0,x1[,x2]`. Trajectory rows of agent i carry kind
// "agent<i>", its resting point carries kind "final<i>".
int cmd_demo_esa(const DemoOptions& opt) {
    if (opt.dimension != 2 && opt.dimension != 3) {
        std::cerr << "oblesa demo-esa: --dim must be 2 or 3 for plottable output\n";
        return kExitUsage;
    }
    if (opt.n_points < 1 || opt.n_agents < 1) {
        std::cerr << "oblesa demo-esa: --points and --agents must be positive\n";
        return kExitUsage;
    }
    const std::size_t d = static_cast<std::size_t>(opt.dimension);
    const oblesa::Bounds bounds = oblesa::Bounds::cube(d, 0.0, 1.0);
    oblesa::RandomSource rng(opt.seed);

    std::vector<Vector> dataset;
    dataset.reserve(static_cast<std::size_t>(opt.n_points));
    if (opt.scene == "uniform") {
        for (int i = 0; i < opt.n_points; ++i) {
            Vector p(d);
            for (auto& v : p) v = rng.uniform();
            dataset.push_back(std::move(p));
        }
    } else if (opt.scene == "ring") {
        // Circle (or equatorial circle in 3D) of radius 0.4 around the center.
        for (int i = 0; i < opt.n_points; ++i) {
            const double angle = 2.0 * 3.14159265358979323846 * i / opt.n_points;
            Vector p(d, 0.5);
            p[0] = 0.5 + 0.4 * std::cos(angle);
            p[1] = 0.5 + 0.4 * std::sin(angle);
            dataset.push_back(std::move(p));
        }
    } else if (opt.scene == "corner") {
        // Tight cluster near the low corner; everything else stays empty.
        for (int i = 0; i < opt.n_points; ++i) {
            Vector p(d);
            for (auto& v : p) v = 0.02 + 0.16 * rng.uniform();
            dataset.push_back(std::move(p));
        }
    } else {
        std::cerr << "oblesa demo-esa: unknown --scene '" << opt.scene
                  << "' (expected uniform, ring, or corner)\n";
        return kExitUsage;
    }

    // Scene defaults for k: the whole ring so its forces cancel at the
    // center, a broad neighborhood for the cluster escape, dim+1 otherwise.
    oblesa::esa::EsaParams params;
    if (opt.k > 0)
        params.k = opt.k;
    else if (opt.scene == "ring")
        params.k = opt.n_points;
    else if (opt.scene == "corner")
        params.k = std::min(opt.n_points, 20);
    else
        params.k = static_cast<int>(d) + 1;
    const oblesa::esa::NeighborIndex index(dataset, oblesa::esa::NeighborIndex::Mode::Exact);

    std::ofstream os(opt.out_path, std::ios::binary);
    if (!os) {
        std::cerr << "oblesa demo-esa: cannot write '" << opt.out_path << "'\n";
        return kExitIo;
    }
    os << "kind,step";
    for (std::size_t j = 0; j < d; ++j) os << ",x" << j;
    os << '\n';
    const auto write_row = [&](const std::string& kind, int step, const Vector& x) {
        os << kind << ',' << step;
        for (double v : x) os << ',' << oblesa::harness::format_double(v);
        os << '\n';
    };
    for (const auto& p : dataset) write_row("data", 0, p);

    for (int a = 0; a < opt.n_agents; ++a) {
        Vector start(d);
        if (opt.scene == "ring" && a == 0) {
            std::fill(start.begin(), start.end(), 0.5);
        } else if (opt.scene == "corner") {
            // Start next to the clump so the walk shows the escape into the
            // empty part of the box.
            for (auto& v : start) v = 0.02 + 0.16 * rng.uniform();
        } else {
            for (auto& v : start) v = rng.uniform();
        }
        // Re-trace the walk step by step so every visited position lands in
        // the file, not just the endpoint.
        Vector pos = start;
        int step = 0;
        write_row("agent" + std::to_string(a), step, pos);
        oblesa::esa::Agent agent{pos, oblesa::esa::AgentStatus::StepLimit, 0};
        while (true) {
            oblesa::esa::EsaParams one = params;
            one.n_steps = 1;
            agent = oblesa::esa::run_agent(index, bounds, one, pos);
            if (agent.status != oblesa::esa::AgentStatus::StepLimit || agent.position == pos)
                break;
            pos = agent.position;
            ++step;
            write_row("agent" + std::to_string(a), step, pos);
            if (step >= params.n_steps) break;
        }
        write_row("final" + std::to_string(a), step, agent.position);
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"oblesa: population initialization toolkit for evolutionary algorithms"};
    app.require_subcommand(1);

    RunOptions run_opt;
    CLI::App* run = app.add_subcommand("run", "run the experiment grid and write records.csv");
    run->add_option("--config", run_opt.config_path, "JSON config file")
        ->envname("OBLESA_CONFIG");
    run->add_option("--preset", run_opt.preset, "config preset: full, desk, desk-hd")
        ->envname("OBLESA_PRESET");
    run->add_option("--out", run_opt.out_dir, "output directory")
        ->required()
        ->envname("OBLESA_OUT");
    run->add_option("--set", run_opt.overrides,
                    "config override as dotted.path=value (repeatable)");
    run->add_option("--parallelism", run_opt.parallelism, "worker threads (0 = hardware)")
        ->envname("OBLESA_PARALLELISM");
    run->add_flag("--exact-knn", run_opt.exact_knn, "force exact neighbor queries");
    run->add_flag("--force", run_opt.force, "overwrite an existing records.csv");

    std::string report_records, report_out;
    bool report_per_function = false;
    CLI::App* report = app.add_subcommand("report", "fractions of targets reached per group");
    report->add_option("--records", report_records, "records.csv from a run")->required();
    report->add_option("--out", report_out, "output CSV path (default: stdout)");
    report->add_flag("--per-function", report_per_function, "also group by function");

    std::string stats_records, stats_out = ".";
    CLI::App* stats = app.add_subcommand(
        "stats", "per-dimension strategy scores with ANOVA and post-hoc tests");
    stats->add_option("--records", stats_records, "records.csv from a run")->required();
    stats->add_option("--out", stats_out, "output directory for scores.csv/posthoc.csv/report.txt");

    DemoOptions demo_opt;
    CLI::App* demo = app.add_subcommand("demo-esa", "trace empty-space search agents to CSV");
    demo->add_option("--dim", demo_opt.dimension, "dimension (2 or 3)");
    demo->add_option("--points", demo_opt.n_points, "dataset size");
    demo->add_option("--agents", demo_opt.n_agents, "number of agents");
    demo->add_option("--k", demo_opt.k, "neighbors per query (0 = scene default)");
    demo->add_option("--seed", demo_opt.seed, "random seed");
    demo->add_option("--scene", demo_opt.scene, "dataset shape: uniform, ring, corner");
    demo->add_option("--out", demo_opt.out_path, "output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (run->parsed()) return cmd_run(run_opt, argv[0]);
        if (report->parsed()) return cmd_report(report_records, report_out, report_per_function);
        if (stats->parsed()) return cmd_stats(stats_records, stats_out);
        if (demo->parsed()) return cmd_demo_esa(demo_opt);
    } catch (const oblesa::config::ConfigError& e) {
        std::cerr << "oblesa: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "oblesa: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "oblesa: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
