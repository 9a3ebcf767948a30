// lpq command line: data generation, query execution under each plan
// kind, the NC-selectivity sweep, cost-model explain, the running-max
// analysis, and the brute-force oracle.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "lpq/bench.hpp"

namespace fs = std::filesystem;
using namespace lpq;

namespace {

void write_result_csv(const std::vector<std::string>& columns,
                      const std::vector<std::vector<Scalar>>& rows, const fs::path& path) {
    std::ofstream os(path);
    if (!os) raise(ErrorKind::Data, "cannot write " + path.string());
    for (size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << '\n';
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i].to_display();
        os << '\n';
    }
}

SubqueryQuery load_query_with_x(const std::string& queryFile, std::optional<int64_t> x) {
    SubqueryQuery q = load_query_file(queryFile);
    if (q.has_xparam()) {
        if (!x)
            raise(ErrorKind::Planning,
                  "query contains (xparam); pass --x to substitute a value");
        return substitute_x(q, *x);
    }
    if (x)
        raise(ErrorKind::Usage, "--x given but the query has no (xparam)");
    return q;
}

void print_stats(const ExecStats& stats) {
    std::cout << "inner_invocations: " << stats.inner_invocations << "\n";
    std::cout << "inner_rows_scanned: " << stats.inner_rows_scanned << "\n";
    std::cout << "nc_digest_builds: " << stats.nc_digest_builds << "\n";
    for (const auto& [op, n] : stats.positions_emitted)
        std::cout << "emitted." << op << ": " << n << "\n";
}

struct CommonQueryArgs {
    std::string query_file;
    std::string data_dir;
    int64_t x = 0;
    bool has_x = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--query", query_file, "query document")->required();
        cmd->add_option("--data", data_dir, "directory with <table>.csv files")->required();
        cmd->add_option("--x", x, "value for (xparam)")->each([this](const std::string&) {
            has_x = true;
        });
    }

    std::optional<int64_t> x_opt() const {
        return has_x ? std::optional<int64_t>(x) : std::nullopt;
    }
};

int cmd_gen(double scale, uint64_t seed, const std::string& outDir) {
    fs::create_directories(outDir);
    GenSpec spec{scale, seed};
    auto part = generate_part(spec);
    auto lineitem = generate_lineitem(spec);
    save_csv(part, fs::path(outDir) / "part.csv");
    save_csv(lineitem, fs::path(outDir) / "lineitem.csv");
    std::cout << "part_rows: " << part.row_count() << "\n";
    std::cout << "lineitem_rows: " << lineitem.row_count() << "\n";
    std::cout << "part_checksum: " << table_checksum(part) << "\n";
    std::cout << "lineitem_checksum: " << table_checksum(lineitem) << "\n";
    return 0;
}

int cmd_run(const CommonQueryArgs& args, const std::string& planName, bool earlyExit,
            bool memoize, size_t capacity, const std::string& dumpPath) {
    SubqueryQuery q = load_query_with_x(args.query_file, args.x_opt());
    Catalog catalog = load_catalog_for(q, args.data_dir);
    PlanKind kind = plan_kind_from_string(planName);
    PlanFlags flags{earlyExit, memoize};
    ExecConfig cfg{capacity};

    PlanResult result;
    double ms = time_plan_ms(q, kind, flags, catalog, cfg, &result);
    std::cout << "plan: " << to_string(kind) << "\n";
    std::cout << "class: " << classify(q) << "\n";
    std::cout << "result_rows: " << result.rows.size() << "\n";
    std::cout << "wall_millis: " << ms << "\n";
    print_stats(result.stats);
    if (!dumpPath.empty()) write_result_csv(q.output_columns, result.rows, dumpPath);
    return 0;
}

int cmd_sweep(const std::string& queryFile, const std::string& dataDir,
              std::vector<double> targets, std::vector<int64_t> xValues,
              const std::string& plansCsv, int reps, int warmup, size_t capacity,
              bool earlyExit, bool memoize, const std::string& outPath) {
    SubqueryQuery q = queryFile.empty() ? make_eval_query() : load_query_file(queryFile);
    Catalog catalog = load_catalog_for(q, dataDir);

    SweepConfig cfg;
    cfg.targets = std::move(targets);
    cfg.x_values = std::move(xValues);
    cfg.plans.clear();
    std::stringstream plans(plansCsv);
    std::string item;
    while (std::getline(plans, item, ','))
        if (!item.empty()) cfg.plans.push_back(plan_kind_from_string(item));
    cfg.repetitions = reps;
    cfg.warmup = warmup;
    cfg.block_capacity = capacity;
    cfg.flags = {earlyExit, memoize};

    auto result = run_sweep(q, catalog, cfg);
    if (outPath.empty()) {
        write_sweep_csv(result, std::cout);
    } else {
        std::ofstream os(outPath);
        if (!os) raise(ErrorKind::Data, "cannot write " + outPath);
        write_sweep_csv(result, os);
        for (const auto& p : result.points) {
            std::cout << "x " << p.x << " pass_fraction " << p.measured_pass_fraction;
            for (const auto& s : p.series)
                std::cout << " " << to_string(s.kind) << "_median_ms " << s.median_ms;
            std::cout << "\n";
        }
    }
    return 0;
}

int cmd_explain(const CommonQueryArgs& args, size_t sampleSize, uint64_t seed) {
    SubqueryQuery q = load_query_with_x(args.query_file, args.x_opt());
    Catalog catalog = load_catalog_for(q, args.data_dir);
    MeasureMode mode = sampleSize == 0 ? MeasureMode::Exact : MeasureMode::Sample;
    CostParams p = measure_params(q, catalog, mode, sampleSize ? sampleSize : 1000, seed);
    CostEstimate e = estimate(p);

    std::cout << "class: " << classify(q) << "\n";
    std::cout << "n: " << p.n << "\n";
    std::cout << "m: " << p.m << "\n";
    std::cout << "cost_nc: " << p.cost_nc << "\n";
    std::cout << "cost_c: " << p.cost_c << "\n";
    std::cout << "nc_pass_fraction: " << p.nc_pass_fraction << "\n";
    std::cout << "nc_inner_selectivity: " << p.nc_inner_selectivity << "\n";
    std::cout << "estimate_naive: " << e.naive << "\n";
    std::cout << "estimate_cached: " << e.cached << "\n";
    std::cout << "estimate_proposed: " << e.proposed << "\n";
    if (q.connective == Connective::And)
        std::cout << "estimate_prefilter: " << estimate_prefilter(p, p.nc_inner_selectivity)
                  << "\n";
    std::cout << "legal_kinds:";
    for (PlanKind k : {PlanKind::Naive, PlanKind::Prefilter, PlanKind::Cached, PlanKind::Lp})
        if (plan_kind_legal(k, q.connective)) std::cout << " " << to_string(k);
    std::cout << "\n";
    std::cout << "chosen: " << to_string(choose_plan(q, p)) << "\n";
    return 0;
}

int cmd_runmax(const CommonQueryArgs& args, const std::string& outPath) {
    SubqueryQuery q = load_query_with_x(args.query_file, args.x_opt());
    Catalog catalog = load_catalog_for(q, args.data_dir);
    auto rows = running_max(q, catalog);
    std::string finalMax =
        rows.empty() ? std::string("none") : rows.back().running_max.to_display();
    if (outPath.empty()) {
        write_runmax_csv(rows, std::cout);
        std::cerr << "scanned: " << rows.size() << "\n";
        std::cerr << "final_max: " << finalMax << "\n";
    } else {
        std::ofstream os(outPath);
        if (!os) raise(ErrorKind::Data, "cannot write " + outPath);
        write_runmax_csv(rows, os);
        std::cout << "scanned: " << rows.size() << "\n";
        std::cout << "final_max: " << finalMax << "\n";
    }
    return 0;
}

int cmd_oracle(const CommonQueryArgs& args, const std::string& dumpPath) {
    SubqueryQuery q = load_query_with_x(args.query_file, args.x_opt());
    Catalog catalog = load_catalog_for(q, args.data_dir);
    auto result = oracle_eval(q, catalog);
    std::cout << "result_rows: " << result.rows.size() << "\n";
    if (!dumpPath.empty()) write_result_csv(q.output_columns, result.rows, dumpPath);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"positional columnar engine for compound-predicate subqueries"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate part/lineitem CSV data");
    double scale = 1.0;
    uint64_t seed = 0;
    std::string outDir;
    gen->add_option("--scale", scale, "row scale factor")->required();
    gen->add_option("--seed", seed, "generator seed");
    gen->add_option("--out", outDir, "output directory")->required();

    // run
    auto* run = app.add_subcommand("run", "execute a query under one plan kind");
    CommonQueryArgs runArgs;
    runArgs.attach(run);
    std::string planName;
    bool earlyExit = false, memoize = false;
    size_t capacity = 1024;
    std::string dumpPath;
    run->add_option("--plan", planName, "naive|prefilter|cached|lp")->required();
    run->add_flag("--early-exit", earlyExit, "stop SOME scans at the first witness");
    run->add_flag("--memoize", memoize, "cache digests per correlation key");
    run->add_option("--capacity", capacity, "position block capacity");
    run->add_option("--dump", dumpPath, "write the full result as CSV");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "NC-selectivity sweep benchmark");
    std::string sweepQuery, sweepData;
    sweep->add_option("--query", sweepQuery,
                      "query document (default: the built-in evaluation query)");
    sweep->add_option("--data", sweepData, "directory with <table>.csv files")->required();
    std::vector<double> targets;
    std::vector<int64_t> xValues;
    std::string plansCsv = "lp,cached";
    int reps = 3, warmup = 1;
    size_t sweepCapacity = 1024;
    bool sweepEarlyExit = false, sweepMemoize = false;
    std::string sweepOut;
    sweep->add_option("--targets", targets, "NC pass-fraction targets (derives x values)");
    sweep->add_option("--x-values", xValues, "explicit x values");
    sweep->add_option("--plans", plansCsv, "comma-separated plan kinds");
    sweep->add_option("--reps", reps, "timed repetitions per point");
    sweep->add_option("--warmup", warmup, "untimed warmup runs per point");
    sweep->add_option("--capacity", sweepCapacity, "position block capacity");
    sweep->add_flag("--early-exit", sweepEarlyExit, "run plans with early exit");
    sweep->add_flag("--memoize", sweepMemoize, "run plans with memoization");
    sweep->add_option("--out", sweepOut, "CSV output path (default stdout)");

    // explain
    auto* explain = app.add_subcommand("explain", "measured cost parameters and plan choice");
    CommonQueryArgs explainArgs;
    explainArgs.attach(explain);
    size_t sampleSize = 0;
    uint64_t explainSeed = 0;
    explain->add_option("--sample", sampleSize,
                        "sample size for the pass fraction (0 = exact)");
    explain->add_option("--seed", explainSeed, "sampling seed");

    // runmax
    auto* runmax = app.add_subcommand("runmax", "running maximum over the NC scan");
    CommonQueryArgs runmaxArgs;
    runmaxArgs.attach(runmax);
    std::string runmaxOut;
    runmax->add_option("--out", runmaxOut, "CSV output path (default stdout)");

    // oracle
    auto* oracle = app.add_subcommand("oracle", "brute-force reference evaluation");
    CommonQueryArgs oracleArgs;
    oracleArgs.attach(oracle);
    std::string oracleDump;
    oracle->add_option("--dump", oracleDump, "write the full result as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*gen) return cmd_gen(scale, seed, outDir);
        if (*run) return cmd_run(runArgs, planName, earlyExit, memoize, capacity, dumpPath);
        if (*sweep)
            return cmd_sweep(sweepQuery, sweepData, targets, xValues, plansCsv, reps, warmup,
                             sweepCapacity, sweepEarlyExit, sweepMemoize, sweepOut);
        if (*explain) return cmd_explain(explainArgs, sampleSize, explainSeed);
        if (*runmax) return cmd_runmax(runmaxArgs, runmaxOut);
        if (*oracle) return cmd_oracle(oracleArgs, oracleDump);
    } catch (const EngineError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return exit_code_for(ErrorKind::Invariant);
    }
    return 2;
}
