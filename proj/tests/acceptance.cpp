// Acceptance suite: exercises the engine end to end and prints one
// PASS/FAIL line per criterion. Exits non-zero if any criterion fails.
//
//   1. plan results equal the brute-force oracle on randomized
//      instances of every query class (exact)
//   2. early-exit/memoize flags never change results; memoization hits
//      one inner evaluation per distinct correlation key (exact)
//   3. lp invokes the correlated subplan exactly once per NC-failing
//      outer row (exact)
//   4. sweep shape at scale 0.02: lp medians non-increasing (10% noise
//      allowance), cached medians constant within 1.25x
//   5. at the top sweep point, lp median <= 1/3 of cached median
//   6. the cost model picks the empirically fastest plan on >= 80% of
//      sweep points, and the closed forms match hand substitutions
//   7. with a late inner maximum, early-exit naive is slower at a
//      0.999 pass fraction than at 0.8; lp is not
//   8. prefilter scans <= 0.12x of naive's inner rows at NC inner
//      selectivity 0.1

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "support.hpp"

#include "lpq/bench.hpp"

using namespace lpq;
using lpqtest::Instance;

namespace {

struct Report {
    int failures = 0;

    void conclude(int id, const std::string& name, bool passed, const std::string& detail) {
        std::printf("[%s] criterion %d: %s — %s\n", passed ? "PASS" : "FAIL", id, name.c_str(),
                    detail.c_str());
        std::fflush(stdout);
        if (!passed) failures++;
    }
};

std::vector<Instance> class_instances(int classId, int count) {
    std::vector<Instance> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        if (i < 10)
            out.push_back(lpqtest::make_edge_instance(classId, i));
        else
            out.push_back(lpqtest::make_random_instance(
                classId, static_cast<uint64_t>(classId) * 100000 + i, 200, 500));
    }
    return out;
}

// ---------------------------------------------------------- criteria 1+2

void criteria_equivalence_and_flags(Report& report) {
    ExecConfig cfg{64};
    uint64_t mismatches = 0, flagMismatches = 0, memoMismatches = 0;
    uint64_t planRuns = 0;
    std::string firstBad;

    for (int classId = 1; classId <= 4; ++classId) {
        auto instances = class_instances(classId, 200);
        for (size_t idx = 0; idx < instances.size(); ++idx) {
            const Instance& inst = instances[idx];
            auto expected = oracle_eval(inst.query, inst.catalog);
            auto fails = lpqtest::reference_nc_fail_positions(inst);
            auto allRows = lpqtest::all_positions(inst.catalog.get(inst.query.outer_table));

            for (PlanKind kind : lpqtest::legal_plan_kinds(inst.query.connective)) {
                auto base = run_query(inst.query, kind, {}, inst.catalog, cfg);
                planRuns++;
                if (base.positions != expected.positions || base.rows != expected.rows) {
                    mismatches++;
                    if (firstBad.empty())
                        firstBad = "class " + std::to_string(classId) + " instance " +
                                   std::to_string(idx) + " kind " + to_string(kind);
                    continue;
                }
                for (bool ee : {false, true}) {
                    for (bool memo : {false, true}) {
                        if (!ee && !memo) continue;
                        auto got = run_query(inst.query, kind, {ee, memo}, inst.catalog, cfg);
                        if (got.positions != expected.positions) flagMismatches++;
                        if (memo) {
                            const auto& rows =
                                (kind == PlanKind::Lp) ? fails : allRows;
                            size_t keys = lpqtest::distinct_corr_keys(
                                inst, *inst.query.c_pred, rows);
                            if (got.stats.inner_invocations != keys) memoMismatches++;
                        }
                    }
                }
            }
        }
    }

    report.conclude(1, "oracle equivalence over 200 instances x 4 classes",
                    mismatches == 0,
                    mismatches == 0
                        ? std::to_string(planRuns) + " plan runs, zero mismatches"
                        : std::to_string(mismatches) + " mismatches, first at " + firstBad);
    report.conclude(2, "flag invariance and exact memoization counts",
                    flagMismatches == 0 && memoMismatches == 0,
                    std::to_string(flagMismatches) + " result changes, " +
                        std::to_string(memoMismatches) + " memo-count mismatches");
}

// ------------------------------------------------------------ criterion 3

void criterion_work_skipping(Report& report) {
    ExecConfig cfg{64};
    uint64_t mismatches = 0;
    for (uint64_t seed = 0; seed < 50; ++seed) {
        auto inst = lpqtest::make_random_instance(4, 50000 + seed, 200, 500);
        auto fails = lpqtest::reference_nc_fail_positions(inst);
        auto got = run_query(inst.query, PlanKind::Lp, {}, inst.catalog, cfg);
        if (got.stats.inner_invocations != fails.size()) mismatches++;
    }
    report.conclude(3, "lp correlated invocations = NC-failing outer rows", mismatches == 0,
                    mismatches == 0 ? "exact on 50 class-4 instances"
                                    : std::to_string(mismatches) + " mismatches");
}

// ------------------------------------------------------- criteria 4, 5, 6

void criteria_sweep(Report& report, const std::filesystem::path& outDir) {
    Catalog cat;
    cat.add(generate_part({0.02, 42}));
    cat.add(generate_lineitem({0.02, 42}));
    auto q = make_eval_query();

    SweepConfig cfg;
    cfg.targets = {0.2, 0.4, 0.6, 0.8, 0.999};
    cfg.plans = {PlanKind::Lp, PlanKind::Cached, PlanKind::Naive};
    cfg.repetitions = 7;
    cfg.warmup = 1;
    auto sweep = run_sweep(q, cat, cfg);

    {
        std::ofstream os(outDir / "sweep.csv");
        write_sweep_csv(sweep, os);
    }

    auto median_of = [&](const SweepPoint& p, PlanKind k) {
        for (const auto& s : p.series)
            if (s.kind == k) return s.median_ms;
        return 0.0;
    };

    // 4: lp non-increasing within 10% between adjacent points; cached
    // max/min <= 1.25
    bool lpShape = true;
    std::string lpDetail = "lp medians (ms):";
    for (size_t i = 0; i < sweep.points.size(); ++i) {
        double ms = median_of(sweep.points[i], PlanKind::Lp);
        char buf[32];
        std::snprintf(buf, sizeof(buf), " %.1f", ms);
        lpDetail += buf;
        if (i > 0 && ms > median_of(sweep.points[i - 1], PlanKind::Lp) * 1.10) lpShape = false;
    }
    double cachedMin = 1e300, cachedMax = 0;
    for (const auto& p : sweep.points) {
        double ms = median_of(p, PlanKind::Cached);
        cachedMin = std::min(cachedMin, ms);
        cachedMax = std::max(cachedMax, ms);
    }
    bool cachedFlat = cachedMax <= cachedMin * 1.25;
    {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "; cached max/min = %.3f", cachedMax / cachedMin);
        lpDetail += buf;
    }
    report.conclude(4, "sweep shape at scale 0.02", lpShape && cachedFlat, lpDetail);

    // 5: speedup at the 0.999-target point
    const SweepPoint& top = sweep.points.back();
    double lpTop = median_of(top, PlanKind::Lp);
    double cachedTop = median_of(top, PlanKind::Cached);
    bool speedup = lpTop <= cachedTop / 3.0;
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "lp %.1f ms vs cached %.1f ms at pass fraction %.4f (ratio %.1fx)", lpTop,
                  cachedTop, top.measured_pass_fraction, cachedTop / std::max(lpTop, 1e-9));
    report.conclude(5, "top-point speedup of at least 3x", speedup, buf);

    // 6: model choice matches the empirically fastest kind on >= 80% of
    // points, and the closed forms are exact on hand substitutions
    int matches = 0;
    for (const auto& p : sweep.points) {
        PlanKind fastest = p.series.front().kind;
        double best = p.series.front().median_ms;
        for (const auto& s : p.series)
            if (s.median_ms < best) {
                best = s.median_ms;
                fastest = s.kind;
            }
        if (fastest == p.chosen) matches++;
    }
    CostEstimate e1 = estimate(CostParams{10, 10, 1, 1, 0.0, 1.0});
    CostEstimate e2 = estimate(CostParams{10, 10, 1, 1, 1.0, 1.0});
    bool formulas = e1.naive == 200.0 && e1.cached == 110.0 && e1.proposed == 110.0 &&
                    e2.proposed == 10.0 &&
                    estimate_prefilter(CostParams{10, 100, 1, 1, 0, 1}, 0.5) == 600.0;
    bool choice = matches * 5 >= static_cast<int>(sweep.points.size()) * 4;
    std::snprintf(buf, sizeof(buf), "choice matched %d/%zu points; closed forms %s", matches,
                  sweep.points.size(), formulas ? "exact" : "WRONG");
    report.conclude(6, "cost-model fidelity", choice && formulas, buf);
}

// ------------------------------------------------------------ criterion 7

/// Inner layout: suppkey-1 rows and suppkey-2 rows interleaved. The
/// branch for x=1 keeps its maximum (999, witnessing 99.9% of probes)
/// hidden until halfway through the scan; the branch for x=2 puts its
/// maximum (800) first. The correlated predicate never matches, so the
/// compound scan depends on the NC branch alone.
Instance unlucky_instance(size_t outerRows, size_t innerRows) {
    Instance inst;
    std::vector<int64_t> probe(outerRows), key(outerRows);
    for (size_t i = 0; i < outerRows; ++i) {
        probe[i] = static_cast<int64_t>(i);  // 0..N-1 uniform grid
        key[i] = static_cast<int64_t>(i % 50);
    }
    inst.catalog.add(
        ColumnTable("s", {Column("probe", std::move(probe)), Column("key", std::move(key))}));

    std::vector<int64_t> suppkey(innerRows), v(innerRows), never(innerRows, -1);
    size_t branchRows = innerRows / 2;
    size_t seen1 = 0;
    for (size_t i = 0; i < innerRows; ++i) {
        if (i % 2 == 0) {
            suppkey[i] = 1;
            seen1++;
            v[i] = (seen1 == branchRows / 2 + 1) ? 999 : 100;
        } else {
            suppkey[i] = 2;
            v[i] = (i == 1) ? 800 : 100;
        }
    }
    inst.catalog.add(ColumnTable("e", {Column("suppkey", std::move(suppkey)),
                                       Column("v", std::move(v)),
                                       Column("never", std::move(never))}));

    SubqueryQuery q;
    q.outer_table = "s";
    q.output_columns = {"probe"};
    q.probe = Expr::col("probe");
    q.set_op = SetPredicateOp::LtSome;
    q.inner_table = "e";
    q.inner_value = Expr::col("v");
    q.nc_pred = Expr::cmp(CmpOp::Eq, Expr::col("suppkey"), Expr::xparam());
    q.c_pred = Expr::cmp(CmpOp::Eq, Expr::corr("S.key"), Expr::col("never"));
    q.connective = Connective::Or;
    inst.query = q;
    return inst;
}

void criterion_unlucky(Report& report, const std::filesystem::path& outDir) {
    Instance inst = unlucky_instance(1000, 40000);
    ExecConfig cfg;

    auto q1 = substitute_x(inst.query, 1);  // pass fraction 0.999, late max
    auto q2 = substitute_x(inst.query, 2);  // pass fraction 0.800, early max

    // the constructed dataset really has its maximum appear after 50%
    // of the NC scan
    auto rm = running_max(q1, inst.catalog);
    size_t firstAtMax = 0;
    for (size_t i = 0; i < rm.size(); ++i)
        if (compare(rm[i].running_max, rm.back().running_max) == 0) {
            firstAtMax = i;
            break;
        }
    bool lateMax = firstAtMax * 2 >= rm.size();
    {
        std::ofstream os(outDir / "runmax_unlucky.csv");
        write_runmax_csv(rm, os);
    }

    double pf1 = measure_params(q1, inst.catalog).nc_pass_fraction;
    double pf2 = measure_params(q2, inst.catalog).nc_pass_fraction;

    auto run_median = [&](const SubqueryQuery& q, PlanKind kind, PlanFlags flags) {
        std::vector<double> times;
        for (int r = 0; r < 3; ++r) times.push_back(time_plan_ms(q, kind, flags, inst.catalog, cfg));
        return median(times);
    };
    PlanFlags earlyExit{true, false};
    double naiveHigh = run_median(q1, PlanKind::Naive, earlyExit);
    double naiveLow = run_median(q2, PlanKind::Naive, earlyExit);
    double lpHigh = run_median(q1, PlanKind::Lp, {});
    double lpLow = run_median(q2, PlanKind::Lp, {});

    bool naiveInverted = naiveHigh > naiveLow;
    bool lpClean = lpHigh <= lpLow;
    char buf[192];
    std::snprintf(buf, sizeof(buf),
                  "pf %.3f/%.3f; max at scan %zu/%zu; naive %.1f vs %.1f ms (slower at high pf: "
                  "%s); lp %.1f vs %.1f ms",
                  pf1, pf2, firstAtMax, rm.size(), naiveHigh, naiveLow,
                  naiveInverted ? "yes" : "no", lpHigh, lpLow);
    report.conclude(7, "early-exit vulnerability reproduced, lp immune",
                    lateMax && naiveInverted && lpClean, buf);
}

// ------------------------------------------------------------ criterion 8

void criterion_prefilter_benefit(Report& report) {
    // class-1 instance with NC keeping exactly 10% of the inner rows
    size_t n = 100, m = 500;
    lpqtest::TestRng rng(20250810);
    Instance inst;
    inst.catalog.add(lpqtest::make_outer(rng, n, 3));
    {
        std::vector<int64_t> valI(m), cat(m), grp(m);
        std::vector<double> valF(m);
        std::vector<std::string> word(m, "w");
        for (size_t i = 0; i < m; ++i) {
            valI[i] = rng.range(0, 100);
            valF[i] = rng.real(0, 100);
            cat[i] = rng.range(1, 3);
            grp[i] = (i % 10 == 0) ? 1 : 0;  // exactly 50 of 500 survive
        }
        inst.catalog.add(ColumnTable(
            "e", {Column("val_i", std::move(valI)), Column("val_f", std::move(valF)),
                  Column("cat", std::move(cat)), Column("grp", std::move(grp)),
                  Column("word", std::move(word))}));
    }
    auto q = lpqtest::query_shell(1);
    q.probe = Expr::col("probe_i");
    q.inner_value = Expr::col("val_i");
    q.nc_pred = parse_expr("(= (col grp) (lit 1))");
    q.c_pred = parse_expr("(= (corr S.key) (col cat))");
    inst.query = q;

    ExecConfig cfg;
    auto naive = run_query(q, PlanKind::Naive, {}, inst.catalog, cfg);
    auto pre = run_query(q, PlanKind::Prefilter, {}, inst.catalog, cfg);
    bool resultsAgree = naive.positions == pre.positions;
    bool bounded = pre.stats.inner_rows_scanned <=
                   static_cast<uint64_t>(0.12 * static_cast<double>(naive.stats.inner_rows_scanned));
    char buf[128];
    std::snprintf(buf, sizeof(buf), "prefilter scanned %llu vs naive %llu (ratio %.3f)",
                  static_cast<unsigned long long>(pre.stats.inner_rows_scanned),
                  static_cast<unsigned long long>(naive.stats.inner_rows_scanned),
                  static_cast<double>(pre.stats.inner_rows_scanned) /
                      static_cast<double>(naive.stats.inner_rows_scanned));
    report.conclude(8, "prefilter work bound at 0.1 inner selectivity",
                    resultsAgree && bounded, buf);
}

}  // namespace

int main(int argc, char** argv) {
    std::filesystem::path outDir = "acceptance_out";
    for (int i = 1; i + 1 < argc; i += 2)
        if (std::string(argv[i]) == "--out-dir") outDir = argv[i + 1];
    std::filesystem::create_directories(outDir);

    Report report;
    criteria_equivalence_and_flags(report);
    criterion_work_skipping(report);
    criteria_sweep(report, outDir);
    criterion_unlucky(report, outDir);
    criterion_prefilter_benefit(report);

    if (report.failures == 0) {
        std::printf("all acceptance criteria passed\n");
        return 0;
    }
    std::printf("%d criterion(s) failed\n", report.failures);
    return 1;
}
