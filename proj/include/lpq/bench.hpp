#pragma once

#include <iosfwd>
#include <optional>

#include "lpq/costmodel.hpp"
#include "lpq/oracle.hpp"
#include "lpq/storage.hpp"

namespace lpq {

/// The canonical benchmark query (class 4): float probe against a
/// `< SOME` subquery whose NC branch filters the inner key column by X
/// and whose correlated branch matches a small-domain outer attribute.
SubqueryQuery make_eval_query();

/// Loads `<table>.csv` for the query's outer and inner tables from
/// `dir`, using the generator schemas for part/lineitem and type
/// inference otherwise.
Catalog load_catalog_for(const SubqueryQuery& q, const std::filesystem::path& dir);

struct SweepConfig {
    std::vector<int64_t> x_values;   // explicit sweep points ...
    std::vector<double> targets;     // ... or NC pass-fraction targets
    std::vector<PlanKind> plans{PlanKind::Lp, PlanKind::Cached};
    PlanFlags flags{};
    int repetitions = 3;
    int warmup = 1;
    size_t block_capacity = 1024;
};

struct SweepRun {
    int run_idx = 0;
    double wall_ms = 0;
    uint64_t inner_invocations = 0;
    uint64_t inner_rows_scanned = 0;
    uint64_t result_rows = 0;
};

struct SweepPlanSeries {
    PlanKind kind = PlanKind::Lp;
    std::vector<SweepRun> runs;
    double median_ms = 0;
};

struct SweepPoint {
    int64_t x = 0;
    std::optional<double> target;  // present in target-derived mode
    double measured_pass_fraction = 0;
    CostEstimate est;
    PlanKind chosen = PlanKind::Lp;
    std::vector<SweepPlanSeries> series;
};

struct SweepResult {
    std::vector<SweepPoint> points;
};

/// An X candidate with the NC pass fraction it induces.
struct XCandidate {
    int64_t x = 0;
    double pass_fraction = 0;
};

/// Derives the X value whose measured NC pass fraction is closest to
/// each target. Requires a `< SOME` query whose NC predicate is an
/// equality between an inner column and (xparam): candidates are the
/// distinct key values; their branch maxima come from one grouped pass
/// over the inner table, and pass fractions are monotone in the branch
/// maximum, which makes the per-target search a binary search.
std::vector<XCandidate> derive_x_for_targets(const SubqueryQuery& q, const Catalog& catalog,
                                             std::span<const double> targets);

/// Runs every requested plan kind at every sweep point (after warmup),
/// recording wall times, counters and the cost-model estimates.
SweepResult run_sweep(const SubqueryQuery& q, const Catalog& catalog, const SweepConfig& cfg);

/// One row per timed run plus a run_idx=-1 median summary row per
/// (point, plan) pair. Header documented in the README.
void write_sweep_csv(const SweepResult& result, std::ostream& os);

struct RunMaxRow {
    uint64_t scan_index = 0;  // among NC-passing rows, in storage order
    Scalar running_max;
};

/// Running maximum of the inner value expression over the NC-filtered
/// rows in storage order; the final value equals the NC digest maximum.
std::vector<RunMaxRow> running_max(const SubqueryQuery& q, const Catalog& catalog);

void write_runmax_csv(const std::vector<RunMaxRow>& rows, std::ostream& os);

double median(std::vector<double> values);

/// Wall time of run_plan in milliseconds, result discarded.
double time_plan_ms(const SubqueryQuery& q, PlanKind kind, PlanFlags flags,
                    const Catalog& catalog, const ExecConfig& cfg, PlanResult* out = nullptr);

}  // namespace lpq
