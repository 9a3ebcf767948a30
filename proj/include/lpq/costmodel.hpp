#pragma once

#include "lpq/plan.hpp"
#include "lpq/query.hpp"

namespace lpq {

/// Inputs to the cost formulas. Costs are abstract per-row units; only
/// the ordering of estimates matters. nc_pass_fraction is the fraction
/// of OUTER rows passing the cached NC branch; nc_inner_selectivity is
/// the fraction of INNER rows passing the NC predicate (used by the
/// prefilter estimate).
struct CostParams {
    double n = 0;                     // outer row count
    double m = 0;                     // inner row count
    double cost_nc = 1;               // per-row cost of the NC predicate
    double cost_c = 1;                // per-row cost of the C predicate
    double nc_pass_fraction = 0;      // in [0,1]
    double nc_inner_selectivity = 1;  // in [0,1]
};

struct CostEstimate {
    double naive = 0;     // N * M * (costNC + costC)
    double cached = 0;    // N * costNC + N * M * costC
    double proposed = 0;  // N * costNC + N * (1 - passFraction) * M * costC
};

/// The three closed-form estimates. The proposed model multiplies the
/// correlated term by the NC-FAILING outer fraction, so it decays to
/// N * costNC as the pass fraction approaches 1.
CostEstimate estimate(const CostParams& p);

/// AND-rewrite estimate: one NC pass over the inner table plus a
/// correlated loop over the surviving fraction.
/// M * costNC + N * (M * ncInnerSelectivity) * costC.
double estimate_prefilter(const CostParams& p, double ncInnerSelectivity);

/// Cheapest legal plan for the query's connective: OR classes choose
/// among {naive, cached, lp}, AND classes among {naive, prefilter}.
/// Ties prefer lp/prefilter, then cached, then naive.
PlanKind choose_plan(const SubqueryQuery& q, const CostParams& p);

enum class MeasureMode : uint8_t { Exact, Sample };

/// Fills CostParams from the data: N and M from row counts; pass
/// fractions measured by probing the NC-branch digest against all outer
/// rows (Exact) or a fixed-size uniform sample (Sample); predicate
/// costs default to expression node counts.
CostParams measure_params(const SubqueryQuery& q, const Catalog& catalog,
                          MeasureMode mode = MeasureMode::Exact, size_t sampleSize = 1000,
                          uint64_t seed = 0);

}  // namespace lpq
