#include "lpq/costmodel.hpp"

#include <algorithm>
#include <random>

namespace lpq {

namespace {

void check_params(const CostParams& p) {
    if (p.n < 0 || p.m < 0 || p.cost_nc < 0 || p.cost_c < 0)
        raise(ErrorKind::Usage, "cost parameters must be non-negative");
    if (p.nc_pass_fraction < 0 || p.nc_pass_fraction > 1)
        raise(ErrorKind::Usage, "nc pass fraction must lie in [0,1]");
}

}  // namespace

CostEstimate estimate(const CostParams& p) {
    check_params(p);
    CostEstimate e;
    e.naive = p.n * p.m * (p.cost_nc + p.cost_c);
    e.cached = p.n * p.cost_nc + p.n * p.m * p.cost_c;
    e.proposed = p.n * p.cost_nc + p.n * (1.0 - p.nc_pass_fraction) * p.m * p.cost_c;
    return e;
}

double estimate_prefilter(const CostParams& p, double ncInnerSelectivity) {
    check_params(p);
    if (ncInnerSelectivity < 0 || ncInnerSelectivity > 1)
        raise(ErrorKind::Usage, "nc inner selectivity must lie in [0,1]");
    return p.m * p.cost_nc + p.n * (p.m * ncInnerSelectivity) * p.cost_c;
}

PlanKind choose_plan(const SubqueryQuery& q, const CostParams& p) {
    CostEstimate e = estimate(p);
    if (q.connective == Connective::Or) {
        // preference on ties: lp, then cached, then naive
        PlanKind best = PlanKind::Lp;
        double bestCost = e.proposed;
        if (e.cached < bestCost) {
            best = PlanKind::Cached;
            bestCost = e.cached;
        }
        if (e.naive < bestCost) best = PlanKind::Naive;
        return best;
    }
    double pre = estimate_prefilter(p, p.nc_inner_selectivity);
    return e.naive < pre ? PlanKind::Naive : PlanKind::Prefilter;
}

CostParams measure_params(const SubqueryQuery& q, const Catalog& catalog, MeasureMode mode,
                          size_t sampleSize, uint64_t seed) {
    validate_query(q, catalog);
    const ColumnTable& outer = catalog.get(q.outer_table);
    const ColumnTable& inner = catalog.get(q.inner_table);

    CostParams p;
    p.n = static_cast<double>(outer.row_count());
    p.m = static_cast<double>(inner.row_count());
    p.cost_nc = expression_cost(*q.nc_pred);
    p.cost_c = expression_cost(*q.c_pred);

    ExecConfig cfg;
    InnerSubplan ncBranch(inner, q.inner_value, q.nc_pred, cfg.block_capacity);
    Digest digest = ncBranch.build_digest(q.set_op, nullptr, nullptr);

    // fraction of inner rows surviving the NC predicate
    if (inner.row_count() > 0) {
        uint64_t kept = 0;
        size_t rows = inner.row_count();
        for (size_t start = 0; start < rows; start += cfg.block_capacity) {
            size_t nrows = std::min(cfg.block_capacity, rows - start);
            PositionBlock block{&inner, std::vector<RowPos>(nrows)};
            for (size_t i = 0; i < nrows; ++i)
                block.positions[i] = static_cast<RowPos>(start + i);
            VecValues pass = eval_block(*q.nc_pred, block, nullptr);
            for (uint8_t b : pass.bools) kept += b;
        }
        p.nc_inner_selectivity = static_cast<double>(kept) / static_cast<double>(rows);
    }

    // fraction of outer rows passing the NC branch of the rewrite
    if (outer.row_count() == 0) return p;
    std::vector<RowPos> probesAt;
    if (mode == MeasureMode::Exact || sampleSize >= outer.row_count()) {
        probesAt.resize(outer.row_count());
        for (size_t i = 0; i < probesAt.size(); ++i) probesAt[i] = static_cast<RowPos>(i);
    } else {
        std::mt19937_64 rng(seed);
        probesAt.resize(sampleSize);
        for (auto& pos : probesAt)
            pos = static_cast<RowPos>(rng() % outer.row_count());
        std::sort(probesAt.begin(), probesAt.end());
        probesAt.erase(std::unique(probesAt.begin(), probesAt.end()), probesAt.end());
    }
    PositionBlock block{&outer, std::move(probesAt)};
    VecValues probes = eval_block(*q.probe, block, nullptr);
    uint64_t pass = 0;
    for (size_t i = 0; i < block.size(); ++i)
        if (digest.decide(probes.scalar_at(i))) pass++;
    p.nc_pass_fraction = static_cast<double>(pass) / static_cast<double>(block.size());
    return p;
}

}  // namespace lpq
