#include "lpq/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <unordered_map>

namespace lpq {

SubqueryQuery make_eval_query() {
    SubqueryQuery q;
    q.outer_table = "part";
    q.output_columns = {"partkey"};
    q.probe = Expr::col("retailprice");
    q.set_op = SetPredicateOp::LtSome;
    q.inner_table = "lineitem";
    q.inner_value = Expr::arith(
        ArithOp::Mul,
        Expr::arith(ArithOp::Mul,
                    Expr::arith(ArithOp::Mul, Expr::lit_float(3.0), Expr::col("extendedprice")),
                    Expr::col("discount")),
        Expr::col("tax"));
    q.nc_pred = Expr::cmp(CmpOp::Eq, Expr::col("suppkey"), Expr::xparam());
    q.c_pred = Expr::cmp(CmpOp::Eq, Expr::corr("P.size"), Expr::col("quantity"));
    q.connective = Connective::Or;
    return q;
}

Catalog load_catalog_for(const SubqueryQuery& q, const std::filesystem::path& dir) {
    Catalog catalog;
    for (const std::string& name : {q.outer_table, q.inner_table}) {
        if (catalog.has(name)) continue;
        auto path = dir / (name + ".csv");
        if (!std::filesystem::exists(path))
            raise(ErrorKind::Data, "missing data file " + path.string());
        if (name == "part")
            catalog.add(load_csv(path, name, part_schema()));
        else if (name == "lineitem")
            catalog.add(load_csv(path, name, lineitem_schema()));
        else
            catalog.add(load_csv_infer(path, name));
    }
    return catalog;
}

double median(std::vector<double> values) {
    if (values.empty()) return 0;
    std::sort(values.begin(), values.end());
    size_t mid = values.size() / 2;
    if (values.size() % 2) return values[mid];
    return 0.5 * (values[mid - 1] + values[mid]);
}

double time_plan_ms(const SubqueryQuery& q, PlanKind kind, PlanFlags flags,
                    const Catalog& catalog, const ExecConfig& cfg, PlanResult* out) {
    Plan plan = build_plan(q, kind, flags, catalog, cfg);
    auto start = std::chrono::steady_clock::now();
    PlanResult result = run_plan(plan);
    auto stop = std::chrono::steady_clock::now();
    if (out) *out = std::move(result);
    return std::chrono::duration<double, std::milli>(stop - start).count();
}

// ------------------------------------------------------------ derivation

namespace {

/// Matches `(= (col K) (xparam))` in either operand order; returns K.
std::optional<std::string> xparam_key_column(const Expr& ncPred) {
    const auto* cmp = std::get_if<Expr::Cmp>(&ncPred.node());
    if (!cmp || cmp->op != CmpOp::Eq) return std::nullopt;
    const auto* lcol = std::get_if<Expr::ColumnRef>(&cmp->lhs->node());
    const auto* rcol = std::get_if<Expr::ColumnRef>(&cmp->rhs->node());
    bool lx = std::holds_alternative<Expr::XParam>(cmp->lhs->node());
    bool rx = std::holds_alternative<Expr::XParam>(cmp->rhs->node());
    if (lcol && rx) return lcol->name;
    if (rcol && lx) return rcol->name;
    return std::nullopt;
}

}  // namespace

std::vector<XCandidate> derive_x_for_targets(const SubqueryQuery& q, const Catalog& catalog,
                                             std::span<const double> targets) {
    if (q.set_op != SetPredicateOp::LtSome)
        raise(ErrorKind::Planning, "target derivation needs a lt_some query");
    auto keyCol = xparam_key_column(*q.nc_pred);
    if (!keyCol)
        raise(ErrorKind::Planning,
              "target derivation needs an nc predicate of the form (= (col K) (xparam))");

    const ColumnTable& outer = catalog.get(q.outer_table);
    const ColumnTable& inner = catalog.get(q.inner_table);
    const auto& keys = inner.column(*keyCol).ints();

    // Branch maximum per distinct key, one grouped pass.
    ExecConfig cfg;
    std::unordered_map<int64_t, Scalar> groupMax;
    size_t rows = inner.row_count();
    for (size_t start = 0; start < rows; start += cfg.block_capacity) {
        size_t n = std::min(cfg.block_capacity, rows - start);
        PositionBlock block{&inner, std::vector<RowPos>(n)};
        for (size_t i = 0; i < n; ++i) block.positions[i] = static_cast<RowPos>(start + i);
        VecValues vals = eval_block(*q.inner_value, block, nullptr);
        for (size_t i = 0; i < n; ++i) {
            Scalar v = vals.scalar_at(i);
            auto [it, fresh] = groupMax.try_emplace(keys[start + i], v);
            if (!fresh && compare(v, it->second) > 0) it->second = v;
        }
    }
    if (groupMax.empty())
        raise(ErrorKind::Data, "target derivation: inner table is empty");

    // Sorted outer probes, so each candidate's pass fraction is one
    // binary search: pf(X) = |{probe < max(X)}| / N.
    std::vector<Scalar> probes;
    probes.reserve(outer.row_count());
    for (size_t start = 0; start < outer.row_count(); start += cfg.block_capacity) {
        size_t n = std::min(cfg.block_capacity, outer.row_count() - start);
        PositionBlock block{&outer, std::vector<RowPos>(n)};
        for (size_t i = 0; i < n; ++i) block.positions[i] = static_cast<RowPos>(start + i);
        VecValues vals = eval_block(*q.probe, block, nullptr);
        for (size_t i = 0; i < n; ++i) probes.push_back(vals.scalar_at(i));
    }
    if (probes.empty())
        raise(ErrorKind::Data, "target derivation: outer table is empty");
    std::sort(probes.begin(), probes.end(),
              [](const Scalar& a, const Scalar& b) { return compare(a, b) < 0; });

    struct Cand {
        int64_t x;
        double pf;
    };
    std::vector<Cand> cands;
    cands.reserve(groupMax.size());
    for (const auto& [x, mx] : groupMax) {
        auto it = std::lower_bound(probes.begin(), probes.end(), mx,
                                   [](const Scalar& a, const Scalar& b) {
                                       return compare(a, b) < 0;
                                   });
        double pf = static_cast<double>(it - probes.begin()) / static_cast<double>(probes.size());
        cands.push_back({x, pf});
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        return a.pf != b.pf ? a.pf < b.pf : a.x < b.x;
    });

    std::vector<XCandidate> out;
    out.reserve(targets.size());
    for (double target : targets) {
        auto it = std::lower_bound(cands.begin(), cands.end(), target,
                                   [](const Cand& c, double t) { return c.pf < t; });
        const Cand* best = nullptr;
        if (it != cands.end()) best = &*it;
        if (it != cands.begin()) {
            const Cand& below = *(it - 1);
            if (!best || std::abs(below.pf - target) <= std::abs(best->pf - target))
                best = &below;
        }
        out.push_back({best->x, best->pf});
    }
    return out;
}

// ----------------------------------------------------------------- sweep

SweepResult run_sweep(const SubqueryQuery& q, const Catalog& catalog, const SweepConfig& cfg) {
    if (cfg.repetitions < 1)
        raise(ErrorKind::Usage, "sweep needs at least one repetition");
    if (cfg.plans.empty())
        raise(ErrorKind::Usage, "sweep needs at least one plan kind");
    if (cfg.x_values.empty() && cfg.targets.empty())
        raise(ErrorKind::Usage, "sweep needs x values or pass-fraction targets");

    struct PointSpec {
        int64_t x;
        std::optional<double> target;
    };
    std::vector<PointSpec> specs;
    if (!cfg.x_values.empty()) {
        for (int64_t x : cfg.x_values) specs.push_back({x, std::nullopt});
    } else {
        auto derived = derive_x_for_targets(q, catalog, cfg.targets);
        for (size_t i = 0; i < derived.size(); ++i)
            specs.push_back({derived[i].x, cfg.targets[i]});
    }

    ExecConfig exec{cfg.block_capacity};
    SweepResult result;
    std::vector<SubqueryQuery> queries;
    for (const auto& spec : specs) {
        SubqueryQuery qx = q.has_xparam() ? substitute_x(q, spec.x) : q;
        CostParams params = measure_params(qx, catalog);

        SweepPoint point;
        point.x = spec.x;
        point.target = spec.target;
        point.measured_pass_fraction = params.nc_pass_fraction;
        point.est = estimate(params);
        point.chosen = choose_plan(qx, params);
        for (PlanKind kind : cfg.plans) {
            SweepPlanSeries series;
            series.kind = kind;
            point.series.push_back(std::move(series));
        }
        result.points.push_back(std::move(point));
        queries.push_back(std::move(qx));
    }

    // Repetitions are interleaved round-robin across points and plans
    // so slow machine-load drift lands evenly on every series instead
    // of skewing whichever point happened to run last.
    for (size_t p = 0; p < queries.size(); ++p)
        for (PlanKind kind : cfg.plans)
            for (int w = 0; w < cfg.warmup; ++w)
                time_plan_ms(queries[p], kind, cfg.flags, catalog, exec);
    for (int r = 0; r < cfg.repetitions; ++r) {
        for (size_t p = 0; p < queries.size(); ++p) {
            for (size_t k = 0; k < cfg.plans.size(); ++k) {
                PlanResult pr;
                double ms =
                    time_plan_ms(queries[p], cfg.plans[k], cfg.flags, catalog, exec, &pr);
                result.points[p].series[k].runs.push_back(
                    {r, ms, pr.stats.inner_invocations, pr.stats.inner_rows_scanned,
                     static_cast<uint64_t>(pr.rows.size())});
            }
        }
    }
    for (auto& point : result.points) {
        for (auto& series : point.series) {
            std::vector<double> times;
            for (const auto& run : series.runs) times.push_back(run.wall_ms);
            series.median_ms = median(times);
        }
    }
    return result;
}

void write_sweep_csv(const SweepResult& result, std::ostream& os) {
    os << "x_value,measured_nc_pass_fraction,plan_kind,run_idx,wall_millis,"
          "inner_invocations,inner_rows_scanned,result_rows,"
          "cost_naive,cost_cached,cost_proposed,chosen_kind\n";
    auto point_tail = [&os](const SweepPoint& p) {
        os << ',' << p.est.naive << ',' << p.est.cached << ',' << p.est.proposed << ','
           << to_string(p.chosen) << '\n';
    };
    for (const auto& p : result.points) {
        for (const auto& s : p.series) {
            for (const auto& r : s.runs) {
                os << p.x << ',' << p.measured_pass_fraction << ',' << to_string(s.kind) << ','
                   << r.run_idx << ',' << r.wall_ms << ',' << r.inner_invocations << ','
                   << r.inner_rows_scanned << ',' << r.result_rows;
                point_tail(p);
            }
            // summary row: the median of the repetitions
            os << p.x << ',' << p.measured_pass_fraction << ',' << to_string(s.kind) << ','
               << -1 << ',' << s.median_ms << ",,,";
            point_tail(p);
        }
    }
}

// ------------------------------------------------------------ runmax

std::vector<RunMaxRow> running_max(const SubqueryQuery& q, const Catalog& catalog) {
    if (q.set_op != SetPredicateOp::LtSome)
        raise(ErrorKind::Planning, "running-max analysis needs a lt_some query");
    validate_query(q, catalog);
    const ColumnTable& inner = catalog.get(q.inner_table);

    ExecConfig cfg;
    std::vector<RunMaxRow> out;
    std::optional<Scalar> best;
    size_t rows = inner.row_count();
    uint64_t scanIndex = 0;
    for (size_t start = 0; start < rows; start += cfg.block_capacity) {
        size_t n = std::min(cfg.block_capacity, rows - start);
        PositionBlock block{&inner, std::vector<RowPos>(n)};
        for (size_t i = 0; i < n; ++i) block.positions[i] = static_cast<RowPos>(start + i);
        VecValues pass = eval_block(*q.nc_pred, block, nullptr);
        PositionBlock sel{&inner, {}};
        for (size_t i = 0; i < n; ++i)
            if (pass.bools[i]) sel.positions.push_back(block.positions[i]);
        if (sel.empty()) continue;
        VecValues vals = eval_block(*q.inner_value, sel, nullptr);
        for (size_t i = 0; i < vals.size(); ++i) {
            Scalar v = vals.scalar_at(i);
            if (!best || compare(v, *best) > 0) best = v;
            out.push_back({scanIndex++, *best});
        }
    }
    return out;
}

void write_runmax_csv(const std::vector<RunMaxRow>& rows, std::ostream& os) {
    os << "scan_index,running_max\n";
    for (const auto& r : rows) os << r.scan_index << ',' << r.running_max.to_display() << '\n';
}

}  // namespace lpq
