#include "lpq/plan.hpp"

namespace lpq {

const char* to_string(PlanKind k) {
    switch (k) {
        case PlanKind::Naive: return "naive";
        case PlanKind::Prefilter: return "prefilter";
        case PlanKind::Cached: return "cached";
        case PlanKind::Lp: return "lp";
    }
    return "?";
}

PlanKind plan_kind_from_string(std::string_view s) {
    if (s == "naive") return PlanKind::Naive;
    if (s == "prefilter") return PlanKind::Prefilter;
    if (s == "cached") return PlanKind::Cached;
    if (s == "lp") return PlanKind::Lp;
    raise(ErrorKind::Usage, "unknown plan kind: " + std::string(s));
}

bool plan_kind_legal(PlanKind kind, Connective connective) {
    if (kind == PlanKind::Prefilter) return connective == Connective::And;
    if (kind == PlanKind::Lp) return connective == Connective::Or;
    return true;
}

Plan build_plan(const SubqueryQuery& q, PlanKind kind, PlanFlags flags, const Catalog& catalog,
                const ExecConfig& cfg) {
    validate_query(q, catalog);
    if (!plan_kind_legal(kind, q.connective))
        raise(ErrorKind::Planning, std::string("plan kind ") + to_string(kind) +
                                       " is illegal for connective " +
                                       to_string(q.connective));

    const ColumnTable& outer = catalog.get(q.outer_table);
    const ColumnTable& inner = catalog.get(q.inner_table);

    Plan plan;
    plan.kind_ = kind;
    plan.stats_ = std::make_unique<ExecStats>();
    ExecStats* stats = plan.stats_.get();

    auto ds = std::make_unique<Datasource>(outer, cfg.block_capacity, stats);
    std::unique_ptr<PositionOperator> positional;

    switch (kind) {
        case PlanKind::Naive: {
            // Full compound predicate checked per outer row over the
            // whole inner table.
            InnerSubplan sub(inner, q.inner_value, q.compound_pred(), cfg.block_capacity);
            positional = std::make_unique<SetOpCorrelated>(std::move(ds), q.probe, q.set_op,
                                                           std::move(sub), flags, stats);
            break;
        }
        case PlanKind::Prefilter: {
            positional = std::make_unique<PrefilterSetOp>(std::move(ds), q.probe, q.set_op,
                                                          inner, q.inner_value, q.nc_pred,
                                                          q.c_pred, cfg.block_capacity, flags,
                                                          stats);
            break;
        }
        case PlanKind::Cached: {
            auto rewritten = rewrite(q);
            if (q.connective == Connective::Or) {
                const auto& form = std::get<OrForm>(rewritten);
                InnerSubplan nc(inner, form.nc_branch.inner_value, form.nc_branch.pred,
                                cfg.block_capacity);
                InnerSubplan corr(inner, form.c_branch.inner_value, form.c_branch.pred,
                                  cfg.block_capacity);
                positional = std::make_unique<SetOpCompound>(std::move(ds), q.probe, q.set_op,
                                                             std::move(nc), std::move(corr),
                                                             LogicOp::Or, flags, stats);
            } else {
                const auto& form = std::get<AndForm>(rewritten);
                InnerSubplan nc(inner, form.nc_only.inner_value, form.nc_only.pred,
                                cfg.block_capacity);
                InnerSubplan combined(inner, form.combined.inner_value, form.combined.pred,
                                      cfg.block_capacity);
                positional = std::make_unique<SetOpCompound>(std::move(ds), q.probe, q.set_op,
                                                             std::move(nc), std::move(combined),
                                                             LogicOp::And, flags, stats);
            }
            break;
        }
        case PlanKind::Lp: {
            const auto& form = std::get<OrForm>(rewrite(q));
            auto leftProxy = std::make_unique<Proxy>();
            auto rightProxy = std::make_unique<Proxy>();
            Proxy* left = leftProxy.get();
            Proxy* right = rightProxy.get();
            InnerSubplan nc(inner, form.nc_branch.inner_value, form.nc_branch.pred,
                            cfg.block_capacity);
            InnerSubplan corr(inner, form.c_branch.inner_value, form.c_branch.pred,
                              cfg.block_capacity);
            auto ncSetop = std::make_unique<SetOpNonCorrelated>(std::move(leftProxy), q.probe,
                                                                q.set_op, std::move(nc), stats);
            auto corrSetop = std::make_unique<SetOpCorrelated>(std::move(rightProxy), q.probe,
                                                               q.set_op, std::move(corr), flags,
                                                               stats);
            positional = std::make_unique<LpOperator>(std::move(ds), std::move(ncSetop),
                                                      std::move(corrSetop), left, right, stats);
            break;
        }
    }

    plan.root_ = std::make_unique<Materialize>(std::move(positional), outer, q.output_columns,
                                               stats);
    return plan;
}

struct PlanRunner {
    static PlanResult run(Plan& plan) {
        PlanResult result;
        Materialize& root = *plan.root_;
        root.open();
        while (auto block = root.next_block()) {
            for (size_t i = 0; i < block->size(); ++i) {
                result.positions.push_back(block->positions.positions[i]);
                std::vector<Scalar> row;
                row.reserve(block->columns.size());
                for (const auto& col : block->columns) row.push_back(col.scalar_at(i));
                result.rows.push_back(std::move(row));
            }
        }
        root.close();
        result.stats = *plan.stats_;
        return result;
    }
};

PlanResult run_plan(Plan& plan) { return PlanRunner::run(plan); }

PlanResult run_query(const SubqueryQuery& q, PlanKind kind, PlanFlags flags,
                     const Catalog& catalog, const ExecConfig& cfg) {
    Plan plan = build_plan(q, kind, flags, catalog, cfg);
    return run_plan(plan);
}

}  // namespace lpq
