#pragma once

#include "lpq/lp.hpp"
#include "lpq/query.hpp"

namespace lpq {

enum class PlanKind : uint8_t { Naive, Prefilter, Cached, Lp };
const char* to_string(PlanKind k);
PlanKind plan_kind_from_string(std::string_view s);

using PlanFlags = SetOpFlags;

/// Prefilter evaluates the AND rewrite, LP the OR rewrite; naive and
/// cached apply to both connectives.
bool plan_kind_legal(PlanKind kind, Connective connective);

/// An executable plan: a positional pipeline ending in a materialize of
/// the query's output columns, with its own instrumentation.
class Plan {
  public:
    PlanKind kind() const { return kind_; }
    const ExecStats& stats() const { return *stats_; }

  private:
    friend Plan build_plan(const SubqueryQuery&, PlanKind, PlanFlags, const Catalog&,
                           const ExecConfig&);
    friend struct PlanRunner;

    PlanKind kind_ = PlanKind::Naive;
    std::unique_ptr<ExecStats> stats_;
    std::unique_ptr<Materialize> root_;
};

struct PlanResult {
    std::vector<RowPos> positions;             // passing outer positions, ascending
    std::vector<std::vector<Scalar>> rows;     // one output tuple per position
    ExecStats stats;
};

/// Validates the query against the catalog, checks (kind, connective)
/// legality, and wires the operator tree.
Plan build_plan(const SubqueryQuery& q, PlanKind kind, PlanFlags flags, const Catalog& catalog,
                const ExecConfig& cfg);

/// Opens, drains and closes the plan.
PlanResult run_plan(Plan& plan);

PlanResult run_query(const SubqueryQuery& q, PlanKind kind, PlanFlags flags,
                     const Catalog& catalog, const ExecConfig& cfg);

}  // namespace lpq
