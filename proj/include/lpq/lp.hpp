#pragma once

#include <deque>

#include "lpq/exec.hpp"

namespace lpq {

/// Pass-through forwarding node between the LP coordinator and a child
/// subplan. The coordinator stages one tagged slice at a time; a child
/// pull consumes it. Pulling with nothing staged, or staging over an
/// unconsumed slice, is a protocol violation.
class Proxy : public PositionOperator {
  public:
    void stage(uint64_t sliceId, PositionBlock block);
    uint64_t consumed_slice() const { return consumed_; }

    void open() override {}
    std::optional<PositionBlock> next_block() override;
    void close() override {}

  private:
    std::optional<PositionBlock> staged_;
    uint64_t staged_id_ = 0;
    uint64_t consumed_ = 0;
};

/// Set difference `cached \ ncPass`, both ascending; ncPass must be a
/// subset of cached.
std::vector<RowPos> lp_exclude(std::span<const RowPos> cached, std::span<const RowPos> ncPass);

/// Slice-accounting counters: every outer position is cached exactly
/// once and released exactly once (as an NC pass or as an exclusion).
struct LpAudit {
    uint64_t slices = 0;
    uint64_t positions_cached = 0;
    uint64_t positions_released = 0;
};

/// The positional subquery-disjunction operator. Per outer slice, the
/// Modulator caches the slice and forwards it through the left Proxy to
/// the non-correlated subplan; the Inverter excludes the NC-passing
/// positions from the cached slice and feeds the remainder through the
/// right Proxy to the correlated subplan; the Merger unions both result
/// streams back into ascending positional output. Only outer positions
/// failing the cached NC check ever reach correlated evaluation.
class LpOperator : public PositionOperator {
  public:
    /// The two subplans must be wired to the given proxies as their
    /// outer children.
    LpOperator(std::unique_ptr<Datasource> outer,
               std::unique_ptr<SetOpNonCorrelated> ncSubplan,
               std::unique_ptr<SetOpCorrelated> corrSubplan, Proxy* leftProxy,
               Proxy* rightProxy, ExecStats* stats);

    void open() override;
    std::optional<PositionBlock> next_block() override;
    void close() override;

    const LpAudit& audit() const { return audit_; }

  private:
    /// Runs one outer slice through both subplans; false at end of
    /// stream. May merge to an empty result (then the caller advances).
    bool advance_slice();

    // Modulator state: outer slice cursor plus the slice cached for
    // exclusion.
    std::unique_ptr<Datasource> outer_;
    std::optional<PositionBlock> cached_slice_;
    uint64_t slice_id_ = 0;

    std::unique_ptr<SetOpNonCorrelated> nc_subplan_;
    std::unique_ptr<SetOpCorrelated> corr_subplan_;
    Proxy* left_proxy_;
    Proxy* right_proxy_;

    std::deque<PositionBlock> output_;
    bool exhausted_ = false;
    LpAudit audit_;
    ExecStats* stats_;
};

}  // namespace lpq
