#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "lpq/expr.hpp"
#include "lpq/table.hpp"

namespace lpq {

struct ExecConfig {
    size_t block_capacity = 1024;
};

enum class SetPredicateOp : uint8_t { In, LtSome, GtSome, LtAll, GtAll };
const char* to_string(SetPredicateOp op);
SetPredicateOp set_predicate_op_from_string(std::string_view s);

inline bool is_existential(SetPredicateOp op) {
    return op == SetPredicateOp::In || op == SetPredicateOp::LtSome ||
           op == SetPredicateOp::GtSome;
}

/// Reference linear-scan semantics over a materialized multiset.
/// SOME forms are false on an empty multiset, ALL forms true.
bool set_predicate(SetPredicateOp op, const Scalar& probe, std::span<const Scalar> values);

/// One-value-per-probe digest of an inner result: a membership set for
/// IN, the max for <SOME / >ALL, the min for >SOME / <ALL. Decides
/// exactly like set_predicate over the full multiset.
class Digest {
  public:
    explicit Digest(SetPredicateOp op) : op_(op) {}

    void add(const Scalar& v);
    bool decide(const Scalar& probe) const;

    SetPredicateOp op() const { return op_; }
    bool empty() const { return count_ == 0; }
    size_t value_count() const { return count_; }
    const std::optional<Scalar>& extreme() const { return extreme_; }

  private:
    SetPredicateOp op_;
    std::optional<Scalar> extreme_;
    std::unordered_set<Scalar, ScalarHash> members_;
    size_t count_ = 0;
};

/// Run-wide instrumentation. inner_invocations counts per-outer-row
/// inner evaluations; one-pass non-correlated digest builds are tallied
/// separately in nc_digest_builds.
struct ExecStats {
    uint64_t inner_rows_scanned = 0;
    uint64_t inner_invocations = 0;
    uint64_t nc_digest_builds = 0;
    std::map<std::string, uint64_t> positions_emitted;

    void note_emitted(const std::string& op, uint64_t n) { positions_emitted[op] += n; }
    uint64_t total_positions_emitted() const;
};

/// Pull-based position-block operator. After open(), next_block()
/// yields a finite stream of blocks, then std::nullopt forever.
/// Datasource never emits empty blocks; filtering operators may
/// (a block filtered to zero positions is legal mid-stream).
class PositionOperator {
  public:
    virtual ~PositionOperator() = default;
    virtual void open() = 0;
    virtual std::optional<PositionBlock> next_block() = 0;
    virtual void close() = 0;
};

/// Initializes the positional data flow: ascending blocks covering
/// 0..rowCount-1 exactly once.
class Datasource : public PositionOperator {
  public:
    Datasource(const ColumnTable& table, size_t capacity, ExecStats* stats);

    void open() override;
    std::optional<PositionBlock> next_block() override;
    void close() override {}

  private:
    const ColumnTable* table_;
    size_t capacity_;
    size_t cursor_ = 0;
    ExecStats* stats_;
};

/// Keeps input positions whose (non-correlated) predicate holds.
class PosFilter : public PositionOperator {
  public:
    PosFilter(std::unique_ptr<PositionOperator> child, ExprPtr pred, std::string name,
              ExecStats* stats);

    void open() override;
    std::optional<PositionBlock> next_block() override;
    void close() override;

  private:
    std::unique_ptr<PositionOperator> child_;
    ExprPtr pred_;
    std::string name_;
    ExecStats* stats_;
};

/// The inner query of a subquery predicate: value expression plus
/// predicate over the inner table, with correlation parameter slots.
class InnerSubplan {
  public:
    InnerSubplan(const ColumnTable& inner, ExprPtr value, ExprPtr pred, size_t blockCapacity);

    bool correlated() const { return pred_->correlated(); }
    const ColumnTable& inner() const { return *inner_; }
    const ExprPtr& value_expr() const { return value_; }
    const ExprPtr& pred() const { return pred_; }

    /// Full multiset of value-expression results over predicate-passing
    /// rows. Every inner row is examined (counted in stats).
    std::vector<Scalar> evaluate_multiset(const Binding* binding, ExecStats* stats) const;

    /// Single vectorized pass folding values into a digest.
    Digest build_digest(SetPredicateOp op, const Binding* binding, ExecStats* stats) const;

    /// Row-at-a-time existential scan that stops at the first witness;
    /// scanned-row accounting is exact (index of the witness + 1).
    bool exists_witness(SetPredicateOp op, const Scalar& probe, const Binding* binding,
                        ExecStats* stats) const;

  private:
    const ColumnTable* inner_;
    ExprPtr value_;
    ExprPtr pred_;
    size_t capacity_;
};

struct SetOpFlags {
    bool early_exit = false;
    bool memoize = false;
};

/// Positional SetOp for a non-correlated inner query: the digest is
/// built once on the first pull, then probes filter outer positions.
/// One output block per input block (possibly empty).
class SetOpNonCorrelated : public PositionOperator {
  public:
    SetOpNonCorrelated(std::unique_ptr<PositionOperator> outer, ExprPtr probe,
                       SetPredicateOp op, InnerSubplan sub, ExecStats* stats);

    void open() override;
    std::optional<PositionBlock> next_block() override;
    void close() override;

    const Digest& digest();  // builds on first use

  private:
    std::unique_ptr<PositionOperator> outer_;
    ExprPtr probe_;
    SetPredicateOp op_;
    InnerSubplan sub_;
    std::optional<Digest> digest_;
    ExecStats* stats_;
};

/// Per-correlation-key digest cache (unbounded; key spaces in scope
/// are small).
class CorrMemoCache {
  public:
    const Digest* find(const std::string& key) const;
    const Digest& put(const std::string& key, Digest d);
    size_t size() const { return cache_.size(); }

  private:
    std::unordered_map<std::string, Digest> cache_;
};

/// Positional SetOp for a correlated inner query: rebinds and decides
/// per outer row. With early_exit, SOME-form scans stop at the first
/// witness; with memoize, each distinct correlation key is evaluated
/// once (memoize takes precedence: keys are digested by a full scan so
/// cached digests stay complete).
class SetOpCorrelated : public PositionOperator {
  public:
    SetOpCorrelated(std::unique_ptr<PositionOperator> outer, ExprPtr probe,
                    SetPredicateOp op, InnerSubplan sub, SetOpFlags flags, ExecStats* stats);

    void open() override;
    std::optional<PositionBlock> next_block() override;
    void close() override;

    const CorrMemoCache& memo() const { return memo_; }

  private:
    bool decide_row(const Binding& binding, const Scalar& probe);

    std::unique_ptr<PositionOperator> outer_;
    ExprPtr probe_;
    SetPredicateOp op_;
    InnerSubplan sub_;
    SetOpFlags flags_;
    std::vector<std::string> params_;
    CorrMemoCache memo_;
    ExecStats* stats_;
};

/// Evaluates `probe OP inner` for both rewrite branches of a compound
/// subquery per outer row and combines with the connective; the pure-NC
/// branch is decided against a digest built once, the other branch is
/// evaluated for every outer row (no short-circuit).
class SetOpCompound : public PositionOperator {
  public:
    SetOpCompound(std::unique_ptr<PositionOperator> outer, ExprPtr probe, SetPredicateOp op,
                  InnerSubplan ncBranch, InnerSubplan otherBranch, LogicOp connective,
                  SetOpFlags flags, ExecStats* stats);

    void open() override;
    std::optional<PositionBlock> next_block() override;
    void close() override;

  private:
    std::unique_ptr<PositionOperator> outer_;
    ExprPtr probe_;
    SetPredicateOp op_;
    InnerSubplan nc_;
    InnerSubplan other_;
    LogicOp connective_;
    SetOpFlags flags_;
    std::vector<std::string> params_;
    std::optional<Digest> nc_digest_;
    CorrMemoCache memo_;
    ExecStats* stats_;
};

/// AND-rewrite evaluation: the inner table is filtered by the NC
/// predicate once, and the correlated predicate runs only over the
/// surviving rows (their needed columns are gathered up front).
class PrefilterSetOp : public PositionOperator {
  public:
    PrefilterSetOp(std::unique_ptr<PositionOperator> outer, ExprPtr probe, SetPredicateOp op,
                   const ColumnTable& inner, ExprPtr innerValue, ExprPtr ncPred, ExprPtr cPred,
                   size_t capacity, SetOpFlags flags, ExecStats* stats);

    void open() override;
    std::optional<PositionBlock> next_block() override;
    void close() override;

    size_t prefiltered_count();  // forces the prefilter pass

  private:
    void ensure_prefiltered();
    bool decide_row(const Binding& binding, const Scalar& probe);

    std::unique_ptr<PositionOperator> outer_;
    ExprPtr probe_;
    SetPredicateOp op_;
    const ColumnTable* inner_;
    ExprPtr value_;
    ExprPtr nc_pred_;
    ExprPtr c_pred_;
    size_t capacity_;
    SetOpFlags flags_;
    std::vector<std::string> params_;
    bool prefiltered_ = false;
    PositionBlock kept_;  // NC-passing inner positions
    CorrMemoCache memo_;
    ExecStats* stats_;
};

/// A block of materialized value tuples plus the positions they came
/// from; the tuple-side intermediate after late materialization.
struct TupleBlock {
    PositionBlock positions;
    std::vector<VecValues> columns;

    size_t size() const { return positions.size(); }
};

/// Converts positions into value tuples via the given readers.
class Materialize {
  public:
    Materialize(std::unique_ptr<PositionOperator> child, const ColumnTable& table,
                std::vector<std::string> columns, ExecStats* stats);

    void open();
    std::optional<TupleBlock> next_block();
    void close();

    const std::vector<std::string>& columns() const { return columns_; }

  private:
    std::unique_ptr<PositionOperator> child_;
    const ColumnTable* table_;
    std::vector<std::string> columns_;
    std::vector<Reader> readers_;
    ExecStats* stats_;
};

/// Shared helper: probe values and per-row bindings for an outer block.
struct OuterRowView {
    VecValues probes;
    std::vector<VecValues> param_values;  // one per correlation parameter

    static OuterRowView make(const PositionBlock& block, const Expr& probe,
                             std::span<const std::string> params);
    Binding binding_at(std::span<const std::string> params, size_t i) const;
};

}  // namespace lpq
