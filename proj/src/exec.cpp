#include "lpq/exec.hpp"

#include <algorithm>
#include <numeric>

namespace lpq {

const char* to_string(SetPredicateOp op) {
    switch (op) {
        case SetPredicateOp::In: return "in";
        case SetPredicateOp::LtSome: return "lt_some";
        case SetPredicateOp::GtSome: return "gt_some";
        case SetPredicateOp::LtAll: return "lt_all";
        case SetPredicateOp::GtAll: return "gt_all";
    }
    return "?";
}

SetPredicateOp set_predicate_op_from_string(std::string_view s) {
    if (s == "in") return SetPredicateOp::In;
    if (s == "lt_some") return SetPredicateOp::LtSome;
    if (s == "gt_some") return SetPredicateOp::GtSome;
    if (s == "lt_all") return SetPredicateOp::LtAll;
    if (s == "gt_all") return SetPredicateOp::GtAll;
    raise(ErrorKind::Planning, "unknown set predicate operator: " + std::string(s));
}

bool set_predicate(SetPredicateOp op, const Scalar& probe, std::span<const Scalar> values) {
    switch (op) {
        case SetPredicateOp::In:
            return std::any_of(values.begin(), values.end(),
                               [&](const Scalar& v) { return compare(probe, v) == 0; });
        case SetPredicateOp::LtSome:
            return std::any_of(values.begin(), values.end(),
                               [&](const Scalar& v) { return compare(probe, v) < 0; });
        case SetPredicateOp::GtSome:
            return std::any_of(values.begin(), values.end(),
                               [&](const Scalar& v) { return compare(probe, v) > 0; });
        case SetPredicateOp::LtAll:
            return std::all_of(values.begin(), values.end(),
                               [&](const Scalar& v) { return compare(probe, v) < 0; });
        case SetPredicateOp::GtAll:
            return std::all_of(values.begin(), values.end(),
                               [&](const Scalar& v) { return compare(probe, v) > 0; });
    }
    return false;
}

void Digest::add(const Scalar& v) {
    count_++;
    switch (op_) {
        case SetPredicateOp::In:
            members_.insert(v);
            return;
        case SetPredicateOp::LtSome:
        case SetPredicateOp::GtAll:
            if (!extreme_ || compare(v, *extreme_) > 0) extreme_ = v;  // max
            return;
        case SetPredicateOp::GtSome:
        case SetPredicateOp::LtAll:
            if (!extreme_ || compare(v, *extreme_) < 0) extreme_ = v;  // min
            return;
    }
}

bool Digest::decide(const Scalar& probe) const {
    switch (op_) {
        case SetPredicateOp::In: return members_.count(probe) > 0;
        case SetPredicateOp::LtSome: return extreme_ && compare(probe, *extreme_) < 0;
        case SetPredicateOp::GtSome: return extreme_ && compare(probe, *extreme_) > 0;
        case SetPredicateOp::LtAll: return !extreme_ || compare(probe, *extreme_) < 0;
        case SetPredicateOp::GtAll: return !extreme_ || compare(probe, *extreme_) > 0;
    }
    return false;
}

uint64_t ExecStats::total_positions_emitted() const {
    uint64_t n = 0;
    for (const auto& [_, v] : positions_emitted) n += v;
    return n;
}

// ------------------------------------------------------------ datasource

Datasource::Datasource(const ColumnTable& table, size_t capacity, ExecStats* stats)
    : table_(&table), capacity_(capacity), stats_(stats) {
    if (capacity_ < 1)
        raise(ErrorKind::Usage, "block capacity must be at least 1");
}

void Datasource::open() { cursor_ = 0; }

std::optional<PositionBlock> Datasource::next_block() {
    if (cursor_ >= table_->row_count()) return std::nullopt;
    size_t n = std::min(capacity_, table_->row_count() - cursor_);
    PositionBlock b{table_, std::vector<RowPos>(n)};
    std::iota(b.positions.begin(), b.positions.end(), static_cast<RowPos>(cursor_));
    cursor_ += n;
    if (stats_) stats_->note_emitted("datasource(" + table_->name() + ")", n);
    return b;
}

// ------------------------------------------------------------- posfilter

PosFilter::PosFilter(std::unique_ptr<PositionOperator> child, ExprPtr pred, std::string name,
                     ExecStats* stats)
    : child_(std::move(child)), pred_(std::move(pred)), name_(std::move(name)), stats_(stats) {
    if (pred_->correlated())
        raise(ErrorKind::Planning, "positional filter predicate must be non-correlated");
}

void PosFilter::open() { child_->open(); }
void PosFilter::close() { child_->close(); }

std::optional<PositionBlock> PosFilter::next_block() {
    auto in = child_->next_block();
    if (!in) return std::nullopt;
    VecValues pass = eval_block(*pred_, *in, nullptr);
    PositionBlock out{in->table, {}};
    out.positions.reserve(in->size());
    for (size_t i = 0; i < in->size(); ++i)
        if (pass.bools[i]) out.positions.push_back(in->positions[i]);
    if (stats_) stats_->note_emitted(name_, out.size());
    return out;
}

// ---------------------------------------------------------- innersubplan

InnerSubplan::InnerSubplan(const ColumnTable& inner, ExprPtr value, ExprPtr pred,
                           size_t blockCapacity)
    : inner_(&inner), value_(std::move(value)), pred_(std::move(pred)),
      capacity_(blockCapacity) {}

namespace {

/// Iterates the inner table in storage order as ascending blocks,
/// invoking fn(selectedBlock) for predicate-passing positions.
template <typename F>
void scan_selected(const ColumnTable& table, const Expr& pred, size_t capacity,
                   const Binding* binding, ExecStats* stats, F fn) {
    size_t rows = table.row_count();
    for (size_t start = 0; start < rows; start += capacity) {
        size_t n = std::min(capacity, rows - start);
        PositionBlock block{&table, std::vector<RowPos>(n)};
        std::iota(block.positions.begin(), block.positions.end(), static_cast<RowPos>(start));
        VecValues pass = eval_block(pred, block, binding);
        if (stats) stats->inner_rows_scanned += n;
        PositionBlock sel{&table, {}};
        for (size_t i = 0; i < n; ++i)
            if (pass.bools[i]) sel.positions.push_back(block.positions[i]);
        if (!sel.empty()) fn(sel);
    }
}

}  // namespace

std::vector<Scalar> InnerSubplan::evaluate_multiset(const Binding* binding,
                                                    ExecStats* stats) const {
    if (pred_->correlated() && !binding)
        raise(ErrorKind::Execution, "correlated inner query evaluated without a binding");
    std::vector<Scalar> out;
    scan_selected(*inner_, *pred_, capacity_, binding, stats, [&](const PositionBlock& sel) {
        VecValues vals = eval_block(*value_, sel, binding);
        for (size_t i = 0; i < vals.size(); ++i) out.push_back(vals.scalar_at(i));
    });
    return out;
}

Digest InnerSubplan::build_digest(SetPredicateOp op, const Binding* binding,
                                  ExecStats* stats) const {
    if (pred_->correlated() && !binding)
        raise(ErrorKind::Execution, "correlated inner query evaluated without a binding");
    Digest d(op);
    scan_selected(*inner_, *pred_, capacity_, binding, stats, [&](const PositionBlock& sel) {
        VecValues vals = eval_block(*value_, sel, binding);
        for (size_t i = 0; i < vals.size(); ++i) d.add(vals.scalar_at(i));
    });
    return d;
}

bool InnerSubplan::exists_witness(SetPredicateOp op, const Scalar& probe, const Binding* binding,
                                  ExecStats* stats) const {
    if (!is_existential(op))
        raise(ErrorKind::Invariant, "witness scan requires an existential set predicate");
    size_t rows = inner_->row_count();
    for (size_t r = 0; r < rows; ++r) {
        if (stats) stats->inner_rows_scanned++;
        if (!eval_row_bool(*pred_, *inner_, static_cast<RowPos>(r), binding)) continue;
        Scalar v = eval_row(*value_, *inner_, static_cast<RowPos>(r), binding);
        int c = compare(probe, v);
        if ((op == SetPredicateOp::In && c == 0) || (op == SetPredicateOp::LtSome && c < 0) ||
            (op == SetPredicateOp::GtSome && c > 0))
            return true;
    }
    return false;
}

// ---------------------------------------------------------- outerrowview

OuterRowView OuterRowView::make(const PositionBlock& block, const Expr& probe,
                                std::span<const std::string> params) {
    OuterRowView v;
    v.probes = eval_block(probe, block, nullptr);
    v.param_values.reserve(params.size());
    for (const auto& p : params) {
        Expr::CorrParam cp{p};
        auto colExpr = Expr::col(cp.column());
        v.param_values.push_back(eval_block(*colExpr, block, nullptr));
    }
    return v;
}

Binding OuterRowView::binding_at(std::span<const std::string> params, size_t i) const {
    Binding b;
    for (size_t j = 0; j < params.size(); ++j) b.set(params[j], param_values[j].scalar_at(i));
    return b;
}

// ------------------------------------------------- shared correlated path

namespace {

bool decide_correlated(const InnerSubplan& sub, SetPredicateOp op, const Scalar& probe,
                       const Binding& binding, SetOpFlags flags, CorrMemoCache& memo,
                       ExecStats* stats) {
    if (flags.memoize) {
        std::string key = binding.key();
        if (const Digest* hit = memo.find(key)) return hit->decide(probe);
        if (stats) stats->inner_invocations++;
        const Digest& d = memo.put(key, sub.build_digest(op, &binding, stats));
        return d.decide(probe);
    }
    if (stats) stats->inner_invocations++;
    if (flags.early_exit && is_existential(op))
        return sub.exists_witness(op, probe, &binding, stats);
    return sub.build_digest(op, &binding, stats).decide(probe);
}

}  // namespace

const Digest* CorrMemoCache::find(const std::string& key) const {
    auto it = cache_.find(key);
    return it == cache_.end() ? nullptr : &it->second;
}

const Digest& CorrMemoCache::put(const std::string& key, Digest d) {
    return cache_.insert_or_assign(key, std::move(d)).first->second;
}

// ---------------------------------------------------- setop noncorrelated

SetOpNonCorrelated::SetOpNonCorrelated(std::unique_ptr<PositionOperator> outer, ExprPtr probe,
                                       SetPredicateOp op, InnerSubplan sub, ExecStats* stats)
    : outer_(std::move(outer)), probe_(std::move(probe)), op_(op), sub_(std::move(sub)),
      stats_(stats) {
    if (sub_.correlated())
        raise(ErrorKind::Planning, "non-correlated SetOp got a correlated inner query");
}

void SetOpNonCorrelated::open() { outer_->open(); }
void SetOpNonCorrelated::close() { outer_->close(); }

const Digest& SetOpNonCorrelated::digest() {
    if (!digest_) {
        if (stats_) stats_->nc_digest_builds++;
        digest_ = sub_.build_digest(op_, nullptr, stats_);
    }
    return *digest_;
}

std::optional<PositionBlock> SetOpNonCorrelated::next_block() {
    auto in = outer_->next_block();
    if (!in) return std::nullopt;
    const Digest& d = digest();
    VecValues probes = eval_block(*probe_, *in, nullptr);
    PositionBlock out{in->table, {}};
    out.positions.reserve(in->size());
    for (size_t i = 0; i < in->size(); ++i)
        if (d.decide(probes.scalar_at(i))) out.positions.push_back(in->positions[i]);
    if (stats_) stats_->note_emitted("setop_nc", out.size());
    return out;
}

// ------------------------------------------------------- setop correlated

SetOpCorrelated::SetOpCorrelated(std::unique_ptr<PositionOperator> outer, ExprPtr probe,
                                 SetPredicateOp op, InnerSubplan sub, SetOpFlags flags,
                                 ExecStats* stats)
    : outer_(std::move(outer)), probe_(std::move(probe)), op_(op), sub_(std::move(sub)),
      flags_(flags), params_(collect_corr_params(*sub_.pred())), stats_(stats) {
    if (!sub_.correlated())
        raise(ErrorKind::Planning, "correlated SetOp got a non-correlated inner query");
}

void SetOpCorrelated::open() { outer_->open(); }
void SetOpCorrelated::close() { outer_->close(); }

bool SetOpCorrelated::decide_row(const Binding& binding, const Scalar& probe) {
    return decide_correlated(sub_, op_, probe, binding, flags_, memo_, stats_);
}

std::optional<PositionBlock> SetOpCorrelated::next_block() {
    auto in = outer_->next_block();
    if (!in) return std::nullopt;
    OuterRowView view = OuterRowView::make(*in, *probe_, params_);
    PositionBlock out{in->table, {}};
    out.positions.reserve(in->size());
    for (size_t i = 0; i < in->size(); ++i) {
        Binding b = view.binding_at(params_, i);
        if (decide_row(b, view.probes.scalar_at(i))) out.positions.push_back(in->positions[i]);
    }
    if (stats_) stats_->note_emitted("setop_corr", out.size());
    return out;
}

// --------------------------------------------------------- setop compound

SetOpCompound::SetOpCompound(std::unique_ptr<PositionOperator> outer, ExprPtr probe,
                             SetPredicateOp op, InnerSubplan ncBranch, InnerSubplan otherBranch,
                             LogicOp connective, SetOpFlags flags, ExecStats* stats)
    : outer_(std::move(outer)), probe_(std::move(probe)), op_(op), nc_(std::move(ncBranch)),
      other_(std::move(otherBranch)), connective_(connective), flags_(flags),
      params_(collect_corr_params(*other_.pred())), stats_(stats) {
    if (nc_.correlated())
        raise(ErrorKind::Planning, "compound SetOp: the cached branch must be non-correlated");
}

void SetOpCompound::open() { outer_->open(); }
void SetOpCompound::close() { outer_->close(); }

std::optional<PositionBlock> SetOpCompound::next_block() {
    auto in = outer_->next_block();
    if (!in) return std::nullopt;
    if (!nc_digest_) {
        if (stats_) stats_->nc_digest_builds++;
        nc_digest_ = nc_.build_digest(op_, nullptr, stats_);
    }
    OuterRowView view = OuterRowView::make(*in, *probe_, params_);
    PositionBlock out{in->table, {}};
    out.positions.reserve(in->size());
    for (size_t i = 0; i < in->size(); ++i) {
        Scalar probe = view.probes.scalar_at(i);
        bool ncPass = nc_digest_->decide(probe);
        Binding b = view.binding_at(params_, i);
        bool otherPass = decide_correlated(other_, op_, probe, b, flags_, memo_, stats_);
        bool pass = connective_ == LogicOp::Or ? (ncPass || otherPass) : (ncPass && otherPass);
        if (pass) out.positions.push_back(in->positions[i]);
    }
    if (stats_) stats_->note_emitted("setop_compound", out.size());
    return out;
}

// -------------------------------------------------------------- prefilter

PrefilterSetOp::PrefilterSetOp(std::unique_ptr<PositionOperator> outer, ExprPtr probe,
                               SetPredicateOp op, const ColumnTable& inner, ExprPtr innerValue,
                               ExprPtr ncPred, ExprPtr cPred, size_t capacity, SetOpFlags flags,
                               ExecStats* stats)
    : outer_(std::move(outer)), probe_(std::move(probe)), op_(op), inner_(&inner),
      value_(std::move(innerValue)), nc_pred_(std::move(ncPred)), c_pred_(std::move(cPred)),
      capacity_(capacity), flags_(flags), params_(collect_corr_params(*c_pred_)),
      stats_(stats) {
    if (nc_pred_->correlated())
        raise(ErrorKind::Planning, "prefilter predicate must be non-correlated");
    if (!c_pred_->correlated())
        raise(ErrorKind::Planning, "prefiltered SetOp needs a correlated predicate");
}

void PrefilterSetOp::open() { outer_->open(); }
void PrefilterSetOp::close() { outer_->close(); }

void PrefilterSetOp::ensure_prefiltered() {
    if (prefiltered_) return;
    prefiltered_ = true;
    kept_ = PositionBlock{inner_, {}};
    scan_selected(*inner_, *nc_pred_, capacity_, nullptr, stats_, [&](const PositionBlock& sel) {
        kept_.positions.insert(kept_.positions.end(), sel.positions.begin(),
                               sel.positions.end());
    });
}

size_t PrefilterSetOp::prefiltered_count() {
    ensure_prefiltered();
    return kept_.size();
}

bool PrefilterSetOp::decide_row(const Binding& binding, const Scalar& probe) {
    auto scan_digest = [&]() {
        Digest d(op_);
        for (size_t start = 0; start < kept_.size(); start += capacity_) {
            size_t n = std::min(capacity_, kept_.size() - start);
            PositionBlock slice{inner_, std::vector<RowPos>(kept_.positions.begin() + start,
                                                            kept_.positions.begin() + start + n)};
            VecValues pass = eval_block(*c_pred_, slice, &binding);
            if (stats_) stats_->inner_rows_scanned += n;
            PositionBlock sel{inner_, {}};
            for (size_t i = 0; i < n; ++i)
                if (pass.bools[i]) sel.positions.push_back(slice.positions[i]);
            if (!sel.empty()) {
                VecValues vals = eval_block(*value_, sel, &binding);
                for (size_t i = 0; i < vals.size(); ++i) d.add(vals.scalar_at(i));
            }
        }
        return d;
    };

    if (flags_.memoize) {
        std::string key = binding.key();
        if (const Digest* hit = memo_.find(key)) return hit->decide(probe);
        if (stats_) stats_->inner_invocations++;
        const Digest& d = memo_.put(key, scan_digest());
        return d.decide(probe);
    }
    if (stats_) stats_->inner_invocations++;
    if (flags_.early_exit && is_existential(op_)) {
        for (RowPos p : kept_.positions) {
            if (stats_) stats_->inner_rows_scanned++;
            if (!eval_row_bool(*c_pred_, *inner_, p, &binding)) continue;
            Scalar v = eval_row(*value_, *inner_, p, &binding);
            int c = compare(probe, v);
            if ((op_ == SetPredicateOp::In && c == 0) ||
                (op_ == SetPredicateOp::LtSome && c < 0) ||
                (op_ == SetPredicateOp::GtSome && c > 0))
                return true;
        }
        return false;
    }
    return scan_digest().decide(probe);
}

std::optional<PositionBlock> PrefilterSetOp::next_block() {
    auto in = outer_->next_block();
    if (!in) return std::nullopt;
    ensure_prefiltered();
    OuterRowView view = OuterRowView::make(*in, *probe_, params_);
    PositionBlock out{in->table, {}};
    out.positions.reserve(in->size());
    for (size_t i = 0; i < in->size(); ++i) {
        Binding b = view.binding_at(params_, i);
        if (decide_row(b, view.probes.scalar_at(i))) out.positions.push_back(in->positions[i]);
    }
    if (stats_) stats_->note_emitted("setop_prefilter", out.size());
    return out;
}

// ------------------------------------------------------------ materialize

Materialize::Materialize(std::unique_ptr<PositionOperator> child, const ColumnTable& table,
                         std::vector<std::string> columns, ExecStats* stats)
    : child_(std::move(child)), table_(&table), columns_(std::move(columns)), stats_(stats) {
    readers_.reserve(columns_.size());
    for (const auto& c : columns_) readers_.emplace_back(table, c);
}

void Materialize::open() { child_->open(); }
void Materialize::close() { child_->close(); }

std::optional<TupleBlock> Materialize::next_block() {
    auto in = child_->next_block();
    if (!in) return std::nullopt;
    if (in->table != table_)
        raise(ErrorKind::Schema, "materialize got a block of an unexpected table");
    TupleBlock out;
    out.columns.reserve(readers_.size());
    for (const auto& r : readers_) {
        VecValues v;
        v.type = expr_type_of(r.column().type());
        switch (v.type) {
            case ExprType::Int64: r.gather(*in, v.i64); break;
            case ExprType::Float64: r.gather(*in, v.f64); break;
            default: r.gather(*in, v.text); break;
        }
        out.columns.push_back(std::move(v));
    }
    out.positions = std::move(*in);
    if (stats_) stats_->note_emitted("materialize", out.size());
    return out;
}

}  // namespace lpq
