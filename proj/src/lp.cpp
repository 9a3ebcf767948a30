#include "lpq/lp.hpp"

#include <algorithm>

namespace lpq {

void Proxy::stage(uint64_t sliceId, PositionBlock block) {
    if (staged_)
        raise(ErrorKind::Invariant, "proxy: staging over an unconsumed slice");
    staged_ = std::move(block);
    staged_id_ = sliceId;
}

std::optional<PositionBlock> Proxy::next_block() {
    if (!staged_)
        raise(ErrorKind::Invariant, "proxy: pulled with no slice staged");
    consumed_ = staged_id_;
    auto out = std::move(*staged_);
    staged_.reset();
    return out;
}

std::vector<RowPos> lp_exclude(std::span<const RowPos> cached, std::span<const RowPos> ncPass) {
    std::vector<RowPos> out;
    out.reserve(cached.size() - std::min(cached.size(), ncPass.size()));
    size_t j = 0;
    for (RowPos p : cached) {
        if (j < ncPass.size() && ncPass[j] == p) {
            j++;
            continue;
        }
        out.push_back(p);
    }
    if (j != ncPass.size())
        raise(ErrorKind::Invariant, "lp_exclude: passing positions are not a subset of the slice");
    return out;
}

LpOperator::LpOperator(std::unique_ptr<Datasource> outer,
                       std::unique_ptr<SetOpNonCorrelated> ncSubplan,
                       std::unique_ptr<SetOpCorrelated> corrSubplan, Proxy* leftProxy,
                       Proxy* rightProxy, ExecStats* stats)
    : outer_(std::move(outer)), nc_subplan_(std::move(ncSubplan)),
      corr_subplan_(std::move(corrSubplan)), left_proxy_(leftProxy), right_proxy_(rightProxy),
      stats_(stats) {}

void LpOperator::open() {
    outer_->open();
    nc_subplan_->open();
    corr_subplan_->open();
    output_.clear();
    exhausted_ = false;
    audit_ = LpAudit{};
}

void LpOperator::close() {
    corr_subplan_->close();
    nc_subplan_->close();
    outer_->close();
}

bool LpOperator::advance_slice() {
    // Modulator: pull one outer block, cache it, forward a copy left.
    auto slice = outer_->next_block();
    if (!slice) return false;
    slice_id_++;
    audit_.slices++;
    audit_.positions_cached += slice->size();
    cached_slice_ = *slice;
    left_proxy_->stage(slice_id_, std::move(*slice));

    // Left subplan filters the slice against the cached NC digest.
    auto ncPass = nc_subplan_->next_block();
    if (!ncPass || left_proxy_->consumed_slice() != slice_id_)
        raise(ErrorKind::Invariant, "lp: left subplan returned a block for an unknown slice");

    // Inverter: release the cached slice as NC passes plus exclusions.
    std::vector<RowPos> excluded = lp_exclude(cached_slice_->positions, ncPass->positions);
    audit_.positions_released += ncPass->size() + excluded.size();

    // Right subplan sees only the excluded positions.
    right_proxy_->stage(slice_id_, PositionBlock{cached_slice_->table, std::move(excluded)});
    auto corrPass = corr_subplan_->next_block();
    if (!corrPass || right_proxy_->consumed_slice() != slice_id_)
        raise(ErrorKind::Invariant, "lp: right subplan returned a block for an unknown slice");
    cached_slice_.reset();

    // Merger: ascending union of the two disjoint result sets.
    PositionBlock merged{ncPass->table, {}};
    merged.positions.resize(ncPass->size() + corrPass->size());
    std::merge(ncPass->positions.begin(), ncPass->positions.end(), corrPass->positions.begin(),
               corrPass->positions.end(), merged.positions.begin());
    if (stats_) stats_->note_emitted("lp", merged.size());
    if (!merged.empty()) output_.push_back(std::move(merged));
    return true;
}

std::optional<PositionBlock> LpOperator::next_block() {
    while (output_.empty()) {
        if (exhausted_) return std::nullopt;
        if (!advance_slice()) exhausted_ = true;
    }
    auto out = std::move(output_.front());
    output_.pop_front();
    return out;
}

}  // namespace lpq
