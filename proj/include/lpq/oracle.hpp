#pragma once

#include "lpq/query.hpp"

namespace lpq {

struct OracleResult {
    std::vector<RowPos> positions;          // passing outer positions, ascending
    std::vector<std::vector<Scalar>> rows;  // output tuples in position order
};

/// Ground-truth evaluation of the original, un-rewritten query: a
/// doubly nested row-at-a-time loop with no blocks, positions, caches
/// or early exits. Deliberately shares no evaluation code with the
/// operator pipeline so that agreement between the two is meaningful.
OracleResult oracle_eval(const SubqueryQuery& q, const Catalog& catalog);

}  // namespace lpq
