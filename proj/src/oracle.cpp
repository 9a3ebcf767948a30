#include "lpq/oracle.hpp"

namespace lpq {

namespace {

// A self-contained recursive walker. Correlation parameters are looked
// up straight from the current outer row.
Scalar walk(const Expr& e, const ColumnTable& table, RowPos row, const ColumnTable* outer,
            RowPos outerRow) {
    return std::visit(
        [&](const auto& n) -> Scalar {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Expr::ColumnRef>) {
                return table.column(n.name).at(row);
            } else if constexpr (std::is_same_v<T, Expr::Literal>) {
                return n.value;
            } else if constexpr (std::is_same_v<T, Expr::CorrParam>) {
                if (!outer)
                    raise(ErrorKind::Execution,
                          "oracle: correlation parameter outside a correlated context");
                return outer->column(n.column()).at(outerRow);
            } else if constexpr (std::is_same_v<T, Expr::XParam>) {
                raise(ErrorKind::Planning, "oracle: x parameter must be substituted first");
            } else if constexpr (std::is_same_v<T, Expr::Arith>) {
                Scalar l = walk(*n.lhs, table, row, outer, outerRow);
                Scalar r = walk(*n.rhs, table, row, outer, outerRow);
                if (l.type() == ScalarType::Int64) {
                    switch (n.op) {
                        case ArithOp::Add: return Scalar::of_int(l.as_int() + r.as_int());
                        case ArithOp::Sub: return Scalar::of_int(l.as_int() - r.as_int());
                        case ArithOp::Mul: return Scalar::of_int(l.as_int() * r.as_int());
                    }
                }
                switch (n.op) {
                    case ArithOp::Add: return Scalar::of_float(l.as_float() + r.as_float());
                    case ArithOp::Sub: return Scalar::of_float(l.as_float() - r.as_float());
                    case ArithOp::Mul: return Scalar::of_float(l.as_float() * r.as_float());
                }
                raise(ErrorKind::Invariant, "oracle: bad arith op");
            } else if constexpr (std::is_same_v<T, Expr::Cmp>) {
                int c = compare(walk(*n.lhs, table, row, outer, outerRow),
                                walk(*n.rhs, table, row, outer, outerRow));
                bool pass = false;
                switch (n.op) {
                    case CmpOp::Lt: pass = c < 0; break;
                    case CmpOp::Le: pass = c <= 0; break;
                    case CmpOp::Eq: pass = c == 0; break;
                    case CmpOp::Ne: pass = c != 0; break;
                    case CmpOp::Ge: pass = c >= 0; break;
                    case CmpOp::Gt: pass = c > 0; break;
                }
                return Scalar::of_int(pass ? 1 : 0);
            } else if constexpr (std::is_same_v<T, Expr::Logic>) {
                bool l = walk(*n.lhs, table, row, outer, outerRow).as_int() != 0;
                bool r = walk(*n.rhs, table, row, outer, outerRow).as_int() != 0;
                return Scalar::of_int((n.op == LogicOp::And ? (l && r) : (l || r)) ? 1 : 0);
            } else {
                bool c = walk(*n.child, table, row, outer, outerRow).as_int() != 0;
                return Scalar::of_int(c ? 0 : 1);
            }
        },
        e.node());
}

}  // namespace

OracleResult oracle_eval(const SubqueryQuery& q, const Catalog& catalog) {
    classify(q);
    const ColumnTable& outer = catalog.get(q.outer_table);
    const ColumnTable& inner = catalog.get(q.inner_table);
    ExprPtr compound = q.compound_pred();

    OracleResult result;
    for (size_t o = 0; o < outer.row_count(); ++o) {
        auto outerRow = static_cast<RowPos>(o);
        Scalar probe = walk(*q.probe, outer, outerRow, nullptr, 0);

        // Full inner multiset for this outer row, no shortcuts.
        std::vector<Scalar> values;
        for (size_t i = 0; i < inner.row_count(); ++i) {
            auto innerRow = static_cast<RowPos>(i);
            if (walk(*compound, inner, innerRow, &outer, outerRow).as_int() != 0)
                values.push_back(walk(*q.inner_value, inner, innerRow, &outer, outerRow));
        }

        if (set_predicate(q.set_op, probe, values)) {
            result.positions.push_back(outerRow);
            std::vector<Scalar> rowOut;
            rowOut.reserve(q.output_columns.size());
            for (const auto& c : q.output_columns) rowOut.push_back(outer.column(c).at(outerRow));
            result.rows.push_back(std::move(rowOut));
        }
    }
    return result;
}

}  // namespace lpq
