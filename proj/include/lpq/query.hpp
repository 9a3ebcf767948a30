#pragma once

#include <filesystem>
#include <map>
#include <variant>

#include "lpq/exec.hpp"

namespace lpq {

enum class Connective : uint8_t { And, Or };
const char* to_string(Connective c);

/// Catalog of loaded tables, owning their storage.
class Catalog {
  public:
    void add(ColumnTable table);
    bool has(const std::string& name) const { return tables_.count(name) > 0; }
    const ColumnTable& get(const std::string& name) const;  // Schema error if missing

  private:
    std::map<std::string, ColumnTable> tables_;
};

/// IR of one outer query with one compound-predicate subquery:
///
///   SELECT outputColumns FROM outerTable
///   WHERE probe OP (SELECT innerValue FROM innerTable
///                   WHERE ncPred <connective> cPred)
///
/// ncPred carries no correlation parameters, cPred at least one. The
/// (OP, connective) pair determines the query class:
/// (IN,AND)=1 (IN,OR)=2 (<SOME,AND)=3 (<SOME,OR)=4.
struct SubqueryQuery {
    std::string outer_table;
    std::vector<std::string> output_columns;
    ExprPtr probe;
    SetPredicateOp set_op = SetPredicateOp::In;  // In | LtSome exposed here
    std::string inner_table;
    ExprPtr inner_value;
    ExprPtr nc_pred;
    ExprPtr c_pred;
    Connective connective = Connective::Or;

    /// The original compound inner predicate, `nc <connective> c`.
    ExprPtr compound_pred() const;
    bool has_xparam() const;
};

/// Structural class id 1..4; Planning error when the IR invariants do
/// not hold (correlated ncPred, non-correlated cPred, unsupported OP).
int classify(const SubqueryQuery& q);

/// Type-checks every part against the catalog (Schema/Type errors),
/// including probe-vs-inner-value type agreement for the set predicate.
void validate_query(const SubqueryQuery& q, const Catalog& catalog);

/// Replaces (xparam) everywhere; required before validate/plan if the
/// query carries the parameter.
SubqueryQuery substitute_x(const SubqueryQuery& q, int64_t x);

/// One branch of a rewritten query; probe and OP stay with the parent.
struct SubqueryBranch {
    std::string inner_table;
    ExprPtr inner_value;
    ExprPtr pred;
};

/// AND classes: `probe OP (WHERE nc)  AND  probe OP (WHERE nc AND c)`.
/// The NC predicate is duplicated into the combined branch; dropping it
/// there is unsound.
struct AndForm {
    SubqueryBranch nc_only;
    SubqueryBranch combined;
};

/// OR classes: `probe OP (WHERE nc)  OR  probe OP (WHERE c)`.
struct OrForm {
    SubqueryBranch nc_branch;
    SubqueryBranch c_branch;
};

using RewrittenQuery = std::variant<AndForm, OrForm>;

RewrittenQuery rewrite(const SubqueryQuery& q);

/// Key-value query document with prefix-notation expressions; see the
/// README for the grammar. Unknown keys and operators are rejected.
SubqueryQuery load_query_file(const std::filesystem::path& path);
SubqueryQuery parse_query_text(std::string_view text);
std::string query_to_text(const SubqueryQuery& q);

}  // namespace lpq
