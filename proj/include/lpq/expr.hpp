#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lpq/table.hpp"

namespace lpq {

enum class ExprType : uint8_t { Int64, Float64, Text, Bool };
const char* to_string(ExprType t);

inline ExprType expr_type_of(ScalarType t) { return static_cast<ExprType>(t); }

enum class CmpOp : uint8_t { Lt, Le, Eq, Ne, Ge, Gt };
enum class ArithOp : uint8_t { Add, Sub, Mul };
enum class LogicOp : uint8_t { And, Or };

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Predicate / value expression tree. A node is `correlated` iff its
/// subtree contains at least one correlation parameter; the flag is
/// computed at construction.
class Expr {
  public:
    struct ColumnRef { std::string name; };
    struct Literal { Scalar value; };
    /// Placeholder bound per outer row; `column()` strips any dotted
    /// qualifier, so `(corr S.salary)` binds the outer column `salary`.
    struct CorrParam {
        std::string name;
        std::string column() const;
    };
    /// The benchmark parameter X; must be substituted before planning.
    struct XParam {};
    struct Arith { ArithOp op; ExprPtr lhs, rhs; };
    struct Cmp { CmpOp op; ExprPtr lhs, rhs; };
    struct Logic { LogicOp op; ExprPtr lhs, rhs; };
    struct Not { ExprPtr child; };

    using Node = std::variant<ColumnRef, Literal, CorrParam, XParam, Arith, Cmp, Logic, Not>;

    explicit Expr(Node node);

    const Node& node() const { return node_; }
    bool correlated() const { return correlated_; }
    bool has_xparam() const { return has_xparam_; }

    // construction helpers
    static ExprPtr col(std::string name);
    static ExprPtr lit(Scalar v);
    static ExprPtr lit_int(int64_t v) { return lit(Scalar::of_int(v)); }
    static ExprPtr lit_float(double v) { return lit(Scalar::of_float(v)); }
    static ExprPtr corr(std::string name);
    static ExprPtr xparam();
    static ExprPtr arith(ArithOp op, ExprPtr l, ExprPtr r);
    static ExprPtr cmp(CmpOp op, ExprPtr l, ExprPtr r);
    static ExprPtr logic(LogicOp op, ExprPtr l, ExprPtr r);
    static ExprPtr negate(ExprPtr c);

  private:
    Node node_;
    bool correlated_ = false;
    bool has_xparam_ = false;
};

/// Parses the prefix notation, e.g. `(< (col salary) (corr S.salary))`.
/// Unknown operators and malformed forms raise a Planning error.
ExprPtr parse_expr(std::string_view text);

/// Canonical prefix form; parse_expr(print_expr(e)) reproduces e.
std::string print_expr(const Expr& e);

/// Replaces every (xparam) with an int64 literal.
ExprPtr substitute_x(const ExprPtr& e, int64_t x);

/// Distinct correlation parameter names in first-occurrence order.
std::vector<std::string> collect_corr_params(const Expr& e);

/// Type-checks against `table`; correlation parameters resolve against
/// `outer` (null means they are not allowed here). XParam nodes are
/// rejected: substitute first.
ExprType type_check(const Expr& e, const ColumnTable& table, const ColumnTable* outer);

/// Per-row binding of correlation parameters.
class Binding {
  public:
    void set(const std::string& param, Scalar v);
    const Scalar& get(const std::string& param) const;  // Execution error if unbound
    /// Stable serialization of the bound tuple, usable as a cache key.
    std::string key() const;
    size_t size() const { return entries_.size(); }

  private:
    std::vector<std::pair<std::string, Scalar>> entries_;
};

/// Columnar evaluation result: exactly one of the vectors is active,
/// selected by `type`.
struct VecValues {
    ExprType type = ExprType::Bool;
    std::vector<int64_t> i64;
    std::vector<double> f64;
    std::vector<std::string> text;
    std::vector<uint8_t> bools;

    size_t size() const;
    Scalar scalar_at(size_t i) const;
};

/// Evaluates `e` for every position of `block` (column-at-a-time).
VecValues eval_block(const Expr& e, const PositionBlock& block, const Binding* binding);

/// Row-at-a-time evaluation, used by early-exit scans.
Scalar eval_row(const Expr& e, const ColumnTable& table, RowPos row, const Binding* binding);
bool eval_row_bool(const Expr& e, const ColumnTable& table, RowPos row, const Binding* binding);

/// Node count; the default per-row cost proxy for predicates.
double expression_cost(const Expr& e);

}  // namespace lpq
