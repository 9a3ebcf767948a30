#pragma once

// Shared helpers for the unit and acceptance suites: seeded random
// tables, random class-1..4 query instances, and plain reference
// evaluations kept independent of the operator pipeline.

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "lpq/oracle.hpp"
#include "lpq/plan.hpp"

namespace lpqtest {

using namespace lpq;

struct TestRng {
    explicit TestRng(uint64_t seed) : eng(seed) {}

    int64_t range(int64_t lo, int64_t hi) {  // inclusive
        return std::uniform_int_distribution<int64_t>(lo, hi)(eng);
    }
    double real(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(eng);
    }
    bool chance(double p) { return real(0.0, 1.0) < p; }

    template <typename T>
    const T& pick(const std::vector<T>& v) {
        return v[static_cast<size_t>(range(0, static_cast<int64_t>(v.size()) - 1))];
    }

    std::mt19937_64 eng;
};

inline const std::vector<std::string>& vocab() {
    static const std::vector<std::string> words = {"ash",  "birch", "cedar", "elm",
                                                   "fir",  "hazel", "oak",   "pine",
                                                   "teak", "yew"};
    return words;
}

struct Instance {
    Catalog catalog;
    SubqueryQuery query;
};

enum class ValueMode { Int, Float, Text };

inline ColumnTable make_outer(TestRng& rng, size_t n, int64_t keyDomain) {
    std::vector<int64_t> id(n), probeI(n), key(n);
    std::vector<double> probeF(n);
    std::vector<std::string> name(n);
    for (size_t i = 0; i < n; ++i) {
        id[i] = static_cast<int64_t>(i) + 1;
        probeI[i] = rng.range(0, 100);
        probeF[i] = rng.real(0.0, 100.0);
        key[i] = rng.range(1, keyDomain);
        name[i] = rng.pick(vocab());
    }
    return ColumnTable("s", {Column("id", std::move(id)), Column("probe_i", std::move(probeI)),
                             Column("probe_f", std::move(probeF)), Column("key", std::move(key)),
                             Column("name", std::move(name))});
}

inline ColumnTable make_inner(TestRng& rng, size_t m, int64_t keyDomain) {
    std::vector<int64_t> valI(m), cat(m), grp(m);
    std::vector<double> valF(m);
    std::vector<std::string> word(m);
    for (size_t i = 0; i < m; ++i) {
        valI[i] = rng.range(0, 100);
        valF[i] = rng.real(0.0, 100.0);
        cat[i] = rng.range(1, keyDomain);
        grp[i] = rng.range(0, 4);
        word[i] = rng.pick(vocab());
    }
    return ColumnTable("e", {Column("val_i", std::move(valI)), Column("val_f", std::move(valF)),
                             Column("cat", std::move(cat)), Column("grp", std::move(grp)),
                             Column("word", std::move(word))});
}

inline ExprPtr random_cmp(TestRng& rng, const std::string& col, int64_t lo, int64_t hi) {
    static const std::vector<CmpOp> ops = {CmpOp::Lt, CmpOp::Le, CmpOp::Eq,
                                           CmpOp::Ne, CmpOp::Ge, CmpOp::Gt};
    return Expr::cmp(rng.pick(ops), Expr::col(col), Expr::lit_int(rng.range(lo, hi)));
}

inline ExprPtr random_nc_pred(TestRng& rng) {
    // mostly simple comparisons on grp, sometimes compounds or constants
    double roll = rng.real(0.0, 1.0);
    if (roll < 0.10) return Expr::cmp(CmpOp::Lt, Expr::lit_int(0), Expr::lit_int(1));  // true
    if (roll < 0.18) return Expr::cmp(CmpOp::Gt, Expr::lit_int(0), Expr::lit_int(1));  // false
    if (roll < 0.70) return random_cmp(rng, "grp", -1, 5);
    if (roll < 0.85)
        return Expr::logic(LogicOp::And, random_cmp(rng, "grp", -1, 5),
                           random_cmp(rng, "val_i", 0, 100));
    if (roll < 0.95)
        return Expr::logic(LogicOp::Or, random_cmp(rng, "grp", -1, 5),
                           random_cmp(rng, "val_i", 0, 100));
    return Expr::negate(random_cmp(rng, "grp", -1, 5));
}

inline ExprPtr random_c_pred(TestRng& rng, int64_t keyDomain) {
    static const std::vector<CmpOp> ops = {CmpOp::Lt, CmpOp::Le, CmpOp::Eq,
                                           CmpOp::Ne, CmpOp::Ge, CmpOp::Gt};
    ExprPtr base;
    double roll = rng.real(0.0, 1.0);
    if (roll < 0.60) {
        base = Expr::cmp(rng.pick(ops), Expr::corr("S.key"), Expr::col("cat"));
    } else if (roll < 0.80) {
        base = Expr::cmp(rng.pick(ops),
                         Expr::arith(ArithOp::Add, Expr::corr("S.key"), Expr::lit_int(1)),
                         Expr::col("cat"));
    } else {
        base = Expr::cmp(rng.pick(ops), Expr::corr("S.key"),
                         Expr::lit_int(rng.range(0, keyDomain + 1)));
    }
    if (rng.chance(0.25))
        return Expr::logic(LogicOp::And, base, random_cmp(rng, "grp", 0, 4));
    return base;
}

inline SubqueryQuery query_shell(int classId) {
    SubqueryQuery q;
    q.outer_table = "s";
    q.output_columns = {"id"};
    q.inner_table = "e";
    q.set_op = (classId <= 2) ? SetPredicateOp::In : SetPredicateOp::LtSome;
    q.connective = (classId % 2 == 1) ? Connective::And : Connective::Or;
    return q;
}

/// Random instance of the given class. Sizes are skewed small; value
/// domain cycles over int/float/text.
inline Instance make_random_instance(int classId, uint64_t seed, size_t maxOuter = 200,
                                     size_t maxInner = 500) {
    TestRng rng(seed * 4 + static_cast<uint64_t>(classId));
    size_t n = static_cast<size_t>(rng.range(1, static_cast<int64_t>(maxOuter)));
    size_t m = static_cast<size_t>(rng.range(0, static_cast<int64_t>(maxInner)));
    if (rng.chance(0.5)) n = std::min<size_t>(n, 30);
    if (rng.chance(0.5)) m = std::min<size_t>(m, 60);
    int64_t keyDomain = rng.range(1, 6);

    Instance inst;
    inst.catalog.add(make_outer(rng, n, keyDomain));
    inst.catalog.add(make_inner(rng, m, keyDomain));

    auto q = query_shell(classId);
    ValueMode mode = static_cast<ValueMode>(rng.range(0, 2));
    if (q.set_op == SetPredicateOp::LtSome && mode == ValueMode::Text && rng.chance(0.5))
        mode = ValueMode::Int;  // keep text ordering rare but covered
    switch (mode) {
        case ValueMode::Int:
            q.probe = rng.chance(0.3)
                          ? Expr::arith(ArithOp::Add, Expr::col("probe_i"), Expr::lit_int(3))
                          : Expr::col("probe_i");
            q.inner_value = rng.chance(0.3)
                                ? Expr::arith(ArithOp::Sub, Expr::col("val_i"), Expr::lit_int(2))
                                : Expr::col("val_i");
            break;
        case ValueMode::Float:
            q.probe = Expr::col("probe_f");
            q.inner_value =
                rng.chance(0.3)
                    ? Expr::arith(ArithOp::Mul, Expr::col("val_f"), Expr::lit_float(0.75))
                    : Expr::col("val_f");
            break;
        case ValueMode::Text:
            q.probe = Expr::col("name");
            q.inner_value = Expr::col("word");
            break;
    }
    q.nc_pred = random_nc_pred(rng);
    q.c_pred = random_c_pred(rng, keyDomain);
    inst.query = q;
    return inst;
}

/// Deterministic edge instances: empty inner, all-pass/all-fail NC and
/// C branches, ties at the digest extreme, duplicates, tiny tables.
inline Instance make_edge_instance(int classId, int edgeId) {
    TestRng rng(7777 + static_cast<uint64_t>(classId) * 100 + static_cast<uint64_t>(edgeId));
    int64_t keyDomain = 3;
    size_t n = 12, m = 40;
    switch (edgeId) {
        case 0: m = 0; break;                    // empty inner
        case 5: n = 1; m = 1; break;             // single rows
        case 8: n = 3; m = 5; break;             // tiny
        default: break;
    }

    Instance inst;
    inst.catalog.add(make_outer(rng, n, keyDomain));
    inst.catalog.add(make_inner(rng, m, keyDomain));

    auto q = query_shell(classId);
    q.probe = Expr::col("probe_i");
    q.inner_value = Expr::col("val_i");
    q.nc_pred = random_cmp(rng, "grp", 0, 4);
    q.c_pred = Expr::cmp(CmpOp::Eq, Expr::corr("S.key"), Expr::col("cat"));
    switch (edgeId) {
        case 1: q.nc_pred = Expr::cmp(CmpOp::Ge, Expr::col("grp"), Expr::lit_int(0)); break;
        case 2: q.nc_pred = Expr::cmp(CmpOp::Lt, Expr::col("grp"), Expr::lit_int(0)); break;
        case 3: q.c_pred = Expr::cmp(CmpOp::Ge, Expr::corr("S.key"), Expr::lit_int(-100)); break;
        case 4: q.c_pred = Expr::cmp(CmpOp::Lt, Expr::corr("S.key"), Expr::lit_int(-100)); break;
        case 6: {
            // probe values equal to the only inner value: strict-< ties
            Instance tie;
            std::vector<int64_t> id = {1, 2}, probeI = {5, 4}, key = {1, 2};
            std::vector<double> probeF = {0.0, 0.0};
            std::vector<std::string> name = {"a", "b"};
            tie.catalog.add(ColumnTable(
                "s", {Column("id", std::move(id)), Column("probe_i", std::move(probeI)),
                      Column("probe_f", std::move(probeF)), Column("key", std::move(key)),
                      Column("name", std::move(name))}));
            std::vector<int64_t> valI = {5, 5}, cat = {1, 2}, grp = {1, 1};
            std::vector<double> valF = {0.0, 0.0};
            std::vector<std::string> word = {"x", "y"};
            tie.catalog.add(ColumnTable(
                "e", {Column("val_i", std::move(valI)), Column("val_f", std::move(valF)),
                      Column("cat", std::move(cat)), Column("grp", std::move(grp)),
                      Column("word", std::move(word))}));
            tie.query = q;
            tie.query.nc_pred = Expr::cmp(CmpOp::Ge, Expr::col("grp"), Expr::lit_int(0));
            return tie;
        }
        case 7: {
            // every inner value identical: multiset duplicate handling
            std::vector<int64_t> valI(m, 42), cat(m), grp(m);
            std::vector<double> valF(m, 0.0);
            std::vector<std::string> word(m, "w");
            for (size_t i = 0; i < m; ++i) {
                cat[i] = rng.range(1, keyDomain);
                grp[i] = rng.range(0, 4);
            }
            Instance dup;
            dup.catalog.add(make_outer(rng, n, keyDomain));
            dup.catalog.add(ColumnTable(
                "e", {Column("val_i", std::move(valI)), Column("val_f", std::move(valF)),
                      Column("cat", std::move(cat)), Column("grp", std::move(grp)),
                      Column("word", std::move(word))}));
            dup.query = q;
            dup.query.nc_pred = Expr::cmp(CmpOp::Ge, Expr::col("grp"), Expr::lit_int(2));
            return dup;
        }
        case 9: {
            // all outer rows share one correlation key
            std::vector<int64_t> id(n), probeI(n), key(n, 2);
            std::vector<double> probeF(n);
            std::vector<std::string> name(n, "same");
            for (size_t i = 0; i < n; ++i) {
                id[i] = static_cast<int64_t>(i) + 1;
                probeI[i] = rng.range(0, 100);
                probeF[i] = rng.real(0.0, 100.0);
            }
            Instance one;
            one.catalog.add(ColumnTable(
                "s", {Column("id", std::move(id)), Column("probe_i", std::move(probeI)),
                      Column("probe_f", std::move(probeF)), Column("key", std::move(key)),
                      Column("name", std::move(name))}));
            one.catalog.add(make_inner(rng, m, keyDomain));
            one.query = q;
            return one;
        }
        default: break;
    }
    inst.query = q;
    return inst;
}

inline std::vector<PlanKind> legal_plan_kinds(Connective c) {
    if (c == Connective::And)
        return {PlanKind::Naive, PlanKind::Prefilter, PlanKind::Cached};
    return {PlanKind::Naive, PlanKind::Cached, PlanKind::Lp};
}

// ------------------------------------------------- plain reference bits

/// NC-branch multiset by a plain double loop (no engine code).
inline std::vector<Scalar> reference_nc_multiset(const Instance& inst) {
    const auto& inner = inst.catalog.get(inst.query.inner_table);
    std::vector<Scalar> values;
    for (size_t i = 0; i < inner.row_count(); ++i) {
        auto r = static_cast<RowPos>(i);
        if (eval_row_bool(*inst.query.nc_pred, inner, r, nullptr))
            values.push_back(eval_row(*inst.query.inner_value, inner, r, nullptr));
    }
    return values;
}

/// Outer positions failing the NC branch of the OR rewrite.
inline std::vector<RowPos> reference_nc_fail_positions(const Instance& inst) {
    const auto& outer = inst.catalog.get(inst.query.outer_table);
    auto values = reference_nc_multiset(inst);
    std::vector<RowPos> fails;
    for (size_t i = 0; i < outer.row_count(); ++i) {
        auto r = static_cast<RowPos>(i);
        Scalar probe = eval_row(*inst.query.probe, outer, r, nullptr);
        if (!set_predicate(inst.query.set_op, probe, values)) fails.push_back(r);
    }
    return fails;
}

/// Distinct correlation-key count over the given outer rows, using the
/// parameters of `pred`.
inline size_t distinct_corr_keys(const Instance& inst, const Expr& pred,
                                 const std::vector<RowPos>& rows) {
    const auto& outer = inst.catalog.get(inst.query.outer_table);
    auto params = collect_corr_params(pred);
    std::set<std::string> keys;
    for (RowPos r : rows) {
        std::string key;
        for (const auto& p : params) {
            Expr::CorrParam cp{p};
            key += outer.column(cp.column()).at(r).to_display();
            key += '\x1f';
        }
        keys.insert(key);
    }
    return keys.size();
}

inline std::vector<RowPos> all_positions(const ColumnTable& t) {
    std::vector<RowPos> out(t.row_count());
    for (size_t i = 0; i < out.size(); ++i) out[i] = static_cast<RowPos>(i);
    return out;
}

}  // namespace lpqtest
