#include <cmath>

#include "doctest.h"
#include "support.hpp"

#include "lpq/bench.hpp"
#include "lpq/costmodel.hpp"

using namespace lpq;

namespace {

SubqueryQuery or_query() {
    auto q = lpqtest::query_shell(4);
    q.probe = Expr::col("probe_i");
    q.inner_value = Expr::col("val_i");
    q.nc_pred = parse_expr("(= (col grp) (lit 1))");
    q.c_pred = parse_expr("(= (corr S.key) (col cat))");
    return q;
}

SubqueryQuery and_query() {
    auto q = or_query();
    q.set_op = SetPredicateOp::In;
    q.connective = Connective::And;
    return q;
}

}  // namespace

TEST_SUITE("cost formulas") {
    TEST_CASE("hand substitution: N=10 M=10 unit costs") {
        CostParams p{10, 10, 1, 1, 0.0, 1.0};
        auto e = estimate(p);
        CHECK(e.naive == 200.0);
        CHECK(e.cached == 110.0);
        CHECK(e.proposed == 110.0);  // equals cached when nothing passes NC

        p.nc_pass_fraction = 1.0;
        CHECK(estimate(p).proposed == 10.0);  // decays to N * costNC
    }

    TEST_CASE("proposed never exceeds cached; equality only at pass fraction zero") {
        CostParams p{50, 200, 2, 3, 0.0, 1.0};
        for (int i = 0; i <= 100; ++i) {
            p.nc_pass_fraction = i / 100.0;
            auto e = estimate(p);
            CHECK(e.proposed <= e.cached + 1e-9);
            if (i == 0) CHECK(e.proposed == e.cached);
            else CHECK(e.proposed < e.cached);
        }
    }

    TEST_CASE("proposed is affine non-increasing; cached and naive are constant") {
        CostParams p{40, 100, 1.5, 0.5, 0.0, 1.0};
        double prev = std::numeric_limits<double>::infinity();
        double cached0 = estimate(p).cached, naive0 = estimate(p).naive;
        std::vector<double> proposed;
        for (int i = 0; i <= 100; ++i) {
            p.nc_pass_fraction = i / 100.0;
            auto e = estimate(p);
            CHECK(e.cached == cached0);
            CHECK(e.naive == naive0);
            CHECK(e.proposed <= prev);
            prev = e.proposed;
            proposed.push_back(e.proposed);
        }
        // affine: constant second difference
        for (size_t i = 2; i < proposed.size(); ++i)
            CHECK(std::abs((proposed[i] - proposed[i - 1]) -
                           (proposed[i - 1] - proposed[i - 2])) < 1e-6);
    }

    TEST_CASE("prefilter estimate substitutions") {
        CostParams p{10, 100, 1, 1, 0.0, 1.0};
        CHECK(estimate_prefilter(p, 0.0) == 100.0);            // M * costNC
        CHECK(estimate_prefilter(p, 1.0) == 100.0 + 1000.0);   // + N*M*costC
        CHECK(estimate_prefilter(p, 0.5) == 600.0);
    }

    TEST_CASE("invalid parameters are usage errors") {
        CHECK_THROWS_AS(estimate(CostParams{-1, 0, 1, 1, 0, 1}), EngineError);
        CHECK_THROWS_AS(estimate(CostParams{1, 1, 1, 1, 1.5, 1}), EngineError);
        CHECK_THROWS_AS(estimate_prefilter(CostParams{1, 1, 1, 1, 0, 1}, 2.0), EngineError);
    }
}

TEST_SUITE("choose_plan") {
    TEST_CASE("high pass fraction picks lp") {
        CostParams p{100, 100, 1, 1, 0.99, 1.0};
        CHECK(choose_plan(or_query(), p) == PlanKind::Lp);
    }

    TEST_CASE("costNC-dominant substitution: cached stays below naive, tie goes to lp") {
        // with costNC=1000, costC=0.001, N=M=10:
        //   naive    = 10*10*1000.001 = 100000.1
        //   cached   = 10*1000 + 10*10*0.001 = 10000.1
        //   proposed = cached at pass fraction 0
        // naive never wins under these formulas once M >= 1; the
        // pass-fraction-0 tie resolves to lp by the preference order.
        CostParams p{10, 10, 1000, 0.001, 0.0, 1.0};
        auto e = estimate(p);
        CHECK(e.naive == doctest::Approx(100000.1));
        CHECK(e.cached == doctest::Approx(10000.1));
        CHECK(e.proposed == doctest::Approx(10000.1));
        CHECK(choose_plan(or_query(), p) == PlanKind::Lp);
    }

    TEST_CASE("and classes choose between naive and prefilter") {
        // selective NC: prefilter wins outright
        CostParams cheap{100, 100, 1, 1, 0.0, 0.05};
        CHECK(choose_plan(and_query(), cheap) == PlanKind::Prefilter);
        // naive - prefilter = M*costNC*(N-1) + N*M*costC*(1-sel) >= 0
        // for N >= 1, so naive never strictly wins under these models;
        // the worst case for prefilter is a tie at N=1, sel=1, which
        // the preference order resolves to prefilter.
        CostParams tie{1, 100, 1000, 0.5, 0.0, 1.0};
        CHECK(estimate_prefilter(tie, 1.0) == estimate(tie).naive);
        CHECK(choose_plan(and_query(), tie) == PlanKind::Prefilter);
    }

    TEST_CASE("sweeping the pass fraction switches the choice at most once") {
        CostParams p{60, 80, 5, 0.8, 0.0, 1.0};
        auto q = or_query();
        int switches = 0;
        PlanKind prev = choose_plan(q, p);
        for (int i = 1; i <= 100; ++i) {
            p.nc_pass_fraction = i / 100.0;
            PlanKind cur = choose_plan(q, p);
            if (cur != prev) switches++;
            prev = cur;
        }
        CHECK(switches <= 1);
    }

    TEST_CASE("choice is invariant under uniform positive cost scaling") {
        auto q = or_query();
        for (double pf : {0.0, 0.3, 0.7, 0.999}) {
            CostParams base{120, 300, 2, 1, pf, 1.0};
            PlanKind expected = choose_plan(q, base);
            for (double s : {0.1, 1.0, 10.0}) {
                CostParams scaled = base;
                scaled.cost_nc *= s;
                scaled.cost_c *= s;
                CHECK(choose_plan(q, scaled) == expected);
            }
        }
    }
}

TEST_SUITE("measure_params") {
    TEST_CASE("row counts and exact pass fraction match a plain recount") {
        for (uint64_t seed = 0; seed < 10; ++seed) {
            auto inst = lpqtest::make_random_instance(4, seed + 2600, 80, 160);
            auto p = measure_params(inst.query, inst.catalog);
            CHECK(p.n == inst.catalog.get("s").row_count());
            CHECK(p.m == inst.catalog.get("e").row_count());
            auto fails = lpqtest::reference_nc_fail_positions(inst);
            double expected =
                1.0 - static_cast<double>(fails.size()) / inst.catalog.get("s").row_count();
            CHECK(p.nc_pass_fraction == doctest::Approx(expected));
            CHECK(p.cost_nc == expression_cost(*inst.query.nc_pred));
            CHECK(p.cost_c == expression_cost(*inst.query.c_pred));
        }
    }

    TEST_CASE("sampled pass fraction stays within 0.05 of exact on a 40000-row outer") {
        Catalog cat;
        cat.add(generate_part({0.2, 5}));
        cat.add(generate_lineitem({0.002, 5}));
        auto q = lpq::make_eval_query();
        q = substitute_x(q, 10);
        double exact = measure_params(q, cat).nc_pass_fraction;
        int within = 0;
        for (uint64_t seed = 0; seed < 100; ++seed) {
            double sampled =
                measure_params(q, cat, MeasureMode::Sample, 1000, seed).nc_pass_fraction;
            if (std::abs(sampled - exact) <= 0.05) within++;
        }
        CHECK(within >= 95);
    }
}
