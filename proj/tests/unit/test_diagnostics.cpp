#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "frackin/diagnostics.hpp"

using namespace frackin;

TEST_CASE("convergence table") {
    auto t = convergence_table({{0.05, 0.1}, {0.2, 0.4}, {0.1, 0.2}});
    REQUIRE(t.rows.size() == 3);
    CHECK(t.rows[0].eps == 0.2);
    CHECK(t.slope_defined);
    CHECK(t.slope == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(t.monotone);
    CHECK(t.verdict == "monotone decreasing");

    CHECK(convergence_table({{0.2, 0.1}, {0.1, 0.3}, {0.05, 0.2}}).verdict == "not monotone");
    CHECK(convergence_table({{0.2, 0.1}, {0.1, 0.05}}).verdict == "insufficient");
    auto z = convergence_table({{0.2, 0.0}, {0.1, 0.0}, {0.05, 0.0}});
    CHECK(z.verdict == "degenerate");
    CHECK_FALSE(z.slope_defined);
}

TEST_CASE("loglog slope") {
    CHECK(loglog_slope({1, 2, 4, 8}, {3, 12, 48, 192}) == doctest::Approx(2.0));
}

namespace {

struct Run {
    CoefficientModel model{reference_set()};
    ScalingContext ctx = make_scaling_context(model, 0.1, 1);
    KineticSolver solver;
    Run(const GridOptions& o) : solver(model, ctx, make_phase_grid(model, ctx, o)) {}
};

GridOptions small() {
    GridOptions o;
    o.Nx = 32;
    o.Ny = 64;
    return o;
}

}  // namespace

TEST_CASE("stationary data has no dissipation and no deviation") {
    Run r(small());
    auto s = r.solver.init_state(sample_profile({1.0, {}}, r.solver.grid().L, 32));
    CHECK(r.solver.y_dissipation_raw(s) < 1e-20);
    CHECK(r.solver.lambda_dissipation_raw(s) < 1e-20);
    auto d = deviation_bound_probe(r.solver, s);
    CHECK(d.violations == 0);
    CHECK(d.lhs_max < 1e-12);
    CHECK(d.C == doctest::Approx(r.solver.C_discrete()));
}

TEST_CASE("a priori bounds on a short run") {
    Run r(small());
    auto s = r.solver.init_state(sample_profile({1.0, {{1, 0.5}, {2, 0.3}}}, r.solver.grid().L, 32));
    AprioriTracker t(r.solver);
    t.start(s);
    for (int n = 0; n < 30; ++n) {
        auto prev = s;
        r.solver.step(s);
        t.observe(prev, s);
        auto d = deviation_bound_probe(r.solver, s);
        CHECK(d.violations == 0);
    }
    CHECK(t.steps() == 30);
    CHECK(t.entropy_monotone());
    CHECK(t.min_value() >= 0.0);
    CHECK(t.sup_ratio() <= 1.0 + 1e-8);
    CHECK(t.max_mass_drift() <= 1e-12);
    auto reps = check_apriori(r.solver, t);
    CHECK(reps.size() == 5);
    for (const auto& b : reps) {
        CAPTURE(b.name);
        CHECK(b.pass);
    }
    CHECK_FALSE(format_reports(reps).empty());
}

TEST_CASE("flux probe closes on a resolved run") {
    auto o = small();
    o.cfl = 0.1;
    o.scheme = TransportScheme::Muscl;
    CoefficientModel model(reference_set());
    auto ctx = make_scaling_context(model, 0.2, 1);
    KineticSolver S(model, ctx, make_phase_grid(model, ctx, o), {}, TransportScheme::Muscl);
    auto s = S.init_state(sample_profile({1.0, {{1, 0.5}}}, S.grid().L, 32));
    KineticState prev = s;
    for (int n = 0; n < 200; ++n) {
        prev = s;
        S.step(s);
    }
    auto next = s;
    S.step(next);
    auto P = flux_decomposition_probe(S, prev, s, next, {0, 1});
    REQUIRE(P.modes.size() == 2);
    CHECK(std::abs(P.modes[0].div_J) < 1e-10);
    CHECK(P.modes[1].closure < 0.05);
    CHECK_FALSE(P.under_resolved);
}
