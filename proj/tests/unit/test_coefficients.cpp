#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "frackin/errors.hpp"
#include "frackin/special_integrals.hpp"

using namespace frackin;

TEST_CASE("validator truth table") {
    auto c = reference_set();
    auto r = validate_parameters(c);
    CHECK(r.ok);
    CHECK(compute_mu(c) == doctest::Approx(0.75));

    c.s_exp = 1.2;
    r = validate_parameters(c);
    CHECK_FALSE(r.ok);
    REQUIRE(r.violated.size() == 1);
    CHECK(r.has("s*beta > beta+sigma-1"));
    CHECK(r.violated[0].lhs == doctest::Approx(2.4));
    CHECK(r.violated[0].rhs == doctest::Approx(2.5));

    c = reference_set();
    c.sigma = 1.0;
    r = validate_parameters(c);
    REQUIRE(r.violated.size() == 1);
    CHECK(r.has("sigma > 1"));

    c = reference_set();
    c.n_exp = 3.0;
    r = validate_parameters(c);
    CHECK(r.violated.size() == 2);
    CHECK(r.has("beta > n-1"));
    CHECK(r.has("mu in (0,1)"));

    c = reference_set();
    c.n_exp = 1.2;
    CHECK(compute_mu(c) == doctest::Approx(0.1));
    CHECK_FALSE(validate_parameters(c).ok);
}

TEST_CASE("non-finite or non-positive fields are input errors") {
    auto c = reference_set();
    c.beta = -1.0;
    CHECK_THROWS_AS(validate_parameters(c), InputError);
    c = reference_set();
    c.sigma = std::nan("");
    CHECK_THROWS_AS(validate_parameters(c), InputError);
    c = reference_set();
    c.c_minus = 0.0;
    CHECK_THROWS_AS(CoefficientModel{c}, InputError);
    c = reference_set();
    c.c_plus = c.c_minus = 5.0;
    CHECK_THROWS_AS(CoefficientModel{c}, InputError);
}

TEST_CASE("reference model against frozen values") {
    // tabulated independently with scipy.integrate.quad
    CoefficientModel m(reference_set());
    CHECK(m.q0_interior_amplitude() == doctest::Approx(0.1038827648950322).epsilon(1e-11));
    CHECK(m.chi0_inf() == doctest::Approx(8.219764339894878).epsilon(1e-10));
    CHECK(m.B0() == doctest::Approx(4.109882169947439).epsilon(1e-10));
    CHECK(m.C_minus() == doctest::Approx(5.0));
    CHECK(compute_nu(m, 1) == doctest::Approx(0.49936816217295815).epsilon(1e-10));
    struct P { double y, chi; };
    for (P p : {P{-50, 0.1}, P{-2.2, 2.242018012906349}, P{0, 4.109882169947439},
                P{1.7, 5.556322213721505}, P{2.3, 6.0576146986707835},
                P{30, 8.053097673228212}}) {
        CAPTURE(p.y);
        CHECK(m.chi0(p.y) == doctest::Approx(p.chi).epsilon(1e-10));
    }
    CHECK(m.Q0_cdf(-2.2) == doctest::Approx(0.27270871105129657).epsilon(1e-10));
    CHECK(m.Q0_cdf(0.5) == doctest::Approx(0.5519413824475161).epsilon(1e-10));
    CHECK(m.Q0_cdf(2.3) == doctest::Approx(0.7352024561590718).epsilon(1e-10));
}

TEST_CASE("tails are exact branches") {
    auto c = reference_set();
    CoefficientModel m(c);
    CHECK(eval_Q0(m, -4.0) == c.c_minus * std::pow(4.0, -1.5));
    CHECK(eval_Q0(m, 7.0) == c.c_plus * std::pow(7.0, -1.5));
    CHECK(eval_Lambda(m, -9.0) == std::pow(9.0, -2.0));
    CHECK(eval_D(m, -3.0) == std::pow(3.0, 3.5));
    CHECK(eval_Lambda(m, 10.0) == c.lambda_plateau);
    const double y = -2000.0;
    CHECK(std::abs(m.chi0(y) / (m.C_minus() * std::pow(-y, c.sigma - c.n_exp)) - 1.0) < 1e-12);
}

TEST_CASE("Q0 integrates to one and chi0 is increasing") {
    CoefficientModel m(reference_set());
    CHECK(std::abs(m.Q0_cdf(1e12) - 1.0) < 1e-6);
    CHECK(m.Q0_cdf(2.5) == doctest::Approx(1.0 - 0.4 * std::pow(2.5, -0.5)).epsilon(1e-14));
    CHECK(m.Q0_cdf(-1e12) < 1e-6);
    double prev = 0.0;
    for (double y = -100.0; y <= 100.0; y += 0.37) {
        const double v = m.chi0(y);
        CHECK(v > prev);
        prev = v;
    }
    CHECK(prev < m.chi0_inf());
}

TEST_CASE("coefficients are C1 across the blends") {
    CoefficientModel m(reference_set());
    const double h = 1e-7;
    for (double y0 : {-2.5, -2.0, 2.0, 2.5}) {
        CAPTURE(y0);
        CHECK(m.Q0(y0 - h) == doctest::Approx(m.Q0(y0 + h)).epsilon(1e-6));
        CHECK(m.dQ0(y0 - h) == doctest::Approx(m.dQ0(y0 + h)).epsilon(1e-5));
        CHECK(m.D(y0 - h) == doctest::Approx(m.D(y0 + h)).epsilon(1e-6));
        CHECK(std::abs(m.dD(y0 - h) - m.dD(y0 + h)) < 1e-3);
        CHECK(m.Lambda(y0 - h) == doctest::Approx(m.Lambda(y0 + h)).epsilon(1e-6));
        CHECK(std::abs(m.dLambda(y0 - h) - m.dLambda(y0 + h)) < 1e-5);
    }
    for (double y : {-2.3, -2.1, 2.2, 2.4}) {
        const double fd = (m.Q0(y + 1e-6) - m.Q0(y - 1e-6)) / 2e-6;
        CHECK(m.dQ0(y) == doctest::Approx(fd).epsilon(1e-6));
        const double fl = (m.Lambda(y + 1e-6) - m.Lambda(y - 1e-6)) / 2e-6;
        CHECK(m.dLambda(y) == doctest::Approx(fl).epsilon(1e-6));
    }
}

TEST_CASE("nu scales linearly in the tail constant c_minus through C_minus c_minus") {
    auto c = reference_set();
    CoefficientModel m(c);
    // c_minus * C_minus does not depend on c_minus; nu moves only through B0
    const double nu = compute_nu(m, 1) * m.B0();
    c.c_minus = 0.3;
    CoefficientModel m2(c);
    CHECK(compute_nu(m2, 1) * m2.B0() == doctest::Approx(nu).epsilon(1e-12));
}

TEST_CASE("dim 2 differs from dim 1 by the sphere moment") {
    CoefficientModel m(reference_set());
    CHECK(compute_nu(m, 2) / compute_nu(m, 1) ==
          doctest::Approx(sphere_abs_moment(2, 1.75)).epsilon(1e-14));
}

TEST_CASE("pre-limit integral extrapolates to nu") {
    CoefficientModel m(reference_set());
    const double mu = 0.75;
    const double n1 = prelimit_nu(m, 1e-3, 1.0, 1), n2 = prelimit_nu(m, 1e-4, 1.0, 1);
    const double ex = extrapolate_nu(1e-3, n1, 1e-4, n2, mu);
    CHECK(std::abs(ex / compute_nu(m, 1) - 1.0) < 0.01);
}

TEST_CASE("scaling context") {
    CoefficientModel m(reference_set());
    auto ctx = make_scaling_context(m, 0.1, 1);
    CHECK(ctx.mu == doctest::Approx(0.75));
    CHECK(ctx.B0 == m.B0());
    CHECK_THROWS_AS(make_scaling_context(m, 0.0, 1), InputError);
    CHECK_THROWS_AS(make_scaling_context(m, 0.1, 3), InputError);
}
