#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "frackin/errors.hpp"
#include "frackin/special_integrals.hpp"

using namespace frackin;

TEST_CASE("pole2 integral at alpha=0 beta1=1 a=2 is pi/4") {
    CHECK(std::abs(lemma_integral_pole2(0.0, 1.0, 2.0) - std::numbers::pi / 4) < 1e-12);
    auto d = lemma_integral_pole2_direct(0.0, 1.0, 2.0);
    CHECK(std::abs(d.value - std::numbers::pi / 4) < 1e-10);
}

TEST_CASE("closed forms agree with quadrature on random admissible cases") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        const double b1 = 0.5 + 2.5 * U(gen);
        const double a1 = -1.0 + 2.0 * b1 * (0.05 + 0.9 * U(gen));
        const double b2 = 0.5 + 2.5 * U(gen);
        const double a2 = -1.0 + b2 * (0.05 + 0.9 * U(gen));
        const double a = std::exp(-3.0 + 6.0 * U(gen));
        CAPTURE(i);
        auto q1 = c1_quadrature(a1, b1);
        CHECK(q1.converged);
        CHECK(std::abs(q1.value / c1_closed(a1, b1) - 1.0) < 1e-9);
        auto q2 = c2_quadrature(a2, b2);
        CHECK(q2.converged);
        CHECK(std::abs(q2.value / c2_closed(a2, b2) - 1.0) < 1e-9);
        auto d1 = lemma_integral_pole2_direct(a1, b1, a);
        CHECK(std::abs(d1.value / lemma_integral_pole2(a1, b1, a) - 1.0) < 1e-9);
        auto d2 = lemma_integral_pole1_direct(a2, b2, a);
        CHECK(std::abs(d2.value / lemma_integral_pole1(a2, b2, a) - 1.0) < 1e-9);
    }
}

TEST_CASE("frozen constants") {
    // independent evaluation in mpmath
    CHECK(c1_closed(-0.5, 2.0) == doctest::Approx(2.052344305954062).epsilon(1e-14));
    CHECK(c2_closed(-0.5, 1.0) == doctest::Approx(3.7081493546027433).epsilon(1e-14));
    CHECK(c2_closed(-0.5, 2.0) == doctest::Approx(2.5189270468096527).epsilon(1e-14));
}

TEST_CASE("homogeneity in a") {
    const double alpha = 0.3, b1 = 1.7, b2 = 2.2;
    const double r1 = lemma_integral_pole2(alpha, b1, 2.0) / lemma_integral_pole2(alpha, b1, 1.0);
    CHECK(r1 == doctest::Approx(std::pow(2.0, -(alpha + 1) / b1)).epsilon(1e-14));
    const double r2 = lemma_integral_pole1(alpha, b2, 3.0) / lemma_integral_pole1(alpha, b2, 1.0);
    CHECK(r2 == doctest::Approx(std::pow(3.0, -(alpha + 1) / b2)).epsilon(1e-14));
}

TEST_CASE("divergent parameters are refused") {
    CHECK_THROWS_AS(c1_closed(-1.0, 1.0), DomainError);
    CHECK_THROWS_AS(c1_closed(1.0, 1.0), DomainError);
    CHECK_THROWS_AS(c2_closed(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(lemma_integral_pole2(0.0, 1.0, 0.0), DomainError);
    CHECK_THROWS_AS(c2_quadrature(0.5, -1.0), DomainError);
}

TEST_CASE("sphere quadrature") {
    auto q1 = build_sphere_quadrature(1, 2.0, 2);
    REQUIRE(q1.size() == 2);
    CHECK(q1.v1(0) == -2.0);
    CHECK(q1.weights[0] + q1.weights[1] == doctest::Approx(1.0));

    auto q = build_sphere_quadrature(2, 1.0, 64);
    double w = 0.0, m = 0.0, first = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k) {
        w += q.weights[k];
        m += q.weights[k] * std::pow(std::abs(q.v1(k)), 1.75);
        first += q.weights[k] * q.v1(k);
    }
    CHECK(w == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(first) < 1e-15);
    CHECK(std::abs(m - sphere_abs_moment(2, 1.75)) < 1e-10);
    CHECK_THROWS_AS(build_sphere_quadrature(2, 1.0, 7), InputError);
    CHECK_THROWS_AS(build_sphere_quadrature(3, 1.0, 8), InputError);
}

TEST_CASE("fat tail integral") {
    auto r = improper_fat_tail_integral([](double y) { return std::pow(1.0 + y, -2.5); }, 0.0, 2.5);
    CHECK(r.value == doctest::Approx(1.0 / 1.5).epsilon(1e-10));
    auto bad = improper_fat_tail_integral([](double y) { return 1.0 / (1.0 + y); }, 0.0, 1.0);
    CHECK_FALSE(bad.converged);
    CHECK(std::isinf(bad.value));
}
