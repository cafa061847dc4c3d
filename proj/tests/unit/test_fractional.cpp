#include <cmath>
#include <numbers>

#include "doctest.h"
#include "frackin/errors.hpp"
#include "frackin/fractional.hpp"

using namespace frackin;

namespace {

MacroField rough(int N, double L) {
    MacroField f;
    f.L = L;
    f.values.resize(N);
    for (int i = 0; i < N; ++i) {
        const double x = (i + 0.5) * L / N;
        f.values[i] = 1.0 + 0.5 * std::cos(2 * std::numbers::pi * x / L) +
                      (x > 0.3 * L && x < 0.45 * L ? 0.8 : 0.0);
    }
    return f;
}

double maxdiff(const MacroField& a, const MacroField& b) {
    double m = 0.0;
    for (int i = 0; i < a.Nx(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

}  // namespace

TEST_CASE("semigroup property") {
    FractionalProblem p{0.7, 1.75, rough(128, 2 * std::numbers::pi)};
    auto full = fractional_solve(p, 0.5);
    auto half = fractional_solve(p, 0.2);
    FractionalProblem p2{0.7, 1.75, half};
    CHECK(maxdiff(fractional_solve(p2, 0.3), full) < 1e-12);
    CHECK(maxdiff(fractional_solve(p, 0.0), p.rho0) < 1e-13);
}

TEST_CASE("order 2 is the periodic heat equation") {
    const double L = 2 * std::numbers::pi, nu = 0.3, t = 0.4;
    const int N = 128;
    MacroField rho0;
    rho0.L = L;
    rho0.values.resize(N);
    // smooth periodic data with a known heat solution: exp(k^2 terms) per mode
    auto exact = rho0;
    for (int i = 0; i < N; ++i) {
        const double x = (i + 0.5) * L / N;
        rho0.values[i] = 1.0 + std::cos(x) + 0.3 * std::sin(5 * x) + 0.1 * std::cos(17 * x);
        exact.values[i] = 1.0 + std::exp(-nu * t) * std::cos(x) +
                          0.3 * std::exp(-25 * nu * t) * std::sin(5 * x) +
                          0.1 * std::exp(-289 * nu * t) * std::cos(17 * x);
    }
    CHECK(maxdiff(fractional_solve({nu, 2.0, rho0}, t), exact) < 1e-10);
}

TEST_CASE("single mode decays by the multiplier") {
    const double L = 2 * std::numbers::pi, nu = 1.0, t = 0.5;
    MacroField rho0;
    rho0.L = L;
    const int N = 64;
    for (int i = 0; i < N; ++i) rho0.values.push_back(std::cos(2 * std::numbers::pi * (i + 0.5) / N));
    auto out = fractional_solve({nu, 1.75, rho0}, t);
    const double f = std::exp(-std::pow(2 * std::numbers::pi / L, 1.75) * t);
    CHECK(std::abs(mode_decay(nu, 1.75, L, 1, t) - f) < 1e-15);
    for (int i = 0; i < N; ++i) CHECK(std::abs(out.values[i] - f * rho0.values[i]) < 1e-12);
}

TEST_CASE("mass is conserved") {
    FractionalProblem p{1.3, 1.4, rough(100, 3.0)};
    auto out = fractional_solve(p, 2.0);
    CHECK(out.integral() == doctest::Approx(p.rho0.integral()).epsilon(1e-13));
}

TEST_CASE("bad input") {
    FractionalProblem p{1.0, 2.5, rough(16, 1.0)};
    CHECK_THROWS_AS(fractional_solve(p, 1.0), InputError);
    p.order = 1.5;
    CHECK_THROWS_AS(fractional_solve(p, -1.0), InputError);
    p.rho0.values[2] = std::nan("");
    CHECK_THROWS_AS(fractional_solve(p, 1.0), InputError);
}

TEST_CASE("profile near order 1 approaches the Cauchy density") {
    std::vector<double> x;
    for (double v = -20.0; v <= 20.0; v += 0.25) x.push_back(v);
    const double nu = 1.0, t = 1.0;
    auto f = self_similar_profile(1.0 + 1e-8, nu, t, x);
    double err = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        err = std::max(err, std::abs(f.values[i] - 1.0 / (std::numbers::pi * (1.0 + x[i] * x[i]))));
    CHECK(err < 1e-6);
}

TEST_CASE("profile properties at order 1.75") {
    const double a = 1.75;
    auto p0 = self_similar_profile(a, 1.0, 1.0, {0.0});
    CHECK(p0.values[0] == doctest::Approx(std::tgamma(1.0 + 1.0 / a) / std::numbers::pi).epsilon(1e-10));

    // self-similarity: p(t, x) = t^{-1/a} p(1, x t^{-1/a})
    const double t = 3.0, sc = std::pow(t, -1.0 / a);
    for (double x : {0.5, 2.0, 7.0}) {
        const double lhs = self_similar_profile(a, 1.0, t, {x}).values[0];
        const double rhs = sc * self_similar_profile(a, 1.0, 1.0, {x * sc}).values[0];
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    }
    // tail ~ |x|^{-1-a}
    const double p1 = self_similar_profile(a, 1.0, 1.0, {200.0}).values[0];
    const double p2 = self_similar_profile(a, 1.0, 1.0, {400.0}).values[0];
    CHECK(std::log(p2 / p1) / std::log(2.0) == doctest::Approx(-1.0 - a).epsilon(0.01));

    std::vector<double> x;
    for (double v = -30.0; v <= 30.0; v += 0.5) x.push_back(v);
    auto f = self_similar_profile(a, 1.0, 1.0, x);
    for (double v : f.values) CHECK(v > 0.0);
}
