#include "frackin/special_integrals.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <sstream>

#include "frackin/errors.hpp"

namespace frackin {

namespace {

using boost::math::constants::pi;
namespace bq = boost::math::quadrature;

void check_pole2(double alpha, double beta1) {
    if (!(beta1 > 0.0)) throw DomainError("lemma integral requires beta1 > 0");
    if (!(alpha + 1.0 > 0.0)) throw DomainError("lemma integral requires 0 < alpha+1");
    if (!(alpha + 1.0 < 2.0 * beta1))
        throw DomainError("lemma integral requires alpha+1 < 2*beta1");
}

void check_pole1(double alpha, double beta2) {
    if (!(beta2 > 0.0)) throw DomainError("lemma integral requires beta2 > 0");
    if (!(alpha + 1.0 > 0.0)) throw DomainError("lemma integral requires 0 < alpha+1");
    if (!(alpha + 1.0 < beta2)) throw DomainError("lemma integral requires alpha+1 < beta2");
}

void check_scale(double a) {
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("lemma integral requires a > 0");
}

// Integrable endpoint singularities at 0 on [0,1].
QuadResult unit_tanh_sinh(const std::function<double(double)>& f) {
    bq::tanh_sinh<double> ts(15);
    QuadResult r;
    double l1 = 0.0;
    r.value = ts.integrate(f, 0.0, 1.0, 1e-15, &r.error, &l1);
    r.converged = r.error <= 1e-11 * std::max(l1, 1e-300);
    return r;
}

QuadResult sum(const QuadResult& a, const QuadResult& b) {
    return {a.value + b.value, a.error + b.error, a.converged && b.converged};
}

}  // namespace

double c1_closed(double alpha, double beta1) {
    check_pole2(alpha, beta1);
    const double p = (alpha + 1.0) / beta1;
    return pi<double>() / (2.0 * beta1 * std::sin(pi<double>() * p / 2.0));
}

double c2_closed(double alpha, double beta2) {
    check_pole1(alpha, beta2);
    const double p = (alpha + 1.0) / beta2;
    return boost::math::beta(p / 2.0, (1.0 - p) / 2.0) / (2.0 * beta2);
}

QuadResult c1_quadrature(double alpha, double beta1) {
    check_pole2(alpha, beta1);
    const double p = (alpha + 1.0) / beta1;
    // z in [0,1] directly, z = 1/w on [1,inf)
    auto lo = unit_tanh_sinh([p](double z) { return std::pow(z, p - 1.0) / (1.0 + z * z); });
    auto hi = unit_tanh_sinh([p](double w) { return std::pow(w, 1.0 - p) / (1.0 + w * w); });
    auto r = sum(lo, hi);
    r.value /= beta1;
    r.error /= beta1;
    return r;
}

QuadResult c2_quadrature(double alpha, double beta2) {
    check_pole1(alpha, beta2);
    const double p = (alpha + 1.0) / beta2;
    auto lo = unit_tanh_sinh(
        [p](double z) { return std::pow(z, p - 1.0) / std::sqrt(1.0 + z * z); });
    auto hi = unit_tanh_sinh(
        [p](double w) { return std::pow(w, -p) / std::sqrt(1.0 + w * w); });
    auto r = sum(lo, hi);
    r.value /= beta2;
    r.error /= beta2;
    return r;
}

double lemma_integral_pole2(double alpha, double beta1, double a) {
    check_scale(a);
    return c1_closed(alpha, beta1) * std::pow(a, -(alpha + 1.0) / beta1);
}

double lemma_integral_pole1(double alpha, double beta2, double a) {
    check_scale(a);
    return c2_closed(alpha, beta2) * std::pow(a, -(alpha + 1.0) / beta2);
}

namespace {

QuadResult direct_y(const std::function<double(double)>& f, double y0) {
    bq::tanh_sinh<double> ts(15);
    bq::exp_sinh<double> es(12);
    QuadResult lo, hi;
    double l1 = 0.0;
    lo.value = ts.integrate(f, 0.0, y0, 1e-15, &lo.error, &l1);
    lo.converged = lo.error <= 1e-10 * std::max(l1, 1e-300);
    hi.value = es.integrate(f, y0, std::numeric_limits<double>::infinity(), 1e-15, &hi.error,
                            &l1);
    hi.converged = hi.error <= 1e-10 * std::max(l1, 1e-300);
    return sum(lo, hi);
}

}  // namespace

QuadResult lemma_integral_pole2_direct(double alpha, double beta1, double a) {
    check_pole2(alpha, beta1);
    check_scale(a);
    auto f = [=](double y) {
        const double lt = std::log(a) + beta1 * std::log(y);
        if (lt > 300.0) return std::exp(alpha * std::log(y) - 2.0 * lt);
        const double t = std::exp(lt);
        return std::pow(y, alpha) / (1.0 + t * t);
    };
    return direct_y(f, std::pow(a, -1.0 / beta1));
}

QuadResult lemma_integral_pole1_direct(double alpha, double beta2, double a) {
    check_pole1(alpha, beta2);
    check_scale(a);
    auto f = [=](double y) {
        const double lt = std::log(a) + beta2 * std::log(y);
        if (lt > 300.0) return std::exp(alpha * std::log(y) - lt);
        const double t = std::exp(lt);
        return std::pow(y, alpha) / std::sqrt(1.0 + t * t);
    };
    return direct_y(f, std::pow(a, -1.0 / beta2));
}

SphereQuadrature build_sphere_quadrature(int dim, double V0, int order) {
    if (!(V0 > 0.0) || !std::isfinite(V0)) throw InputError("sphere quadrature needs V0 > 0");
    if (order < 2) throw InputError("sphere quadrature order must be >= 2");
    if (order % 2 != 0)
        throw InputError("sphere quadrature order must be even (antipodal symmetry)");
    SphereQuadrature q;
    q.dim = dim;
    q.V0 = V0;
    if (dim == 1) {
        q.nodes = {{-V0, 0.0}, {V0, 0.0}};
        q.weights = {0.5, 0.5};
        return q;
    }
    if (dim != 2) throw InputError("sphere quadrature supports dim 1 or 2");

    const int half = order / 2;
    const double PI = pi<double>();
    std::vector<double> theta(half), w(half);
    double wsum = 0.0;
    for (int k = 0; k < half; ++k) {
        const double t = (k + 0.5) / half;
        const double S = t - 2.0 / (3.0 * PI) * std::sin(2.0 * PI * t) +
                         1.0 / (12.0 * PI) * std::sin(4.0 * PI * t);
        const double s = std::sin(PI * t);
        theta[k] = -PI / 2.0 + PI * S;
        w[k] = (8.0 / 3.0) * s * s * s * s;
        wsum += w[k];
    }
    q.nodes.resize(order);
    q.weights.resize(order);
    for (int k = 0; k < half; ++k) {
        const double c = V0 * std::cos(theta[k]);
        const double sn = V0 * std::sin(theta[k]);
        const double wk = 0.5 * w[k] / wsum;
        q.nodes[k] = {c, sn};
        q.nodes[k + half] = {-c, -sn};
        q.weights[k] = wk;
        q.weights[k + half] = wk;
    }
    return q;
}

double sphere_abs_moment(int dim, double p) {
    if (dim == 1) return 1.0;
    if (dim == 2)
        return std::tgamma((p + 1.0) / 2.0) /
               (std::sqrt(pi<double>()) * std::tgamma(p / 2.0 + 1.0));
    throw InputError("sphere moment supports dim 1 or 2");
}

QuadResult integrate_gk(const std::function<double(double)>& f, double a, double b,
                        double rel_tol) {
    QuadResult r;
    if (a == b) return r;
    double l1 = 0.0;
    // tolerances below ~1e-12 only chase roundoff and exhaust the depth
    rel_tol = std::max(rel_tol, 1e-12);
    r.value = bq::gauss_kronrod<double, 31>::integrate(f, a, b, 12, rel_tol, &r.error, &l1);
    // boost error estimates are conservative on short panels; flag only gross failure
    r.converged = r.error <= std::max(1e3 * rel_tol, 1e-6) * std::max(l1, 1e-300);
    return r;
}

QuadResult improper_fat_tail_integral(const std::function<double(double)>& f, double a,
                                      double tail_exponent, double y_cut, double rel_tol) {
    if (!(tail_exponent > 1.0)) {
        const double inf = std::numeric_limits<double>::infinity();
        return {inf, inf, false};
    }
    QuadResult total;
    double lo = a;
    if (lo < 1.0) {
        total = integrate_gk(f, lo, 1.0, rel_tol);
        lo = 1.0;
    }
    if (y_cut <= lo) y_cut = 1e3 * lo;
    while (lo < y_cut) {
        const double hi = std::min(4.0 * lo, y_cut);
        total = sum(total, integrate_gk(f, lo, hi, rel_tol));
        lo = hi;
    }
    bq::tanh_sinh<double> ts(15);
    QuadResult tail;
    double l1 = 0.0;
    // beyond y_far, continue f with its declared power law so callers never see overflow
    const double y_far = 1e150, f_far = f(y_far);
    auto g = [&](double u) {
        const double y = 1.0 / u;
        if (!(u > 0.0) || !std::isfinite(y)) return 0.0;
        if (y > y_far) return f_far * std::pow(y / y_far, 2.0 - tail_exponent) * y_far * y_far;
        return (f(y) * y) * y;
    };
    // on [0,1] in t = u*y_cut; tanh_sinh error estimates degrade on tiny intervals
    auto gt = [&](double t) { return g(t / y_cut) / y_cut; };
    tail.value = ts.integrate(gt, 0.0, 1.0, rel_tol, &tail.error, &l1);
    tail.converged = tail.error <= 10.0 * rel_tol * std::max(l1, 1e-300) || tail.error < 1e-300;
    return sum(total, tail);
}

}  // namespace frackin
