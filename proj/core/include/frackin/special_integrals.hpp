#pragma once

#include <array>
#include <functional>
#include <vector>

namespace frackin {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    bool converged = true;
};

// Mellin constants of the two scaling integrals.
//   c1 = (1/b1) * int_0^inf z^{p-1}/(1+z^2) dz,        p = (alpha+1)/b1 in (0,2)
//   c2 = (1/b2) * int_0^inf z^{p-1}/sqrt(1+z^2) dz,    p = (alpha+1)/b2 in (0,1)
double c1_closed(double alpha, double beta1);
double c2_closed(double alpha, double beta2);
QuadResult c1_quadrature(double alpha, double beta1);
QuadResult c2_quadrature(double alpha, double beta2);

// int_{-inf}^0 |y|^alpha / (1 + (a|y|^b1)^2) dy = c1 * a^{-(alpha+1)/b1}
double lemma_integral_pole2(double alpha, double beta1, double a);
// int_{-inf}^0 |y|^alpha / sqrt(1 + (a|y|^b2)^2) dy = c2 * a^{-(alpha+1)/b2}
double lemma_integral_pole1(double alpha, double beta2, double a);

// Same integrals evaluated by quadrature in y, without the Mellin substitution.
QuadResult lemma_integral_pole2_direct(double alpha, double beta1, double a);
QuadResult lemma_integral_pole1_direct(double alpha, double beta2, double a);

struct SphereQuadrature {
    int dim = 1;
    double V0 = 1.0;
    std::vector<std::array<double, 2>> nodes;
    std::vector<double> weights;

    std::size_t size() const { return weights.size(); }
    // First component, the direction along which x varies.
    double v1(std::size_t k) const { return nodes[k][0]; }
};

// dim=1: {-V0, +V0}. dim=2: `order` directions, antipodally paired, with a
// periodised sin^4 substitution per half circle so |cos|^p moments converge fast.
SphereQuadrature build_sphere_quadrature(int dim, double V0, int order);

// Exact normalised moment  int_V |v1/V0|^p dv.
double sphere_abs_moment(int dim, double p);

// Adaptive Gauss-Kronrod on [a,b].
QuadResult integrate_gk(const std::function<double(double)>& f, double a, double b,
                        double rel_tol = 1e-12);

// int_a^inf f(y) dy for f ~ y^{-tail_exponent}. Geometric panels up to y_cut,
// then u = 1/y on the remainder. tail_exponent <= 1 is reported as divergent.
QuadResult improper_fat_tail_integral(const std::function<double(double)>& f, double a,
                                      double tail_exponent, double y_cut = 0.0,
                                      double rel_tol = 1e-10);

}  // namespace frackin
