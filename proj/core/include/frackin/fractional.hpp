#pragma once

#include <vector>

#include "frackin/kinetic.hpp"

namespace frackin {

struct FractionalProblem {
    double nu = 1.0;
    double order = 1.75;  // 1+mu
    MacroField rho0;
};

// Periodic multiplier solve: hat rho_k(t) = hat rho_k(0) exp(-nu |xi_k|^order t).
MacroField fractional_solve(const FractionalProblem& p, double t);

// Whole-line fundamental solution of d_t + nu (-Delta)^{order/2} sampled at x.
MacroField self_similar_profile(double order, double nu, double t, const std::vector<double>& x);

// Single mode decay factor exp(-nu (2 pi k / L)^order t).
double mode_decay(double nu, double order, double L, int k, double t);

}  // namespace frackin
