#pragma once

#include "frackin/coefficients.hpp"

inline frackin::CoefficientSet reference_set() {
    frackin::CoefficientSet c;
    c.sigma = 1.5;
    c.beta = 2.0;
    c.gamma = 2.0;
    c.n_exp = 2.5;
    c.s_exp = 1.3;
    c.M0 = 2.0;
    c.c_plus = 0.2;
    c.c_minus = 0.2;
    c.A0 = 1.0;
    c.A1 = 1.0;
    c.V0 = 1.0;
    c.interior_blend_width = 0.5;
    c.lambda_plateau = 1.25;
    return c;
}
