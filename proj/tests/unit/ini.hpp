#pragma once

#include <string>

inline std::string reference_ini() {
    return R"([coefficients]
sigma = 1.5
beta = 2
gamma = 2
n_exp = 2.5
s_exp = 1.3
M0 = 2
c_plus = 0.2
c_minus = 0.2
A0 = 1
A1 = 1
V0 = 1
lambda_plateau = 1.25
interior_blend_width = 0.5

[scaling]
eps = 0.2, 0.1, 0.05
dim = 1

[grid]
Nx = 32
Ny = 64

[run]
T = 0.05
seed = 42

[experiment]
id = E1
rho0_modes = 1:0.5
)";
}
