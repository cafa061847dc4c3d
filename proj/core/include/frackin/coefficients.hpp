#pragma once

#include <span>
#include <string>
#include <vector>

namespace frackin {

struct CoefficientSet {
    double sigma = 0.0;   // Q0 tail exponent
    double beta = 0.0;    // Lambda tail exponent at y -> -inf
    double gamma = 0.0;   // decay bound exponent of Lambda' for y > M0
    double n_exp = 0.0;   // D ~ A1 |y|^{n+1}
    double s_exp = 0.0;   // noise strength exponent
    double M0 = 0.0;
    double c_plus = 0.0;
    double c_minus = 0.0;
    double A0 = 0.0;
    double A1 = 0.0;
    double V0 = 0.0;
    double interior_blend_width = 0.5;
    double lambda_plateau = 0.0;  // value of Lambda on y >= -M0
};

struct Violation {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct ValidationReport {
    bool ok = true;
    std::vector<Violation> violated;

    bool has(const std::string& name) const;
    std::string table() const;
};

// Throws InputError for non-finite or non-positive structural fields.
ValidationReport validate_parameters(const CoefficientSet& c);

double compute_mu(const CoefficientSet& c);
bool mu_in_open_interval(double mu);

// Evaluated coefficient family. Solves the Q0 interior amplitude and caches chi0
// knots and B0 on construction; immutable afterwards.
class CoefficientModel {
public:
    explicit CoefficientModel(const CoefficientSet& c);

    const CoefficientSet& params() const { return c_; }
    double q0_interior_amplitude() const { return A_; }
    double blend_end() const { return c_.M0 + c_.interior_blend_width; }

    double Q0(double y) const;
    double Lambda(double y) const;
    double D(double y) const;
    double dQ0(double y) const;
    double dLambda(double y) const;
    double dD(double y) const;

    void Q0(std::span<const double> y, std::span<double> out) const;
    void Lambda(std::span<const double> y, std::span<double> out) const;
    void D(std::span<const double> y, std::span<double> out) const;

    double chi0(double y) const;
    double chi0_inf() const { return chi_inf_; }
    double C_minus() const;
    double B0() const { return B0_; }
    double lambda_max() const { return lambda_max_; }

    // Mass of Q0 on (-inf, y].
    double Q0_cdf(double y) const;

private:
    double blend(double a, double v0, double v1, double d1) const;
    double dblend(double a, double v0, double v1, double d1) const;
    double q0_tail_amp(double y) const { return y > 0 ? c_.c_plus : c_.c_minus; }

    CoefficientSet c_;
    double A_ = 0.0;
    double chi_knots_[4] = {0, 0, 0, 0};  // chi0 at -Mb, -M0, M0, Mb
    double cdf_knots_[4] = {0, 0, 0, 0};
    double chi_inf_ = 0.0;
    double B0_ = 0.0;
    double lambda_max_ = 0.0;
};

double eval_Q0(const CoefficientModel& m, double y);
double eval_Lambda(const CoefficientModel& m, double y);
double eval_D(const CoefficientModel& m, double y);
double eval_chi0(const CoefficientModel& m, double y);
double compute_B0(const CoefficientModel& m);
// Closed-form assembly; c1 is cross-checked against quadrature on every call.
double compute_nu(const CoefficientModel& m, int dim);

struct ScalingContext {
    double eps = 1.0;
    double mu = 0.0;
    double nu = 0.0;
    double B0 = 0.0;
    double C_minus = 0.0;
    int dim = 1;
};

ScalingContext make_scaling_context(const CoefficientModel& m, double eps, int dim);

// Pre-limit multiplier  eps^{-mu} int_V int (xi.v)^2 eps chi0 Lambda Q0 /((eps xi.v)^2+Lambda^2)
// divided by B0 |xi|^{1+mu}, restricted to y in (-inf, y_hi].
double prelimit_nu(const CoefficientModel& m, double eps, double xi, int dim,
                   double y_hi = 1e300);

// Two-point Richardson extrapolation with correction exponent 1-mu.
double extrapolate_nu(double eps1, double nu1, double eps2, double nu2, double mu);

}  // namespace frackin
