#pragma once

#include <complex>
#include <string>
#include <vector>

#include "frackin/kinetic.hpp"

namespace frackin {

struct BoundReport {
    std::string name;
    double measured = 0.0;
    double budget = 0.0;
    double slack = 1.2;
    bool pass = true;
    std::string details;
};

// Accumulates per-step quantities of one run; feed consecutive states.
class AprioriTracker {
public:
    explicit AprioriTracker(const KineticSolver& solver) : s_(&solver) {}

    void start(const KineticState& s0);
    void observe(const KineticState& before, const KineticState& after);

    double B() const { return B_; }
    double sup_ratio() const { return sup_ratio_; }
    double min_value() const { return min_q_; }
    double max_entropy() const { return max_E_; }
    double max_mass() const { return max_mass_; }
    double cum_y_raw() const { return cum_y_; }
    double cum_lambda_raw() const { return cum_l_; }
    bool entropy_monotone() const { return monotone_; }
    double max_entropy_increase() const { return max_rise_; }
    double max_mass_drift() const { return max_mass_drift_; }
    double weighted_mass_drift() const { return wdrift_; }
    int steps() const { return steps_; }

private:
    void sample(const KineticState& s);

    const KineticSolver* s_;
    double B_ = 0.0, sup_ratio_ = 0.0, min_q_ = 0.0, max_E_ = 0.0, max_mass_ = 0.0;
    double cum_y_ = 0.0, cum_l_ = 0.0, last_E_ = 0.0, max_rise_ = 0.0;
    double mass0_ = 0.0, wmass0_ = 0.0, last_mass_ = 0.0, max_mass_drift_ = 0.0, wdrift_ = 0.0;
    bool monotone_ = true;
    int steps_ = 0;
};

// Five reports: sup bound, entropy, mass, cumulative y- and Lambda-dissipation.
std::vector<BoundReport> check_apriori(const KineticSolver& solver, const AprioriTracker& t,
                                       double slack = 1.2);
std::vector<BoundReport> check_apriori(const KineticSolver& solver,
                                       const std::vector<KineticState>& states,
                                       double slack = 1.2);

struct DeviationReport {
    double lhs_max = 0.0;    // max |q/Q0 - R|
    double ratio_max = 0.0;  // max lhs / (C sqrt(H)) where H > 0
    long violations = 0;
    double C = 0.0;          // discrete (sum 1/kappa)^{1/2}
    double slack = 1.1;
};

DeviationReport deviation_bound_probe(const KineticSolver& solver, const KineticState& s,
                                      double slack = 1.1);

struct FluxTerms {
    int k = 0;
    double xi = 0.0;
    std::complex<double> rho_hat, div_J, main, RJ, J2, J3, leak;
    double nu_recovered = 0.0;  // main / (rho_hat |xi|^{1+mu} B0)
    double closure = 0.0;       // |div_J - (main+RJ+J2+J3)| / |div_J|
};

struct FluxProbe {
    std::vector<FluxTerms> modes;
    double nyquist_fraction = 0.0;
    bool under_resolved = false;
};

// prev and next bracket s by one step each; they feed the time derivative in J3.
FluxProbe flux_decomposition_probe(const KineticSolver& solver, const KineticState& prev,
                                   const KineticState& s, const KineticState& next,
                                   const std::vector<int>& modes);

struct ConvergenceRow {
    double eps = 0.0;
    double error = 0.0;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    double slope = 0.0;
    bool slope_defined = false;
    bool monotone = false;
    std::string verdict;
};

// Rows sorted by decreasing eps; verdict "monotone decreasing", "not monotone",
// "insufficient" (< 3 rows) or "degenerate" (zero errors).
ConvergenceTable convergence_table(std::vector<ConvergenceRow> rows);

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

std::string format_reports(const std::vector<BoundReport>& r);

}  // namespace frackin
