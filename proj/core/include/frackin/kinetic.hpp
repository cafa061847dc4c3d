#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "frackin/coefficients.hpp"
#include "frackin/special_integrals.hpp"

namespace frackin {

struct MacroField {
    std::vector<double> values;
    double L = 0.0;
    std::string label;

    int Nx() const { return static_cast<int>(values.size()); }
    double dx() const { return L / values.size(); }
    double x(int i) const { return (i + 0.5) * dx(); }
    double integral() const;
};

double l1_distance(const MacroField& a, const MacroField& b);
double l2_distance(const MacroField& a, const MacroField& b);

// 1 + sum_k amp_k cos(2 pi k x / L), sampled at cell centres.
struct CosineProfile {
    double mean = 1.0;
    std::vector<std::pair<int, double>> modes;  // (k, amplitude)
};
MacroField sample_profile(const CosineProfile& p, double L, int Nx, std::string label = "rho0");

enum class TransportScheme { Upwind, Muscl };

struct GridOptions {
    double L = 6.283185307179586;
    int Nx = 128;
    int Ny = 160;
    double Y_max = 0.0;      // 0: tail mass of Q0 beyond Y_max below tail_mass
    double tail_mass = 1e-4;
    double dt = 0.0;         // 0: largest stable step for the chosen cfl
    double cfl = 1.0;
    int v_order = 16;        // directions for dim=2
    double cells_per_band = 3.0;
    double y_scale_min = 0.25;
    TransportScheme scheme = TransportScheme::Upwind;
};

struct PhaseGrid {
    double L = 0.0;
    int Nx = 0;
    double dx = 0.0;
    SphereQuadrature vq;
    std::vector<double> yf;  // Ny+1 faces
    std::vector<double> yc;  // Ny centres
    std::vector<double> h;   // Ny widths
    double Y_max = 0.0;
    double dt = 0.0;

    int Ny() const { return static_cast<int>(yc.size()); }
    int Nv() const { return static_cast<int>(vq.size()); }
    std::size_t size() const { return std::size_t(Nx) * Nv() * Ny(); }
    std::size_t index(int ix, int iv, int iy) const {
        return (std::size_t(ix) * Nv() + iv) * Ny() + iy;
    }
};

double default_Y_max(const CoefficientModel& m, double tail_mass);
PhaseGrid make_phase_grid(const CoefficientModel& m, const ScalingContext& ctx,
                          const GridOptions& opt);

struct KineticState {
    std::vector<double> q;  // row-major (x, v, y)
    double time = 0.0;
    double B = 0.0;         // initial-data bound
    ScalingContext ctx;
};

struct EntropyBudget {
    double dE = 0.0;           // half the change of int q^2/Q0
    double diss_y = 0.0;       // eps^{s-1-mu} int D Q0 (d_y(q/Q0))^2, step-averaged rate
    double diss_lambda = 0.0;  // eps^{-1-mu} int Lambda (q-<q>)^2/Q0, step-averaged rate
};

struct SolverOptions {
    bool transport = true;
    bool y_diffusion = true;
    bool relaxation = true;
    int threads = 1;
};

class KineticSolver {
public:
    KineticSolver(const CoefficientModel& model, const ScalingContext& ctx, PhaseGrid grid,
                  SolverOptions opt = {}, TransportScheme scheme = TransportScheme::Upwind);

    const PhaseGrid& grid() const { return grid_; }
    const ScalingContext& ctx() const { return ctx_; }
    double dt() const { return grid_.dt; }

    // Discrete per-cell data.
    const std::vector<double>& Q0() const { return q0_; }      // sum h Q0 = 1
    const std::vector<double>& chi() const { return chi_; }    // chi0 at centres
    const std::vector<double>& kappa() const { return kap_; }  // Ny-1 face coefficients
    const std::vector<double>& lambda() const { return lam_; }
    double B0_discrete() const { return B0h_; }
    double C_discrete() const;  // (sum 1/kappa)^{1/2}

    double y_coef() const { return a_; }      // eps^{s-1-mu}
    double relax_coef() const { return r_; }  // eps^{-1-mu}
    double speed_coef() const { return c_; }  // eps^{-mu}
    double noise_exponent() const { return s_exp_; }

    KineticState init_state(const MacroField& rho0) const;
    void step(KineticState& s) const;

    void relax(KineticState& s, double tau) const;
    void diffuse_y(KineticState& s, double tau) const;
    void transport(KineticState& s, double tau) const;

    MacroField weighted_density(const KineticState& s) const;
    MacroField plain_density(const KineticState& s) const;
    double relative_entropy(const KineticState& s) const;
    double total_mass(const KineticState& s) const;
    double total_weighted_mass(const KineticState& s) const;

    // Raw (coefficient-free) dissipation integrals at one instant.
    double y_dissipation_raw(const KineticState& s) const;
    double lambda_dissipation_raw(const KineticState& s) const;
    // Step-averaged raw rates between two states, log-mean per phase point.
    std::pair<double, double> averaged_dissipation_raw(const KineticState& a,
                                                       const KineticState& b) const;
    EntropyBudget entropy_budget(const KineticState& before, const KineticState& after,
                                 double dt) const;

private:
    void for_fibers(int n, const std::function<void(int, int)>& body) const;
    void transport_row(std::vector<double>& row, std::vector<double>& tmp, double c) const;

    PhaseGrid grid_;
    ScalingContext ctx_;
    SolverOptions opt_;
    TransportScheme scheme_;
    std::vector<double> q0_, chi_, kap_, lam_, m_;
    double B0h_ = 0.0;
    double a_ = 0.0, r_ = 0.0, c_ = 0.0, s_exp_ = 0.0;
};

}  // namespace frackin
