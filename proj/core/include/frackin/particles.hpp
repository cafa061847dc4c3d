#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "frackin/coefficients.hpp"
#include "frackin/kinetic.hpp"
#include "frackin/rng.hpp"

namespace frackin {

// z = int_0^y D^{-1/2}: internal state coordinate with constant noise.
class LampertiMap {
public:
    LampertiMap(const CoefficientModel& m, double Y_max);

    double z_of_y(double y) const;
    double y_of_z(double z) const;
    double z_lo() const { return -zY_; }
    double z_hi() const { return zY_; }
    double Y_max() const { return Y_; }
    // d/dz log(Q0 sqrt D) at y(z)
    double grad_log_target(double y) const;
    double log_target(double y) const;

private:
    double z_pos(double y) const;  // y >= 0
    double y_pos(double z) const;  // z >= 0

    const CoefficientModel* m_;
    double Y_ = 0.0, M0_ = 0.0, Mb_ = 0.0, sD0_ = 0.0, zM0_ = 0.0, zMb_ = 0.0, zY_ = 0.0;
    double k_ = 0.0, p_ = 0.0;  // tail: z = zMb + k (Mb^-p - y^-p)
    // Hermite table of y(z) on the blend
    std::vector<double> bz_, by_, bs_;
};

struct Particle {
    double x = 0.0;
    std::array<double, 2> v{0.0, 0.0};
    double y = 0.0;
    double z = 0.0;
    double run_start = 0.0;
};

struct ParticleEnsemble {
    std::vector<Particle> particles;
    std::vector<std::uint64_t> stream_pos;  // per-particle counter
    std::uint64_t seed = 0;
    double time = 0.0;
    double L = 0.0;
    ScalingContext ctx;
    bool log_runs = false;
    std::vector<double> run_log;  // completed runs, macroscopic time
    long jumps = 0;
    long candidates = 0;
    long mala_accepted = 0;
    long mala_proposed = 0;
};

enum class InitY { Stationary, Fixed };

struct ParticleInit {
    std::size_t N = 0;
    std::uint64_t seed = 0;
    double L = 6.283185307179586;
    CosineProfile rho0{1.0, {}};
    InitY y_mode = InitY::Stationary;
    double y_fixed = 0.0;
    bool log_runs = false;
};

struct ParticleOptions {
    double dt_sde = 1e-3;
    double Y_max = 0.0;  // 0: same default as the kinetic grid
    int threads = 1;
    bool freeze_y = false;
    bool move_x = true;
    // Optional replacement for Lambda(y) with its bound.
    std::function<double(double)> lambda;
    double lambda_max = 0.0;
};

// Inverse CDF of Q0 restricted to [-Y, Y], 10^4 monotone linear pieces.
class Q0Sampler {
public:
    Q0Sampler(const CoefficientModel& m, double Y, int knots = 10000);
    double quantile(double u) const;
    double cdf(double y) const;  // restricted, normalized

private:
    const CoefficientModel* m_;
    double Y_, lo_, mass_;
    std::vector<double> yk_;
};

class ParticleSimulator {
public:
    ParticleSimulator(const CoefficientModel& m, const ScalingContext& ctx, ParticleOptions opt);

    ParticleEnsemble init(const ParticleInit& in) const;
    void simulate(ParticleEnsemble& e, double T) const;

    const LampertiMap& lamperti() const { return map_; }
    const Q0Sampler& sampler() const { return sampler_; }
    double Y_max() const { return Y_; }
    double y_coef() const { return a_; }
    double rate_coef() const { return r_; }
    double speed_coef() const { return c_; }
    double lambda_max() const { return lmax_; }

    // Itô drift and squared diffusion of y in macroscopic time.
    double y_drift(double y) const;
    double y_diffusion2(double y) const;

private:
    void advance(Particle& p, CounterRng& rng, double t0, double T, ParticleEnsemble& tally,
                 std::vector<double>* log) const;
    double mala_step(double z, CounterRng& rng, bool& accepted) const;
    double lambda_at(double y) const;

    const CoefficientModel* m_;
    ScalingContext ctx_;
    ParticleOptions opt_;
    double Y_;
    LampertiMap map_;
    Q0Sampler sampler_;
    double a_, r_, c_, lmax_, cap_;
};

MacroField empirical_density(const ParticleEnsemble& e, int Nx);

// Sum over bins of E|p_hat - p| for multinomial counts, density units.
double mc_l1_error_bar(const MacroField& reference, std::size_t N);

struct TailEstimate {
    double exponent = 0.0;
    double ci_lo = 0.0, ci_hi = 0.0;
    std::size_t k = 0;
    double exponent_small_k = 0.0;  // at k/4
    bool heavy_tail = true;
    std::string note;
};

double hill_estimate(std::vector<double> samples, std::size_t k);
TailEstimate run_tail_estimate(const std::vector<double>& run_log, double k_fraction,
                               std::uint64_t seed = 1, int bootstrap = 200);

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

}  // namespace frackin
