#include "frackin/particles.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

#include "frackin/errors.hpp"

namespace frackin {

namespace {

constexpr int kBlendKnots = 2048;

double hermite(double t, double h, double v0, double v1, double d0, double d1) {
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * v0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * v1 +
           (t3 - t2) * h * d1;
}

}  // namespace

LampertiMap::LampertiMap(const CoefficientModel& m, double Y_max) : m_(&m), Y_(Y_max) {
    const auto& c = m.params();
    M0_ = c.M0;
    Mb_ = m.blend_end();
    if (!(Y_ > Mb_)) throw InputError("Y_max must exceed the blend end");
    sD0_ = std::sqrt(m.D(0.0));
    zM0_ = M0_ / sD0_;
    bz_.resize(kBlendKnots + 1);
    by_.resize(kBlendKnots + 1);
    bs_.resize(kBlendKnots + 1);
    const double h = (Mb_ - M0_) / kBlendKnots;
    auto f = [&m](double y) { return 1.0 / std::sqrt(m.D(y)); };
    bz_[0] = zM0_;
    for (int i = 0; i <= kBlendKnots; ++i) {
        by_[i] = M0_ + i * h;
        bs_[i] = std::sqrt(m.D(by_[i]));
        if (i > 0)
            bz_[i] = bz_[i - 1] +
                     boost::math::quadrature::gauss<double, 10>::integrate(f, by_[i - 1], by_[i]);
    }
    by_.back() = Mb_;
    zMb_ = bz_.back();
    p_ = 0.5 * (c.n_exp - 1.0);
    k_ = 1.0 / (std::sqrt(c.A1) * p_);
    zY_ = z_pos(Y_);
}

double LampertiMap::z_pos(double y) const {
    if (y <= M0_) return y / sD0_;
    if (y >= Mb_) return zMb_ + k_ * (std::pow(Mb_, -p_) - std::pow(y, -p_));
    const double h = (Mb_ - M0_) / kBlendKnots;
    const int i = std::min(kBlendKnots - 1, static_cast<int>((y - M0_) / h));
    const double t = (y - by_[i]) / h;
    return hermite(t, h, bz_[i], bz_[i + 1], 1.0 / bs_[i], 1.0 / bs_[i + 1]);
}

double LampertiMap::y_pos(double z) const {
    if (z <= zM0_) return z * sD0_;
    if (z >= zMb_) {
        const double base = std::pow(Mb_, -p_) - (z - zMb_) / k_;
        return base > 0.0 ? std::pow(base, -1.0 / p_) : Y_;
    }
    const auto it = std::upper_bound(bz_.begin(), bz_.end(), z);
    const int i = std::clamp(static_cast<int>(it - bz_.begin()) - 1, 0, kBlendKnots - 1);
    const double h = bz_[i + 1] - bz_[i];
    const double t = (z - bz_[i]) / h;
    return hermite(t, h, by_[i], by_[i + 1], bs_[i], bs_[i + 1]);
}

double LampertiMap::z_of_y(double y) const { return y < 0 ? -z_pos(-y) : z_pos(y); }
double LampertiMap::y_of_z(double z) const { return z < 0 ? -y_pos(-z) : y_pos(z); }

double LampertiMap::grad_log_target(double y) const {
    const double D = m_->D(y);
    return std::sqrt(D) * (m_->dQ0(y) / m_->Q0(y) + 0.5 * m_->dD(y) / D);
}

double LampertiMap::log_target(double y) const {
    return std::log(m_->Q0(y)) + 0.5 * std::log(m_->D(y));
}

Q0Sampler::Q0Sampler(const CoefficientModel& m, double Y, int knots) : m_(&m), Y_(Y) {
    if (knots < 2) throw InputError("sampler needs >= 2 knots");
    const auto& c = m.params();
    const double s = c.sigma, Mb = m.blend_end(), M0 = c.M0;
    lo_ = m.Q0_cdf(-Y);
    mass_ = m.Q0_cdf(Y) - lo_;
    const double F_mb = m.Q0_cdf(-Mb), F_m0 = m.Q0_cdf(-M0), F_p0 = m.Q0_cdf(M0),
                 F_pb = m.Q0_cdf(Mb);
    auto inv = [&](double F) {
        if (F <= F_mb) return -std::pow((s - 1.0) * F / c.c_minus, 1.0 / (1.0 - s));
        if (F >= F_pb) return std::pow((s - 1.0) * (1.0 - F) / c.c_plus, 1.0 / (1.0 - s));
        if (F >= F_m0 && F <= F_p0) return -M0 + (F - F_m0) / m.q0_interior_amplitude();
        const double a = F < F_m0 ? -Mb : M0, b = F < F_m0 ? -M0 : Mb;
        boost::uintmax_t it = 200;
        auto r = boost::math::tools::toms748_solve(
            [&](double y) { return m.Q0_cdf(y) - F; }, a, b,
            boost::math::tools::eps_tolerance<double>(50), it);
        return 0.5 * (r.first + r.second);
    };
    yk_.resize(knots + 1);
    for (int k = 0; k <= knots; ++k) yk_[k] = inv(lo_ + mass_ * k / knots);
    yk_.front() = -Y;
    yk_.back() = Y;
}

double Q0Sampler::quantile(double u) const {
    const int K = static_cast<int>(yk_.size()) - 1;
    const double p = std::clamp(u, 0.0, 1.0) * K;
    const int i = std::min(K - 1, static_cast<int>(p));
    const double t = p - i;
    return yk_[i] + t * (yk_[i + 1] - yk_[i]);
}

double Q0Sampler::cdf(double y) const {
    if (y <= -Y_) return 0.0;
    if (y >= Y_) return 1.0;
    return (m_->Q0_cdf(y) - lo_) / mass_;
}

ParticleSimulator::ParticleSimulator(const CoefficientModel& m, const ScalingContext& ctx,
                                     ParticleOptions opt)
    : m_(&m),
      ctx_(ctx),
      opt_(std::move(opt)),
      Y_(opt_.Y_max > 0.0 ? opt_.Y_max : default_Y_max(m, 1e-4)),
      map_(m, Y_),
      sampler_(m, Y_) {
    const auto& c = m.params();
    a_ = std::pow(ctx.eps, c.s_exp - 1.0 - ctx.mu);
    r_ = std::pow(ctx.eps, -1.0 - ctx.mu);
    c_ = std::pow(ctx.eps, -ctx.mu);
    if (opt_.lambda) {
        if (!(opt_.lambda_max > 0.0)) throw InputError("custom lambda needs lambda_max > 0");
        lmax_ = opt_.lambda_max;
    } else {
        lmax_ = m.lambda_max();
    }
    if (!(opt_.dt_sde > 0.0)) throw InputError("dt_sde must be positive");
    const double width = map_.z_hi() - map_.z_lo();
    cap_ = 0.1 * width;
    const double step = std::sqrt(2.0 * a_ * opt_.dt_sde);
    if (!opt_.freeze_y && step > cap_) {
        std::ostringstream os;
        os << "dt_sde too large: noise step " << step << " exceeds " << cap_
           << " in the Lamperti coordinate; need dt_sde <= " << cap_ * cap_ / (2.0 * a_);
        throw InputError(os.str());
    }
}

double ParticleSimulator::y_drift(double y) const {
    return a_ * (m_->dD(y) + m_->D(y) * m_->dQ0(y) / m_->Q0(y));
}

double ParticleSimulator::y_diffusion2(double y) const { return 2.0 * a_ * m_->D(y); }

double ParticleSimulator::lambda_at(double y) const {
    return opt_.lambda ? opt_.lambda(y) : m_->Lambda(y);
}

namespace {

double fold(double w, double lo, double hi) {
    const double L = hi - lo;
    double r = std::fmod(w - lo, 2.0 * L);
    if (r < 0.0) r += 2.0 * L;
    if (r > L) r = 2.0 * L - r;
    return lo + r;
}

// log of the reflected Gaussian proposal density at w, up to a shared constant
double log_proposal(double w, double mean, double s, double lo, double hi) {
    const double L = hi - lo;
    double acc = 0.0;
    for (int k = -1; k <= 1; ++k) {
        const double i1 = w + 2.0 * k * L, i2 = 2.0 * lo - w + 2.0 * k * L;
        acc += std::exp(-0.5 * std::pow((i1 - mean) / s, 2)) +
               std::exp(-0.5 * std::pow((i2 - mean) / s, 2));
    }
    return std::log(std::max(acc, 1e-300));
}

}  // namespace

double ParticleSimulator::mala_step(double z, CounterRng& rng, bool& accepted) const {
    const double h = opt_.dt_sde, lo = map_.z_lo(), hi = map_.z_hi();
    const double s = std::sqrt(2.0 * a_ * h);
    auto mean_at = [&](double y, double zz) {
        const double b = h * a_ * map_.grad_log_target(y);
        return zz + b / (1.0 + std::abs(b) / cap_);
    };
    const double y = map_.y_of_z(z);
    const double mz = mean_at(y, z);
    const double zp = fold(mz + s * rng.normal(), lo, hi);
    const double yp = map_.y_of_z(zp);
    const double mzp = mean_at(yp, zp);
    const double la = map_.log_target(yp) - map_.log_target(y) +
                      log_proposal(z, mzp, s, lo, hi) - log_proposal(zp, mz, s, lo, hi);
    accepted = std::log(rng.uniform()) < la;
    return accepted ? zp : z;
}

void ParticleSimulator::advance(Particle& p, CounterRng& rng, double t0, double T,
                                ParticleEnsemble& tally, std::vector<double>* log) const {
    const int dim = ctx_.dim;
    const double V0 = m_->params().V0;
    const double span = T - t0;
    const long nsteps = std::max(1L, static_cast<long>(std::ceil(span / opt_.dt_sde - 1e-9)));
    const double h = span / nsteps;
    const double rate = lmax_ * r_;
    double tc = t0 + rng.exponential(rate);
    double tx = t0;
    auto new_velocity = [&]() {
        if (dim == 1) {
            p.v = {rng.uniform() < 0.5 ? -V0 : V0, 0.0};
        } else {
            const double th = 2.0 * std::numbers::pi * rng.uniform();
            p.v = {V0 * std::cos(th), V0 * std::sin(th)};
        }
    };
    for (long k = 0; k < nsteps; ++k) {
        const double t_end = (k + 1 == nsteps) ? T : t0 + (k + 1) * h;
        const double lam = lambda_at(p.y);
        while (tc < t_end) {
            if (opt_.move_x) p.x += c_ * p.v[0] * (tc - tx);
            tx = tc;
            ++tally.candidates;
            if (rng.uniform() * lmax_ < lam) {
                ++tally.jumps;
                if (log) log->push_back(tc - p.run_start);
                p.run_start = tc;
                new_velocity();
            }
            tc += rng.exponential(rate);
        }
        if (opt_.move_x) p.x += c_ * p.v[0] * (t_end - tx);
        tx = t_end;
        if (opt_.move_x) {
            p.x = std::fmod(p.x, tally.L);
            if (p.x < 0.0) p.x += tally.L;
        }
        if (!opt_.freeze_y) {
            bool acc = false;
            p.z = mala_step(p.z, rng, acc);
            p.y = map_.y_of_z(p.z);
            ++tally.mala_proposed;
            if (acc) ++tally.mala_accepted;
        }
    }
}

ParticleEnsemble ParticleSimulator::init(const ParticleInit& in) const {
    if (in.N == 0) throw InputError("ensemble needs N > 0");
    if (!(in.L > 0.0)) throw InputError("box length must be positive");
    double amp = 0.0;
    for (auto [k, a] : in.rho0.modes) {
        if (k <= 0) throw InputError("profile modes must be positive integers");
        amp += std::abs(a);
    }
    if (!(in.rho0.mean > 0.0) || in.rho0.mean < amp) throw InputError("rho0 must be >= 0");
    if (in.y_mode == InitY::Fixed && std::abs(in.y_fixed) > Y_)
        throw InputError("fixed initial y outside [-Y_max, Y_max]");

    ParticleEnsemble e;
    e.seed = in.seed;
    e.L = in.L;
    e.ctx = ctx_;
    e.log_runs = in.log_runs;
    e.particles.resize(in.N);
    e.stream_pos.resize(in.N);
    const double L = in.L, mass = in.rho0.mean * L;
    auto cdf = [&](double x) {
        double v = in.rho0.mean * x;
        for (auto [k, a] : in.rho0.modes) {
            const double w = 2.0 * std::numbers::pi * k / L;
            v += a * std::sin(w * x) / w;
        }
        return v / mass;
    };
    const double V0 = m_->params().V0;
    for (std::size_t i = 0; i < in.N; ++i) {
        CounterRng rng(in.seed, i);
        Particle& p = e.particles[i];
        const double u = rng.uniform();
        if (in.rho0.modes.empty()) {
            p.x = u * L;
        } else {
            boost::uintmax_t it = 100;
            auto r = boost::math::tools::toms748_solve([&](double x) { return cdf(x) - u; }, 0.0,
                                                       L, boost::math::tools::eps_tolerance<double>(50), it);
            p.x = 0.5 * (r.first + r.second);
        }
        p.y = in.y_mode == InitY::Stationary ? sampler_.quantile(rng.uniform()) : in.y_fixed;
        p.z = map_.z_of_y(p.y);
        if (ctx_.dim == 1) {
            p.v = {rng.uniform() < 0.5 ? -V0 : V0, 0.0};
        } else {
            const double th = 2.0 * std::numbers::pi * rng.uniform();
            p.v = {V0 * std::cos(th), V0 * std::sin(th)};
        }
        p.run_start = 0.0;
        e.stream_pos[i] = rng.counter;
    }
    return e;
}

void ParticleSimulator::simulate(ParticleEnsemble& e, double T) const {
    if (!(T >= e.time)) throw InputError("simulate target time is before the ensemble time");
    if (T == e.time) return;
    const std::size_t N = e.particles.size();
    const int nt = std::max(1, std::min<int>(opt_.threads, static_cast<int>(N)));
    struct Block {
        ParticleEnsemble tally;
        std::vector<double> log;
    };
    std::vector<Block> blocks(nt);
    auto work = [&](int b) {
        const std::size_t lo = N * b / nt, hi = N * (b + 1) / nt;
        Block& B = blocks[b];
        B.tally.L = e.L;
        for (std::size_t i = lo; i < hi; ++i) {
            CounterRng rng(e.seed, i, e.stream_pos[i]);
            advance(e.particles[i], rng, e.time, T, B.tally, e.log_runs ? &B.log : nullptr);
            e.stream_pos[i] = rng.counter;
        }
    };
    if (nt == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int b = 0; b < nt; ++b) pool.emplace_back(work, b);
        for (auto& t : pool) t.join();
    }
    for (auto& B : blocks) {
        e.jumps += B.tally.jumps;
        e.candidates += B.tally.candidates;
        e.mala_accepted += B.tally.mala_accepted;
        e.mala_proposed += B.tally.mala_proposed;
        e.run_log.insert(e.run_log.end(), B.log.begin(), B.log.end());
    }
    e.time = T;
}

MacroField empirical_density(const ParticleEnsemble& e, int Nx) {
    if (Nx < 1) throw InputError("histogram needs Nx >= 1");
    MacroField f;
    f.L = e.L;
    f.label = "empirical";
    f.values.assign(Nx, 0.0);
    const double dx = e.L / Nx;
    for (const auto& p : e.particles) {
        double x = std::fmod(p.x, e.L);
        if (x < 0.0) x += e.L;
        const int i = std::min(Nx - 1, static_cast<int>(x / dx));
        f.values[i] += 1.0;
    }
    const double norm = 1.0 / (static_cast<double>(e.particles.size()) * dx);
    for (double& v : f.values) v *= norm;
    return f;
}

double mc_l1_error_bar(const MacroField& reference, std::size_t N) {
    double acc = 0.0;
    const double dx = reference.dx();
    for (double r : reference.values) {
        const double p = std::clamp(r * dx, 0.0, 1.0);
        acc += std::sqrt(2.0 * p * (1.0 - p) / (std::numbers::pi * static_cast<double>(N)));
    }
    return acc;
}

namespace {

double hill_top(std::vector<double>& x, std::size_t k) {
    std::nth_element(x.begin(), x.begin() + k, x.end(), std::greater<double>());
    const double thr = x[k];
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) s += std::log(x[i] / thr);
    return static_cast<double>(k) / s;
}

}  // namespace

double hill_estimate(std::vector<double> samples, std::size_t k) {
    if (k < 2 || k >= samples.size()) throw InputError("Hill estimator needs 2 <= k < m");
    for (double v : samples)
        if (!(v > 0.0)) throw InputError("Hill estimator needs positive samples");
    return hill_top(samples, k);
}

TailEstimate run_tail_estimate(const std::vector<double>& run_log, double k_fraction,
                               std::uint64_t seed, int bootstrap) {
    const std::size_t m = run_log.size();
    if (m < 1000) {
        std::ostringstream os;
        os << "tail estimate needs at least 1000 runs, got " << m;
        throw InputError(os.str());
    }
    if (!(k_fraction > 0.0) || k_fraction >= 1.0) throw InputError("k_fraction must be in (0,1)");
    TailEstimate t;
    t.k = std::max<std::size_t>(10, static_cast<std::size_t>(k_fraction * m));
    t.exponent = hill_estimate(run_log, t.k);
    t.exponent_small_k = hill_estimate(run_log, std::max<std::size_t>(5, t.k / 4));
    std::vector<double> boot;
    std::vector<double> res(m);
    for (int b = 0; b < bootstrap; ++b) {
        CounterRng rng(seed, static_cast<std::uint64_t>(b));
        for (std::size_t i = 0; i < m; ++i) res[i] = run_log[rng() % m];
        boot.push_back(hill_top(res, t.k));
    }
    std::sort(boot.begin(), boot.end());
    if (!boot.empty()) {
        t.ci_lo = boot[static_cast<std::size_t>(0.025 * (boot.size() - 1))];
        t.ci_hi = boot[static_cast<std::size_t>(0.975 * (boot.size() - 1))];
    }
    // a power law gives a flat Hill plot; light tails make it climb as k shrinks
    t.heavy_tail = t.exponent_small_k <= 1.15 * t.exponent;
    t.note = t.heavy_tail ? "heavy tail" : "no heavy tail";
    return t;
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw InputError("KS statistic needs samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double F = cdf(samples[i]);
        d = std::max({d, F - i / n, (i + 1) / n - F});
    }
    return d;
}

}  // namespace frackin
