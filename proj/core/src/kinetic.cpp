#include "frackin/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

#include "frackin/errors.hpp"

namespace frackin {

double MacroField::integral() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s * dx();
}

double l1_distance(const MacroField& a, const MacroField& b) {
    if (a.values.size() != b.values.size()) throw InputError("field sizes differ");
    double s = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) s += std::abs(a.values[i] - b.values[i]);
    return s * a.dx();
}

double l2_distance(const MacroField& a, const MacroField& b) {
    if (a.values.size() != b.values.size()) throw InputError("field sizes differ");
    double s = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        const double d = a.values[i] - b.values[i];
        s += d * d;
    }
    return std::sqrt(s * a.dx());
}

MacroField sample_profile(const CosineProfile& p, double L, int Nx, std::string label) {
    MacroField f;
    f.L = L;
    f.label = std::move(label);
    f.values.resize(Nx);
    for (int i = 0; i < Nx; ++i) {
        const double x = (i + 0.5) * L / Nx;
        double v = p.mean;
        for (auto [k, amp] : p.modes) v += amp * std::cos(2.0 * std::numbers::pi * k * x / L);
        f.values[i] = v;
    }
    return f;
}

double default_Y_max(const CoefficientModel& m, double tail_mass) {
    const auto& c = m.params();
    const double Y = std::pow((c.c_plus + c.c_minus) / (tail_mass * (c.sigma - 1.0)),
                              1.0 / (c.sigma - 1.0));
    return std::max(Y, 4.0 * m.blend_end());
}

PhaseGrid make_phase_grid(const CoefficientModel& m, const ScalingContext& ctx,
                          const GridOptions& opt) {
    if (opt.Nx < 8 || opt.Ny < 8) throw InputError("grid needs Nx, Ny >= 8");
    if (!(opt.L > 0.0)) throw InputError("box length L must be positive");
    if (!(opt.cfl > 0.0) || opt.cfl > 1.0) throw InputError("cfl must lie in (0,1]");
    PhaseGrid g;
    g.L = opt.L;
    g.Nx = opt.Nx;
    g.dx = opt.L / opt.Nx;
    g.vq = build_sphere_quadrature(ctx.dim, m.params().V0, ctx.dim == 1 ? 2 : opt.v_order);

    const double Y = opt.Y_max > 0.0 ? opt.Y_max : default_Y_max(m, opt.tail_mass);
    if (!(Y > 2.0 * m.blend_end())) throw InputError("Y_max must exceed twice M0+blend width");
    g.Y_max = Y;
    const int Ny = opt.Ny;
    const double du_max = std::log(2.0) / opt.cells_per_band;
    const double A = std::max(opt.y_scale_min, Y / std::sinh(Ny * du_max / 2.0));
    const double U = std::asinh(Y / A);
    g.yf.resize(Ny + 1);
    g.yc.resize(Ny);
    g.h.resize(Ny);
    for (int i = 0; i <= Ny; ++i) g.yf[i] = A * std::sinh(-U + 2.0 * U * i / Ny);
    g.yf[0] = -Y;
    g.yf[Ny] = Y;
    for (int i = 0; i < Ny; ++i) {
        g.yc[i] = A * std::sinh(-U + 2.0 * U * (i + 0.5) / Ny);
        g.h[i] = g.yf[i + 1] - g.yf[i];
    }

    double vmax = 0.0;
    for (std::size_t k = 0; k < g.vq.size(); ++k) vmax = std::max(vmax, std::abs(g.vq.v1(k)));
    g.dt = opt.dt > 0.0 ? opt.dt : opt.cfl * g.dx * std::pow(ctx.eps, ctx.mu) / vmax;
    return g;
}

namespace {

// chi0(b) - chi0(a) without cancellation inside the closed-form tails.
double chi_increment(const CoefficientModel& m, double a, double b) {
    const auto& c = m.params();
    const double Mb = m.blend_end(), e = c.sigma - c.n_exp;
    if (b <= -Mb) return m.C_minus() * (std::pow(-b, e) - std::pow(-a, e));
    if (a >= Mb) {
        const double K = 1.0 / (c.c_plus * c.A1 * (c.n_exp - c.sigma));
        return K * (std::pow(a, e) - std::pow(b, e));
    }
    return m.chi0(b) - m.chi0(a);
}

double log_mean(double p, double q) {
    if (!(p > 0.0) || !(q > 0.0)) return 0.0;
    const double d = p - q;
    if (std::abs(d) <= 1e-12 * std::max(p, q)) return 0.5 * (p + q);
    return d / (std::log(p) - std::log(q));
}

}  // namespace

KineticSolver::KineticSolver(const CoefficientModel& model, const ScalingContext& ctx,
                             PhaseGrid grid, SolverOptions opt, TransportScheme scheme)
    : grid_(std::move(grid)), ctx_(ctx), opt_(opt), scheme_(scheme) {
    const int Ny = grid_.Ny();
    const auto& c = model.params();
    q0_.resize(Ny);
    chi_.resize(Ny);
    kap_.resize(Ny - 1);
    lam_.resize(Ny);
    m_.resize(Ny);
    double norm = 0.0;
    for (int j = 0; j < Ny; ++j) {
        q0_[j] = model.Q0(grid_.yc[j]);
        norm += grid_.h[j] * q0_[j];
        lam_[j] = model.Lambda(grid_.yc[j]);
    }
    for (int j = 0; j < Ny; ++j) {
        q0_[j] /= norm;
        m_[j] = grid_.h[j] * q0_[j];
    }
    chi_[0] = model.chi0(grid_.yc[0]);
    for (int j = 0; j + 1 < Ny; ++j) {
        const double d = chi_increment(model, grid_.yc[j], grid_.yc[j + 1]);
        if (!(d > 0.0)) throw SolverError("chi0 increments must be positive; refine y-grid");
        kap_[j] = 1.0 / d;
        chi_[j + 1] = chi_[j] + d;
    }
    B0h_ = 0.0;
    for (int j = 0; j < Ny; ++j) B0h_ += m_[j] * chi_[j];

    s_exp_ = c.s_exp;
    a_ = std::pow(ctx_.eps, c.s_exp - 1.0 - ctx_.mu);
    r_ = std::pow(ctx_.eps, -1.0 - ctx_.mu);
    c_ = std::pow(ctx_.eps, -ctx_.mu);

    double vmax = 0.0;
    for (std::size_t k = 0; k < grid_.vq.size(); ++k)
        vmax = std::max(vmax, std::abs(grid_.vq.v1(k)));
    const double cfl = c_ * vmax * grid_.dt / grid_.dx;
    if (opt_.transport && cfl > 1.0 + 1e-12) {
        std::ostringstream os;
        os << "CFL " << cfl << " exceeds 1; use dt <= " << grid_.dx / (c_ * vmax);
        throw SolverError(os.str());
    }
}

double KineticSolver::C_discrete() const {
    return std::sqrt(chi_.back() - chi_.front());
}

KineticState KineticSolver::init_state(const MacroField& rho0) const {
    if (rho0.Nx() != grid_.Nx) throw InputError("rho0 length differs from Nx");
    double sup = 0.0, l2 = 0.0, l1 = 0.0;
    for (double v : rho0.values) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw InputError("rho0 must be finite and >= 0");
        sup = std::max(sup, v);
        l2 += v * v * grid_.dx;
        l1 += v * grid_.dx;
    }
    KineticState s;
    s.ctx = ctx_;
    s.time = 0.0;
    s.q.resize(grid_.size());
    const int Nv = grid_.Nv(), Ny = grid_.Ny();
    for (int ix = 0; ix < grid_.Nx; ++ix)
        for (int iv = 0; iv < Nv; ++iv)
            for (int j = 0; j < Ny; ++j) s.q[grid_.index(ix, iv, j)] = rho0.values[ix] * q0_[j];
    s.B = std::max({sup, l2, l1});
    return s;
}

void KineticSolver::for_fibers(int n, const std::function<void(int, int)>& body) const {
    const int T = std::max(1, std::min(opt_.threads, n));
    if (T == 1) {
        body(0, n);
        return;
    }
    std::vector<std::thread> pool;
    for (int t = 0; t < T; ++t) {
        const int lo = n * t / T, hi = n * (t + 1) / T;
        pool.emplace_back([&body, lo, hi] { body(lo, hi); });
    }
    for (auto& th : pool) th.join();
}

void KineticSolver::relax(KineticState& s, double tau) const {
    const int Nv = grid_.Nv(), Ny = grid_.Ny();
    std::vector<double> f(Ny);
    for (int j = 0; j < Ny; ++j) f[j] = std::exp(-r_ * lam_[j] * tau);
    const auto& w = grid_.vq.weights;
    for_fibers(grid_.Nx, [&](int lo, int hi) {
        for (int ix = lo; ix < hi; ++ix)
            for (int j = 0; j < Ny; ++j) {
                double avg = 0.0;
                for (int iv = 0; iv < Nv; ++iv) avg += w[iv] * s.q[grid_.index(ix, iv, j)];
                for (int iv = 0; iv < Nv; ++iv) {
                    double& q = s.q[grid_.index(ix, iv, j)];
                    q = avg + f[j] * (q - avg);
                }
            }
    });
}

void KineticSolver::diffuse_y(KineticState& s, double tau) const {
    const int Ny = grid_.Ny();
    // Backward Euler in u = q/Q0, tridiagonal solve without subtractions so
    // that mass survives off-diagonals many orders larger than the masses.
    std::vector<double> off(Ny, 0.0), b(Ny), sdiag(Ny);
    for (int j = 0; j + 1 < Ny; ++j) off[j] = a_ * tau * kap_[j];
    sdiag[0] = m_[0];
    b[0] = sdiag[0] + off[0];
    for (int j = 1; j < Ny; ++j) {
        sdiag[j] = m_[j] + off[j - 1] * sdiag[j - 1] / b[j - 1];
        b[j] = sdiag[j] + off[j];
    }
    const int fibers = grid_.Nx * grid_.Nv();
    for_fibers(fibers, [&](int lo, int hi) {
        std::vector<double> d(Ny);
        for (int f = lo; f < hi; ++f) {
            double* q = s.q.data() + std::size_t(f) * Ny;
            d[0] = m_[0] * (q[0] / q0_[0]) / b[0];
            for (int j = 1; j < Ny; ++j)
                d[j] = (m_[j] * (q[j] / q0_[j]) + off[j - 1] * d[j - 1]) / b[j];
            double x = d[Ny - 1];
            q[Ny - 1] = x * q0_[Ny - 1];
            for (int j = Ny - 2; j >= 0; --j) {
                x = d[j] + off[j] / b[j] * x;
                q[j] = x * q0_[j];
            }
        }
    });
}

namespace {

double minmod(double a, double b) {
    if (a * b <= 0.0) return 0.0;
    return std::abs(a) < std::abs(b) ? a : b;
}

}  // namespace

void KineticSolver::transport_row(std::vector<double>& row, std::vector<double>& tmp,
                                  double c) const {
    const int N = static_cast<int>(row.size());
    if (c == 0.0) return;
    const bool neg = c < 0.0;
    if (neg) std::reverse(row.begin(), row.end());
    double a = std::abs(c);
    if (std::abs(a - 1.0) <= 1e-12) {
        tmp[0] = row[N - 1];
        for (int i = 1; i < N; ++i) tmp[i] = row[i - 1];
        row.swap(tmp);
    } else if (scheme_ == TransportScheme::Upwind) {
        for (int i = 0; i < N; ++i) tmp[i] = row[i] - a * (row[i] - row[(i - 1 + N) % N]);
        row.swap(tmp);
    } else {
        // minmod-limited slopes, single-step flux form (TVD for a <= 1)
        std::vector<double> flux(N);
        for (int i = 0; i < N; ++i) {
            const double qm = row[(i - 1 + N) % N], q = row[i], qp = row[(i + 1) % N];
            flux[i] = a * (q + 0.5 * (1.0 - a) * minmod(qp - q, q - qm));
        }
        for (int i = 0; i < N; ++i) tmp[i] = row[i] - (flux[i] - flux[(i - 1 + N) % N]);
        row.swap(tmp);
    }
    if (neg) std::reverse(row.begin(), row.end());
}

void KineticSolver::transport(KineticState& s, double tau) const {
    const int Nx = grid_.Nx, Nv = grid_.Nv(), Ny = grid_.Ny();
    for_fibers(Nv * Ny, [&](int lo, int hi) {
        std::vector<double> row(Nx), tmp(Nx);
        for (int f = lo; f < hi; ++f) {
            const int iv = f / Ny, j = f % Ny;
            const double c = c_ * grid_.vq.v1(iv) * tau / grid_.dx;
            if (std::abs(c) > 1.0 + 1e-12) throw SolverError("transport CFL exceeded");
            for (int ix = 0; ix < Nx; ++ix) row[ix] = s.q[grid_.index(ix, iv, j)];
            transport_row(row, tmp, c);
            for (int ix = 0; ix < Nx; ++ix) s.q[grid_.index(ix, iv, j)] = row[ix];
        }
    });
}

void KineticSolver::step(KineticState& s) const {
    const double dt = grid_.dt;
    if (opt_.relaxation) relax(s, 0.5 * dt);
    if (opt_.y_diffusion) diffuse_y(s, 0.5 * dt);
    if (opt_.transport) transport(s, dt);
    if (opt_.y_diffusion) diffuse_y(s, 0.5 * dt);
    if (opt_.relaxation) relax(s, 0.5 * dt);
    s.time += dt;

    double lo = 0.0, hi = 0.0;
    for (double q : s.q) {
        lo = std::min(lo, q);
        hi = std::max(hi, q);
    }
    if (lo < -1e-13 * std::max(hi, 1e-300)) {
        std::ostringstream os;
        os << "negative density " << lo << " at t=" << s.time;
        throw SolverError(os.str());
    }
}

MacroField KineticSolver::weighted_density(const KineticState& s) const {
    MacroField f;
    f.L = grid_.L;
    f.label = "weighted";
    f.values.assign(grid_.Nx, 0.0);
    const int Nv = grid_.Nv(), Ny = grid_.Ny();
    for (int ix = 0; ix < grid_.Nx; ++ix) {
        double acc = 0.0;
        for (int iv = 0; iv < Nv; ++iv) {
            double a = 0.0;
            for (int j = 0; j < Ny; ++j) a += grid_.h[j] * chi_[j] * s.q[grid_.index(ix, iv, j)];
            acc += grid_.vq.weights[iv] * a;
        }
        f.values[ix] = acc / B0h_;
    }
    return f;
}

MacroField KineticSolver::plain_density(const KineticState& s) const {
    MacroField f;
    f.L = grid_.L;
    f.label = "plain";
    f.values.assign(grid_.Nx, 0.0);
    const int Nv = grid_.Nv(), Ny = grid_.Ny();
    for (int ix = 0; ix < grid_.Nx; ++ix) {
        double acc = 0.0;
        for (int iv = 0; iv < Nv; ++iv) {
            double a = 0.0;
            for (int j = 0; j < Ny; ++j) a += grid_.h[j] * s.q[grid_.index(ix, iv, j)];
            acc += grid_.vq.weights[iv] * a;
        }
        f.values[ix] = acc;
    }
    return f;
}

double KineticSolver::relative_entropy(const KineticState& s) const {
    const int Nv = grid_.Nv(), Ny = grid_.Ny();
    double E = 0.0;
    for (int ix = 0; ix < grid_.Nx; ++ix)
        for (int iv = 0; iv < Nv; ++iv) {
            double a = 0.0;
            for (int j = 0; j < Ny; ++j) {
                const double q = s.q[grid_.index(ix, iv, j)];
                a += grid_.h[j] * q * q / q0_[j];
            }
            E += grid_.vq.weights[iv] * a;
        }
    return E * grid_.dx;
}

double KineticSolver::total_mass(const KineticState& s) const {
    return plain_density(s).integral();
}

double KineticSolver::total_weighted_mass(const KineticState& s) const {
    return weighted_density(s).integral() * B0h_;
}

double KineticSolver::y_dissipation_raw(const KineticState& s) const {
    const int Nv = grid_.Nv(), Ny = grid_.Ny();
    double acc = 0.0;
    for (int ix = 0; ix < grid_.Nx; ++ix)
        for (int iv = 0; iv < Nv; ++iv) {
            const double* q = s.q.data() + grid_.index(ix, iv, 0);
            double a = 0.0;
            for (int j = 0; j + 1 < Ny; ++j) {
                const double du = q[j + 1] / q0_[j + 1] - q[j] / q0_[j];
                a += kap_[j] * du * du;
            }
            acc += grid_.vq.weights[iv] * a;
        }
    return acc * grid_.dx;
}

double KineticSolver::lambda_dissipation_raw(const KineticState& s) const {
    const int Nv = grid_.Nv(), Ny = grid_.Ny();
    const auto& w = grid_.vq.weights;
    double acc = 0.0;
    for (int ix = 0; ix < grid_.Nx; ++ix)
        for (int j = 0; j < Ny; ++j) {
            double avg = 0.0;
            for (int iv = 0; iv < Nv; ++iv) avg += w[iv] * s.q[grid_.index(ix, iv, j)];
            double a = 0.0;
            for (int iv = 0; iv < Nv; ++iv) {
                const double d = s.q[grid_.index(ix, iv, j)] - avg;
                a += w[iv] * d * d;
            }
            acc += grid_.h[j] * lam_[j] * a / q0_[j];
        }
    return acc * grid_.dx;
}

std::pair<double, double> KineticSolver::averaged_dissipation_raw(const KineticState& sa,
                                                                  const KineticState& sb) const {
    const int Nv = grid_.Nv(), Ny = grid_.Ny();
    const auto& w = grid_.vq.weights;
    double dy = 0.0, dl = 0.0;
    for (int ix = 0; ix < grid_.Nx; ++ix) {
        for (int iv = 0; iv < Nv; ++iv) {
            const double* qa = sa.q.data() + grid_.index(ix, iv, 0);
            const double* qb = sb.q.data() + grid_.index(ix, iv, 0);
            for (int j = 0; j + 1 < Ny; ++j) {
                const double ua = qa[j + 1] / q0_[j + 1] - qa[j] / q0_[j];
                const double ub = qb[j + 1] / q0_[j + 1] - qb[j] / q0_[j];
                dy += w[iv] * kap_[j] * log_mean(ua * ua, ub * ub);
            }
        }
        for (int j = 0; j < Ny; ++j) {
            double avga = 0.0, avgb = 0.0;
            for (int iv = 0; iv < Nv; ++iv) {
                avga += w[iv] * sa.q[grid_.index(ix, iv, j)];
                avgb += w[iv] * sb.q[grid_.index(ix, iv, j)];
            }
            double pa = 0.0, pb = 0.0;
            for (int iv = 0; iv < Nv; ++iv) {
                const double da = sa.q[grid_.index(ix, iv, j)] - avga;
                const double db = sb.q[grid_.index(ix, iv, j)] - avgb;
                pa += w[iv] * da * da;
                pb += w[iv] * db * db;
            }
            dl += grid_.h[j] * lam_[j] / q0_[j] * log_mean(pa, pb);
        }
    }
    return {dy * grid_.dx, dl * grid_.dx};
}

EntropyBudget KineticSolver::entropy_budget(const KineticState& before, const KineticState& after,
                                            double dt) const {
    (void)dt;
    EntropyBudget b;
    b.dE = 0.5 * (relative_entropy(after) - relative_entropy(before));
    auto [dy, dl] = averaged_dissipation_raw(before, after);
    b.diss_y = a_ * dy;
    b.diss_lambda = r_ * dl;
    return b;
}

}  // namespace frackin
