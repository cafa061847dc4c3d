#include "frackin/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "frackin/errors.hpp"

namespace frackin {

void AprioriTracker::sample(const KineticState& s) {
    const auto& g = s_->grid();
    const auto& q0 = s_->Q0();
    const int Ny = g.Ny();
    for (std::size_t i = 0; i < s.q.size(); ++i) {
        const double q = s.q[i];
        min_q_ = std::min(min_q_, q);
        sup_ratio_ = std::max(sup_ratio_, q / (B_ * q0[i % Ny]));
    }
    const double E = s_->relative_entropy(s);
    max_E_ = std::max(max_E_, E);
    const double m = s_->total_mass(s);
    max_mass_ = std::max(max_mass_, m);
    last_E_ = E;
    last_mass_ = m;
    wdrift_ = std::max(wdrift_, std::abs(s_->total_weighted_mass(s) / wmass0_ - 1.0));
}

void AprioriTracker::start(const KineticState& s0) {
    B_ = s0.B;
    if (!(B_ > 0.0)) throw InputError("state carries no initial-data bound B");
    mass0_ = s_->total_mass(s0);
    wmass0_ = s_->total_weighted_mass(s0);
    sup_ratio_ = max_E_ = max_mass_ = cum_y_ = cum_l_ = max_rise_ = 0.0;
    max_mass_drift_ = wdrift_ = 0.0;
    min_q_ = 0.0;
    monotone_ = true;
    steps_ = 0;
    sample(s0);
}

void AprioriTracker::observe(const KineticState& before, const KineticState& after) {
    const double dt = after.time - before.time;
    auto [dy, dl] = s_->averaged_dissipation_raw(before, after);
    cum_y_ += dy * dt;
    cum_l_ += dl * dt;
    const double E0 = last_E_, m0 = last_mass_;
    sample(after);
    const double rise = last_E_ - E0;
    if (rise > 1e-13 * std::max(E0, 1e-300)) monotone_ = false;
    max_rise_ = std::max(max_rise_, rise);
    max_mass_drift_ = std::max(max_mass_drift_, std::abs(last_mass_ - m0) / std::max(mass0_, 1e-300));
    ++steps_;
}

std::vector<BoundReport> check_apriori(const KineticSolver& solver, const AprioriTracker& t,
                                       double slack) {
    const auto& ctx = solver.ctx();
    const double eps = ctx.eps, mu = ctx.mu;
    const double s_exp = solver.noise_exponent();
    const double B = t.B();
    std::vector<BoundReport> out;
    auto add = [&](std::string name, double measured, double budget, double sl, std::string d) {
        BoundReport r{std::move(name), measured, budget, sl, measured <= budget * sl, std::move(d)};
        out.push_back(std::move(r));
    };
    std::ostringstream d0;
    d0 << "min q = " << t.min_value() << "; budget is 1 with tolerance 1e-8";
    add("sup_bound q<=B*Q0", t.sup_ratio(), 1.0, 1.0 + 1e-8, d0.str());
    add("entropy int q^2/Q0 <= B", t.max_entropy(), B, slack, "max over run");
    add("mass int q <= B", t.max_mass(), B, slack, "max over run");
    std::ostringstream d1;
    d1 << "raw int int DQ0 (d_y q/Q0)^2 dt vs B eps^(1+mu-s), s=" << s_exp;
    add("diss_y cumulative", t.cum_y_raw(), B * std::pow(eps, 1.0 + mu - s_exp), slack, d1.str());
    add("diss_lambda cumulative", t.cum_lambda_raw(), B * std::pow(eps, 1.0 + mu), slack,
        "raw int int Lambda (q-<q>)^2/Q0 dt vs B eps^(1+mu)");
    return out;
}

std::vector<BoundReport> check_apriori(const KineticSolver& solver,
                                       const std::vector<KineticState>& states, double slack) {
    if (states.empty()) throw InputError("check_apriori needs at least one state");
    AprioriTracker t(solver);
    t.start(states.front());
    for (std::size_t i = 1; i < states.size(); ++i) t.observe(states[i - 1], states[i]);
    return check_apriori(solver, t, slack);
}

DeviationReport deviation_bound_probe(const KineticSolver& solver, const KineticState& s,
                                      double slack) {
    const auto& g = solver.grid();
    const auto& q0 = solver.Q0();
    const auto& kap = solver.kappa();
    const int Ny = g.Ny(), Nv = g.Nv();
    DeviationReport r;
    r.C = solver.C_discrete();
    r.slack = slack;
    std::vector<double> u(Ny);
    for (int ix = 0; ix < g.Nx; ++ix)
        for (int iv = 0; iv < Nv; ++iv) {
            const double* q = s.q.data() + g.index(ix, iv, 0);
            double R = 0.0, H = 0.0, umax = 0.0;
            for (int j = 0; j < Ny; ++j) {
                u[j] = q[j] / q0[j];
                R += g.h[j] * q[j];
                umax = std::max(umax, std::abs(u[j]));
            }
            for (int j = 0; j + 1 < Ny; ++j) H += kap[j] * (u[j + 1] - u[j]) * (u[j + 1] - u[j]);
            const double rhs = r.C * std::sqrt(H);
            const double floor = 1e-13 * std::max(umax, 1e-300);
            for (int j = 0; j < Ny; ++j) {
                const double lhs = std::abs(u[j] - R);
                r.lhs_max = std::max(r.lhs_max, lhs);
                if (rhs > 0.0) r.ratio_max = std::max(r.ratio_max, lhs / rhs);
                if (lhs > slack * rhs + floor) ++r.violations;
            }
        }
    return r;
}

FluxProbe flux_decomposition_probe(const KineticSolver& solver, const KineticState& prev,
                                   const KineticState& s, const KineticState& next,
                                   const std::vector<int>& modes) {
    using cd = std::complex<double>;
    const auto& g = solver.grid();
    const auto& ctx = solver.ctx();
    const auto& q0 = solver.Q0();
    const auto& chi = solver.chi();
    const auto& kap = solver.kappa();
    const auto& lam = solver.lambda();
    const int Nx = g.Nx, Nv = g.Nv(), Ny = g.Ny();
    const double eps = ctx.eps, a = solver.y_coef(), cspeed = solver.speed_coef();
    const double dt2 = next.time - prev.time;
    if (!(dt2 > 0.0)) throw InputError("flux probe needs prev.time < next.time");

    auto dft = [&](const KineticState& st, int k, int iv, std::vector<cd>& out) {
        const double xi = 2.0 * std::numbers::pi * k / g.L;
        out.assign(Ny, cd(0.0, 0.0));
        for (int ix = 0; ix < Nx; ++ix) {
            const cd e = std::polar(g.dx, -xi * (ix + 0.5) * g.dx);
            const double* q = st.q.data() + g.index(ix, iv, 0);
            for (int j = 0; j < Ny; ++j) out[j] += e * q[j];
        }
    };

    FluxProbe P;
    {
        MacroField rho = solver.plain_density(s);
        double top = 0.0, all = 0.0;
        for (int k = 1; k <= Nx / 2; ++k) {
            const double xi = 2.0 * std::numbers::pi * k / g.L;
            cd acc(0.0, 0.0);
            for (int ix = 0; ix < Nx; ++ix) acc += rho.values[ix] * std::polar(1.0, -xi * rho.x(ix));
            const double e = std::norm(acc);
            all += e;
            if (k >= Nx / 4) top += e;
        }
        P.nyquist_fraction = all > 0.0 ? top / all : 0.0;
        P.under_resolved = P.nyquist_fraction > 1e-3;
    }

    std::vector<cd> qh(Ny), qp(Ny), qn(Ny), gj(Ny);
    for (int k : modes) {
        FluxTerms F;
        F.k = k;
        F.xi = 2.0 * std::numbers::pi * k / g.L;
        const double xi = F.xi;
        // rho_hat and <q_hat> per y
        std::vector<cd> avg(Ny, cd(0.0, 0.0));
        std::vector<std::vector<cd>> all(Nv);
        for (int iv = 0; iv < Nv; ++iv) {
            dft(s, k, iv, all[iv]);
            for (int j = 0; j < Ny; ++j) avg[j] += g.vq.weights[iv] * all[iv][j];
        }
        cd rho(0.0, 0.0);
        for (int j = 0; j < Ny; ++j) rho += g.h[j] * avg[j];
        F.rho_hat = rho;

        for (int iv = 0; iv < Nv; ++iv) {
            const double w = g.vq.weights[iv], v = g.vq.v1(iv);
            const auto& q = all[iv];
            dft(prev, k, iv, qp);
            dft(next, k, iv, qn);
            for (int j = 0; j < Ny; ++j)
                gj[j] = cd(0.0, xi * v) * chi[j] / cd(lam[j], eps * xi * v);
            cd div(0.0, 0.0), main(0.0, 0.0), rj(0.0, 0.0), j2(0.0, 0.0), gp(0.0, 0.0), gn(0.0, 0.0);
            for (int j = 0; j < Ny; ++j) {
                div += g.h[j] * cd(0.0, xi * v) * chi[j] * q[j];
                main += g.h[j] * gj[j] * lam[j] * q0[j] * rho;
                rj += g.h[j] * gj[j] * lam[j] * (avg[j] - rho * q0[j]);
                gp += g.h[j] * gj[j] * qp[j];
                gn += g.h[j] * gj[j] * qn[j];
            }
            for (int j = 0; j + 1 < Ny; ++j)
                j2 -= (gj[j + 1] - gj[j]) * kap[j] * (q[j + 1] / q0[j + 1] - q[j] / q0[j]);
            F.div_J += w * cspeed * div;
            F.main += w * cspeed * main;
            F.RJ += w * cspeed * rj;
            F.J2 += w * eps * a * j2;
            F.J3 += w * (-eps) * (gn - gp) / dt2;
            F.leak += w * a * (q[Ny - 1] / q0[Ny - 1] - q[0] / q0[0]);
        }
        if (k != 0 && std::abs(rho) > 0.0) {
            const double denom = std::pow(std::abs(xi), 1.0 + ctx.mu) * solver.B0_discrete();
            F.nu_recovered = (F.main / (rho * denom)).real();
        }
        const double dn = std::abs(F.div_J);
        F.closure = dn > 0.0 ? std::abs(F.div_J - (F.main + F.RJ + F.J2 + F.J3)) / dn : 0.0;
        P.modes.push_back(F);
    }
    return P;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw InputError("slope needs >= 2 matched points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double den = n * sxx - sx * sx;
    if (den == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return (n * sxy - sx * sy) / den;
}

ConvergenceTable convergence_table(std::vector<ConvergenceRow> rows) {
    std::sort(rows.begin(), rows.end(),
              [](const ConvergenceRow& a, const ConvergenceRow& b) { return a.eps > b.eps; });
    ConvergenceTable t;
    t.rows = rows;
    if (rows.size() < 3) {
        t.verdict = "insufficient";
        return t;
    }
    std::vector<double> e, err;
    bool zero = false;
    for (auto& r : rows) {
        e.push_back(r.eps);
        err.push_back(r.error);
        if (!(r.error > 0.0)) zero = true;
    }
    if (zero) {
        t.verdict = "degenerate";
        return t;
    }
    t.slope = loglog_slope(e, err);
    t.slope_defined = std::isfinite(t.slope);
    t.monotone = true;
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (!(rows[i].error < rows[i - 1].error)) t.monotone = false;
    t.verdict = t.monotone ? "monotone decreasing" : "not monotone";
    return t;
}

std::string format_reports(const std::vector<BoundReport>& r) {
    std::ostringstream os;
    os << std::setprecision(6);
    for (const auto& b : r)
        os << (b.pass ? "PASS " : "FAIL ") << b.name << ": measured " << b.measured << " budget "
           << b.budget << " slack " << b.slack << " (" << b.details << ")\n";
    return os.str();
}

}  // namespace frackin
