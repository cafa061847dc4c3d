#include "frackin/fractional.hpp"

#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <sstream>

#include "frackin/errors.hpp"
#include "frackin/special_integrals.hpp"

namespace frackin {

namespace {

// FFTW planning is not thread-safe.
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

double mode_decay(double nu, double order, double L, int k, double t) {
    const double xi = 2.0 * std::numbers::pi * k / L;
    return std::exp(-nu * std::pow(std::abs(xi), order) * t);
}

MacroField fractional_solve(const FractionalProblem& p, double t) {
    if (!(t >= 0.0)) throw InputError("fractional solve needs t >= 0");
    if (!(p.order > 0.0) || p.order > 2.0) throw InputError("fractional order must lie in (0,2]");
    if (!(p.nu > 0.0)) throw InputError("nu must be positive");
    const int N = p.rho0.Nx();
    if (N < 2) throw InputError("rho0 needs at least two cells");
    for (double v : p.rho0.values)
        if (!std::isfinite(v)) throw InputError("rho0 must be finite");

    std::vector<double> buf(p.rho0.values);
    std::vector<std::complex<double>> spec(N / 2 + 1);
    auto* cs = reinterpret_cast<fftw_complex*>(spec.data());
    fftw_plan fwd, bwd;
    {
        std::lock_guard<std::mutex> lk(plan_mutex());
        fwd = fftw_plan_dft_r2c_1d(N, buf.data(), cs, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_c2r_1d(N, cs, buf.data(), FFTW_ESTIMATE);
    }
    fftw_execute(fwd);
    for (int k = 0; k <= N / 2; ++k) spec[k] *= mode_decay(p.nu, p.order, p.rho0.L, k, t) / N;
    // Nyquist mode of an even grid must stay real
    if (N % 2 == 0) spec[N / 2] = spec[N / 2].real();
    fftw_execute(bwd);
    {
        std::lock_guard<std::mutex> lk(plan_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
    }
    MacroField out;
    out.L = p.rho0.L;
    out.label = "fractional";
    out.values = std::move(buf);
    return out;
}

MacroField self_similar_profile(double order, double nu, double t, const std::vector<double>& x) {
    if (!(t > 0.0)) throw InputError("profile needs t > 0");
    if (!(order > 0.0) || order > 2.0) throw InputError("fractional order must lie in (0,2]");
    MacroField f;
    f.label = "profile";
    f.values.resize(x.size());
    const double s = nu * t;
    if (x.size() > 1) f.L = (x.back() - x.front()) * x.size() / (x.size() - 1);
    if (order == 2.0) {
        for (std::size_t i = 0; i < x.size(); ++i)
            f.values[i] = std::exp(-x[i] * x[i] / (4.0 * s)) / std::sqrt(4.0 * std::numbers::pi * s);
        return f;
    }
    if (order == 1.0) {
        for (std::size_t i = 0; i < x.size(); ++i)
            f.values[i] = s / (std::numbers::pi * (s * s + x[i] * x[i]));
        return f;
    }
    // p(x) = (1/pi) int_0^inf cos(xi x) exp(-s xi^order) dxi
    const double scale = std::pow(s, -1.0 / order);
    auto g = [order](double z) { return std::exp(-std::pow(z, order)); };
    boost::math::quadrature::ooura_fourier_cos<double> ooura(1e-13, 12);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double w = std::abs(x[i]) * scale;
        double v;
        if (w < 1e-3) {
            // near the origin the oscillation is negligible; plain quadrature is more accurate
            const double zmax = std::pow(40.0, 1.0 / order);
            auto r = integrate_gk([&](double z) { return std::cos(w * z) * g(z); }, 0.0, zmax,
                                  1e-12);
            v = r.value;
        } else {
            auto [val, relerr] = ooura.integrate(g, w);
            if (!std::isfinite(val) || relerr > 1e-6) {
                std::ostringstream os;
                os << "oscillatory quadrature did not converge at x=" << x[i] << " (rel err "
                   << relerr << ")";
                throw QuadratureError(os.str(), relerr);
            }
            v = val;
        }
        f.values[i] = v * scale / std::numbers::pi;
    }
    return f;
}

}  // namespace frackin
