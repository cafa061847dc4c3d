#include "frackin/coefficients.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "frackin/errors.hpp"
#include "frackin/special_integrals.hpp"

namespace frackin {

namespace {

constexpr double kQuadTol = 1e-12;

void require_positive(const char* name, double v) {
    if (!std::isfinite(v)) throw InputError(std::string("coefficient '") + name + "' is not finite");
    if (!(v > 0.0)) throw InputError(std::string("coefficient '") + name + "' must be positive");
}

void check_fields(const CoefficientSet& c) {
    require_positive("sigma", c.sigma);
    require_positive("beta", c.beta);
    require_positive("gamma", c.gamma);
    require_positive("n", c.n_exp);
    require_positive("s", c.s_exp);
    require_positive("M0", c.M0);
    require_positive("c_plus", c.c_plus);
    require_positive("c_minus", c.c_minus);
    require_positive("A0", c.A0);
    require_positive("A1", c.A1);
    require_positive("V0", c.V0);
    require_positive("blend_width", c.interior_blend_width);
    require_positive("lambda_plateau", c.lambda_plateau);
    if (!(c.M0 > 1.0)) throw InputError("coefficient 'M0' must exceed 1");
}

QuadResult gk(const std::function<double(double)>& f, double a, double b) {
    auto r = integrate_gk(f, a, b, kQuadTol);
    if (!r.converged) throw QuadratureError("coefficient quadrature did not converge", r.error);
    return r;
}

// Blend panels are at most one blend width long and the integrands are smooth there.
double gauss30(const std::function<double(double)>& f, double a, double b) {
    return boost::math::quadrature::gauss<double, 30>::integrate(f, a, b);
}

// int_0^t of the cubic Hermite blend, in units of the blend variable
double hermite_integral(double t, double w, double v0, double v1, double d1) {
    const double t3 = t * t * t, t4 = t3 * t;
    return w * (v0 * (t4 / 2 - t3 + t) + v1 * (-t4 / 2 + t3) + w * d1 * (t4 / 4 - t3 / 3));
}

}  // namespace

bool ValidationReport::has(const std::string& name) const {
    return std::any_of(violated.begin(), violated.end(),
                       [&](const Violation& v) { return v.name == name; });
}

std::string ValidationReport::table() const {
    std::ostringstream os;
    os << std::left << std::setw(28) << "inequality" << std::right << std::setw(14) << "lhs"
       << std::setw(14) << "rhs" << "\n";
    for (const auto& v : violated)
        os << std::left << std::setw(28) << v.name << std::right << std::setw(14)
           << std::setprecision(8) << v.lhs << std::setw(14) << v.rhs << "\n";
    os << (ok ? "ok" : "violated") << "\n";
    return os.str();
}

double compute_mu(const CoefficientSet& c) { return (c.n_exp - 1.0) / c.beta; }

bool mu_in_open_interval(double mu) { return mu > 0.0 && mu < 1.0; }

ValidationReport validate_parameters(const CoefficientSet& c) {
    check_fields(c);
    ValidationReport r;
    const double sb = c.s_exp * c.beta;
    auto need = [&r](const char* name, double lhs, double rhs) {
        if (!(lhs > rhs)) r.violated.push_back({name, lhs, rhs});
    };
    need("n > sigma", c.n_exp, c.sigma);
    need("sigma > 1", c.sigma, 1.0);
    need("s > 1", c.s_exp, 1.0);
    need("gamma > (n-sigma)/2+1", c.gamma, (c.n_exp - c.sigma) / 2.0 + 1.0);
    need("beta > n-1", c.beta, c.n_exp - 1.0);
    need("beta+n-1 > s*beta", c.beta + c.n_exp - 1.0, sb);
    need("s*beta > beta+sigma-1", sb, c.beta + c.sigma - 1.0);
    const double mu = compute_mu(c);
    if (!mu_in_open_interval(mu)) r.violated.push_back({"mu in (0,1)", mu, mu > 0.0 ? 1.0 : 0.0});
    r.ok = r.violated.empty();
    return r;
}

CoefficientModel::CoefficientModel(const CoefficientSet& c) : c_(c) {
    check_fields(c_);
    if (!(c_.sigma > 1.0)) throw DomainError("Q0 is not normalisable unless sigma > 1");
    if (!(c_.n_exp > c_.sigma)) throw DomainError("1/(D Q0) is not integrable unless n > sigma");

    const double M0 = c_.M0, w = c_.interior_blend_width, Mb = M0 + w, s = c_.sigma;
    // Mass is linear in the interior amplitude; Hermite blends integrate exactly.
    double rest = 0.0;
    for (double cs : {c_.c_plus, c_.c_minus}) {
        const double p1 = cs * std::pow(Mb, -s);
        const double m1 = -s * cs * std::pow(Mb, -s - 1.0);
        rest += w * p1 / 2.0 - w * w * m1 / 12.0;
        rest += cs * std::pow(Mb, 1.0 - s) / (s - 1.0);
    }
    A_ = (1.0 - rest) / (2.0 * M0 + w);
    if (!(A_ > 0.0))
        throw InputError("tail amplitudes c+/c- leave no room for a positive interior Q0");

    const int samples = 4000;
    for (int i = 0; i <= samples; ++i) {
        const double a = M0 + w * i / samples;
        for (double y : {a, -a}) {
            if (!(Q0(y) > 0.0) || !(Lambda(y) > 0.0) || !(D(y) > 0.0))
                throw InputError("blend region produces a non-positive coefficient");
            lambda_max_ = std::max(lambda_max_, Lambda(y));
        }
    }
    lambda_max_ = std::max({lambda_max_, c_.lambda_plateau, std::pow(Mb, -c_.beta)});
    lambda_max_ *= 1.0 + 1e-9;

    auto g = [this](double y) { return 1.0 / (D(y) * Q0(y)); };
    const double Dint = c_.A1 * std::pow(M0, c_.n_exp + 1.0);
    chi_knots_[0] = C_minus() * std::pow(Mb, s - c_.n_exp);
    chi_knots_[1] = chi_knots_[0] + gauss30(g, -Mb, -M0);
    chi_knots_[2] = chi_knots_[1] + 2.0 * M0 / (A_ * Dint);
    chi_knots_[3] = chi_knots_[2] + gauss30(g, M0, Mb);
    const double Kp = 1.0 / (c_.c_plus * c_.A1 * (c_.n_exp - s));
    chi_inf_ = chi_knots_[3] + Kp * std::pow(Mb, s - c_.n_exp);

    cdf_knots_[0] = c_.c_minus * std::pow(Mb, 1.0 - s) / (s - 1.0);
    auto blend_mass = [&](double cs) {
        return hermite_integral(1.0, w, A_, cs * std::pow(Mb, -s), -s * cs * std::pow(Mb, -s - 1.0));
    };
    cdf_knots_[1] = cdf_knots_[0] + blend_mass(c_.c_minus);
    cdf_knots_[2] = cdf_knots_[1] + 2.0 * M0 * A_;
    cdf_knots_[3] = cdf_knots_[2] + blend_mass(c_.c_plus);

    auto qc = [this](double y) { return Q0(y) * chi0(y); };
    const double n = c_.n_exp;
    double b = c_.c_minus * C_minus() * std::pow(Mb, 1.0 - n) / (n - 1.0);
    b += gk(qc, -Mb, -M0).value;
    b += A_ * 2.0 * M0 * chi_knots_[1] + (2.0 * M0) * (2.0 * M0) / (2.0 * Dint);
    b += gk(qc, M0, Mb).value;
    b += chi_inf_ * c_.c_plus * std::pow(Mb, 1.0 - s) / (s - 1.0) -
         Kp * c_.c_plus * std::pow(Mb, 1.0 - n) / (n - 1.0);
    B0_ = b;
}

double CoefficientModel::blend(double a, double v0, double v1, double d1) const {
    const double w = c_.interior_blend_width;
    const double t = (a - c_.M0) / w;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * v0 + (-2 * t3 + 3 * t2) * v1 + (t3 - t2) * w * d1;
}

double CoefficientModel::dblend(double a, double v0, double v1, double d1) const {
    const double w = c_.interior_blend_width;
    const double t = (a - c_.M0) / w;
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * v0 + (-6 * t2 + 6 * t) * v1 + (3 * t2 - 2 * t) * w * d1) / w;
}

double CoefficientModel::Q0(double y) const {
    const double a = std::abs(y), Mb = blend_end(), s = c_.sigma, cs = q0_tail_amp(y);
    if (a <= c_.M0) return A_;
    if (a >= Mb) return cs * std::pow(a, -s);
    return blend(a, A_, cs * std::pow(Mb, -s), -s * cs * std::pow(Mb, -s - 1.0));
}

double CoefficientModel::dQ0(double y) const {
    const double a = std::abs(y), Mb = blend_end(), s = c_.sigma, cs = q0_tail_amp(y);
    const double sg = y < 0 ? -1.0 : 1.0;
    if (a <= c_.M0) return 0.0;
    if (a >= Mb) return -sg * s * cs * std::pow(a, -s - 1.0);
    return sg * dblend(a, A_, cs * std::pow(Mb, -s), -s * cs * std::pow(Mb, -s - 1.0));
}

double CoefficientModel::Lambda(double y) const {
    if (y >= -c_.M0) return c_.lambda_plateau;
    const double a = -y, Mb = blend_end(), b = c_.beta;
    if (a >= Mb) return std::pow(a, -b);
    return blend(a, c_.lambda_plateau, std::pow(Mb, -b), -b * std::pow(Mb, -b - 1.0));
}

double CoefficientModel::dLambda(double y) const {
    if (y >= -c_.M0) return 0.0;
    const double a = -y, Mb = blend_end(), b = c_.beta;
    if (a >= Mb) return b * std::pow(a, -b - 1.0);
    return -dblend(a, c_.lambda_plateau, std::pow(Mb, -b), -b * std::pow(Mb, -b - 1.0));
}

double CoefficientModel::D(double y) const {
    const double a = std::abs(y), Mb = blend_end(), e = c_.n_exp + 1.0;
    if (a <= c_.M0) return c_.A1 * std::pow(c_.M0, e);
    if (a >= Mb) return c_.A1 * std::pow(a, e);
    return blend(a, c_.A1 * std::pow(c_.M0, e), c_.A1 * std::pow(Mb, e),
                 e * c_.A1 * std::pow(Mb, e - 1.0));
}

double CoefficientModel::dD(double y) const {
    const double a = std::abs(y), Mb = blend_end(), e = c_.n_exp + 1.0;
    const double sg = y < 0 ? -1.0 : 1.0;
    if (a <= c_.M0) return 0.0;
    if (a >= Mb) return sg * e * c_.A1 * std::pow(a, e - 1.0);
    return sg * dblend(a, c_.A1 * std::pow(c_.M0, e), c_.A1 * std::pow(Mb, e),
                       e * c_.A1 * std::pow(Mb, e - 1.0));
}

void CoefficientModel::Q0(std::span<const double> y, std::span<double> out) const {
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = Q0(y[i]);
}
void CoefficientModel::Lambda(std::span<const double> y, std::span<double> out) const {
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = Lambda(y[i]);
}
void CoefficientModel::D(std::span<const double> y, std::span<double> out) const {
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = D(y[i]);
}

double CoefficientModel::C_minus() const {
    return 1.0 / (c_.c_minus * c_.A1 * (c_.n_exp - c_.sigma));
}

double CoefficientModel::chi0(double y) const {
    const double M0 = c_.M0, Mb = blend_end();
    auto g = [this](double z) { return 1.0 / (D(z) * Q0(z)); };
    if (y <= -Mb) return C_minus() * std::pow(-y, c_.sigma - c_.n_exp);
    if (y < -M0) return chi_knots_[0] + gauss30(g, -Mb, y);
    if (y <= M0) return chi_knots_[1] + (y + M0) / (A_ * c_.A1 * std::pow(M0, c_.n_exp + 1.0));
    if (y < Mb) return chi_knots_[2] + gauss30(g, M0, y);
    const double Kp = 1.0 / (c_.c_plus * c_.A1 * (c_.n_exp - c_.sigma));
    return chi_inf_ - Kp * std::pow(y, c_.sigma - c_.n_exp);
}

double CoefficientModel::Q0_cdf(double y) const {
    const double M0 = c_.M0, w = c_.interior_blend_width, Mb = blend_end(), s = c_.sigma;
    if (y <= -Mb) return c_.c_minus * std::pow(-y, 1.0 - s) / (s - 1.0);
    if (y >= Mb) return 1.0 - c_.c_plus * std::pow(y, 1.0 - s) / (s - 1.0);
    if (y >= -M0 && y <= M0) return cdf_knots_[1] + (y + M0) * A_;
    const double cs = q0_tail_amp(y);
    const double v1 = cs * std::pow(Mb, -s), d1 = -s * cs * std::pow(Mb, -s - 1.0);
    const double t = (std::abs(y) - M0) / w;
    if (y > 0) return cdf_knots_[2] + hermite_integral(t, w, A_, v1, d1);
    return cdf_knots_[1] - hermite_integral(t, w, A_, v1, d1);
}

double eval_Q0(const CoefficientModel& m, double y) { return m.Q0(y); }
double eval_Lambda(const CoefficientModel& m, double y) { return m.Lambda(y); }
double eval_D(const CoefficientModel& m, double y) { return m.D(y); }
double eval_chi0(const CoefficientModel& m, double y) { return m.chi0(y); }
double compute_B0(const CoefficientModel& m) { return m.B0(); }

double compute_nu(const CoefficientModel& m, int dim) {
    const auto& c = m.params();
    const double alpha = c.beta - c.n_exp;
    const double c1 = c1_closed(alpha, c.beta);
    const auto q = c1_quadrature(alpha, c.beta);
    if (std::abs(q.value - c1) > 1e-8 * c1)
        throw QuadratureError("closed-form c1 disagrees with quadrature", std::abs(q.value - c1));
    const double mu = compute_mu(c);
    return c.c_minus * m.C_minus() * c1 * std::pow(c.V0, 1.0 + mu) *
           sphere_abs_moment(dim, 1.0 + mu) / m.B0();
}

ScalingContext make_scaling_context(const CoefficientModel& m, double eps, int dim) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw InputError("eps must be positive");
    if (dim != 1 && dim != 2) throw InputError("dim must be 1 or 2");
    ScalingContext ctx;
    ctx.eps = eps;
    ctx.mu = compute_mu(m.params());
    ctx.nu = compute_nu(m, dim);
    ctx.B0 = m.B0();
    ctx.C_minus = m.C_minus();
    ctx.dim = dim;
    return ctx;
}

namespace {

// int_{-inf}^{y_hi} chi0 Q0 Lambda / (k^2 + Lambda^2) dy
double prelimit_y_integral(const CoefficientModel& m, double k, double y_hi) {
    const auto& c = m.params();
    const double M0 = c.M0, Mb = m.blend_end();
    auto h = [&](double y) {
        const double L = m.Lambda(y);
        return m.chi0(y) * m.Q0(y) * L / (k * k + L * L);
    };
    double total = 0.0;

    // left tail in t = ln|y|
    const double t0 = std::log(std::max(Mb, -y_hi));
    if (y_hi > -1e300) {
        const double tc = -std::log(k) / c.beta;
        const double t_end = std::max(tc, t0) + 40.0 / (c.n_exp + c.beta - 1.0) + 2.0;
        auto ht = [&](double t) {
            const double y = -std::exp(t);
            return h(y) * std::exp(t);
        };
        for (double t = t0; t < t_end; t += 1.0) total += gk(ht, t, std::min(t + 1.0, t_end)).value;
    }
    const double cuts[4] = {-Mb, -M0, M0, Mb};
    for (int i = 0; i < 3; ++i) {
        const double lo = cuts[i], hi = std::min(cuts[i + 1], y_hi);
        if (hi > lo) total += gk(h, lo, hi).value;
    }
    if (y_hi > Mb) {
        if (y_hi >= 1e299) {
            auto r = improper_fat_tail_integral(h, Mb, c.sigma, 1e4 * Mb, 1e-12);
            total += r.value;
        } else {
            for (double lo = Mb; lo < y_hi; lo *= 4.0) total += gk(h, lo, std::min(4.0 * lo, y_hi)).value;
        }
    }
    return total;
}

}  // namespace

double prelimit_nu(const CoefficientModel& m, double eps, double xi, int dim, double y_hi) {
    const auto& c = m.params();
    const double mu = compute_mu(c);
    const double norm = std::pow(eps, -mu) * eps / (m.B0() * std::pow(xi, 1.0 + mu));
    auto at = [&](double v1) {
        const double kv = eps * xi * std::abs(v1);
        if (!(kv > 1e-300)) return 0.0;
        return (xi * v1) * (xi * v1) * prelimit_y_integral(m, kv, y_hi);
    };
    if (dim == 1) return norm * at(c.V0);
    const double PI = boost::math::constants::pi<double>();
    // (1/2pi) int_0^{2pi} = (2/pi) int_0^{pi/2} by symmetry of |cos|
    auto f = [&](double th) { return at(c.V0 * std::cos(th)); };
    auto r = integrate_gk(f, 0.0, PI / 2.0, 1e-9);
    return norm * (2.0 / PI) * r.value;
}

double extrapolate_nu(double eps1, double nu1, double eps2, double nu2, double mu) {
    const double p = 1.0 - mu;
    const double a = std::pow(eps1, p), b = std::pow(eps2, p);
    return (nu2 * a - nu1 * b) / (a - b);
}

}  // namespace frackin
