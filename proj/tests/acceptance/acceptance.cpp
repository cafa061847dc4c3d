// One line per acceptance criterion. Exit status is nonzero if any line fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "frackin/coefficients.hpp"
#include "frackin/config.hpp"
#include "frackin/diagnostics.hpp"
#include "frackin/experiments.hpp"
#include "frackin/fractional.hpp"
#include "frackin/io.hpp"
#include "frackin/kinetic.hpp"
#include "frackin/particles.hpp"
#include "frackin/special_integrals.hpp"

using namespace frackin;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << "[fail] ";
        }
        detail << what << "; ";
    }
};

std::string g(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.4g", v);
    return b;
}

CoefficientSet reference_set() {
    CoefficientSet c;
    c.sigma = 1.5;
    c.beta = 2.0;
    c.gamma = 2.0;
    c.n_exp = 2.5;
    c.s_exp = 1.3;
    c.M0 = 2.0;
    c.c_plus = c.c_minus = 0.2;
    c.A0 = c.A1 = c.V0 = 1.0;
    c.interior_blend_width = 0.5;
    c.lambda_plateau = 1.25;
    return c;
}

int hardware_threads() { return std::max(1u, std::min(8u, std::thread::hardware_concurrency())); }

void add_checks(Outcome& o, const ExperimentResult& r, const std::string& filter = "") {
    for (const auto& c : r.checks)
        if (filter.empty() || c.name.find(filter) != std::string::npos)
            o.require(c.pass, c.name + ": " + c.detail);
}

// 1
void parameter_gate(Outcome& o) {
    struct Case {
        std::string label;
        CoefficientSet c;
        bool ok;
        std::vector<std::string> violated;
    };
    auto ref = reference_set();
    auto s12 = ref;
    s12.s_exp = 1.2;
    auto sig1 = ref;
    sig1.sigma = 1.0;
    auto n3 = ref;
    n3.n_exp = 3.0;
    const std::vector<Case> cases = {
        {"reference", ref, true, {}},
        {"s=1.2", s12, false, {"s*beta > beta+sigma-1"}},
        {"sigma=1", sig1, false, {"sigma > 1"}},
        {"n=3 (mu=1)", n3, false, {"beta > n-1", "mu in (0,1)"}},
    };
    for (const auto& k : cases) {
        const auto r = validate_parameters(k.c);
        bool match = r.ok == k.ok && r.violated.size() == k.violated.size();
        for (const auto& v : k.violated) match = match && r.has(v);
        o.require(match, k.label + (r.ok ? " ok" : " rejected (" + std::to_string(r.violated.size()) + " violated)"));
    }
}

// 2
void lemma_suite(Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const double q = lemma_integral_pole2(0.0, 1.0, 2.0);
    o.require(std::abs(q - std::numbers::pi / 4) <= 1e-12, "pi/4 case err " + g(std::abs(q - std::numbers::pi / 4)));
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const bool first = i % 2 == 0;
        const double b = 0.5 + 2.5 * U(gen);
        const double alpha = -1.0 + (first ? 2.0 * b : b) * (0.05 + 0.9 * U(gen));
        const double a = std::exp(-3.0 + 6.0 * U(gen));
        const double closed = first ? lemma_integral_pole2(alpha, b, a) : lemma_integral_pole1(alpha, b, a);
        const auto d = first ? lemma_integral_pole2_direct(alpha, b, a) : lemma_integral_pole1_direct(alpha, b, a);
        worst = std::max(worst, std::abs(d.value / closed - 1.0));
    }
    o.require(worst <= 1e-9, "20 random cases, max rel err " + g(worst));
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(sec < 5.0, "runtime " + g(sec) + " s");
}

// 3
void chi_pipeline(Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto c = reference_set();
    CoefficientModel m(c);
    const double y = -1e3 * c.M0;
    const double Cm = 1.0 / (c.c_minus * c.A1 * (c.n_exp - c.sigma));
    // chi0(y) by quadrature of 1/(D Q0) from -inf, independent of the closed tail
    auto r = improper_fat_tail_integral([&](double u) { return 1.0 / (m.D(-u) * m.Q0(-u)); }, -y,
                                        c.n_exp + 1.0 - c.sigma);
    const double tail = Cm * std::pow(-y, c.sigma - c.n_exp);
    const double e1 = std::abs(m.chi0(y) / tail - 1.0), e2 = std::abs(r.value / tail - 1.0);
    o.require(r.converged, "tail quadrature converged");
    o.require(e1 <= 1e-6 && e2 <= 1e-6, "chi0 tail rel err " + g(e1) + ", quadrature " + g(e2));
    const double nu = compute_nu(m, 1);
    const double n1 = prelimit_nu(m, 1e-3, 1.0, 1), n2 = prelimit_nu(m, 1e-4, 1.0, 1);
    const double ex = extrapolate_nu(1e-3, n1, 1e-4, n2, compute_mu(c));
    o.require(std::abs(ex / nu - 1.0) <= 0.01, "pre-limit " + g(n1 / nu) + ", " + g(n2 / nu) +
                                                 " of nu, extrapolated " + g(ex / nu));
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(sec < 30.0, "runtime " + g(sec) + " s");
}

ExperimentConfig reference_config() {
    auto c = load_config(FRACKIN_REFERENCE_CONFIG);
    c.run.threads = hardware_threads();
    c.output.snapshots = false;
    return c;
}

// 4
void kinetic_invariants(Outcome& o, const fs::path& work) {
    const auto t0 = std::chrono::steady_clock::now();
    auto c = reference_config();
    CoefficientModel m(c.coefficients);
    const double eps = 0.1;
    const auto ctx = make_scaling_context(m, eps, c.dim);
    KineticSolver S(m, ctx, make_phase_grid(m, ctx, c.grid), {true, true, true, c.run.threads});
    {
        auto s = S.init_state(sample_profile({1.0, {}}, c.grid.L, c.grid.Nx));
        const auto q0 = s.q;
        double umax = 0.0, dev = 0.0;
        for (double v : q0) umax = std::max(umax, v);
        for (int i = 0; i < 50; ++i) S.step(s);
        for (std::size_t i = 0; i < q0.size(); ++i) dev = std::max(dev, std::abs(s.q[i] - q0[i]));
        o.require(dev <= 1e-10 * umax, "stationarity residual " + g(dev / umax));
    }
    auto e2 = c;
    e2.experiment.id = "E2";
    e2.eps = {eps};
    const auto r = run_experiment(e2, work / "E2");
    add_checks(o, r);
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(sec < 300.0, "runtime " + g(sec) + " s");
}

// 5
void e1_limit(Outcome& o, const fs::path& dir) {
    const auto t0 = std::chrono::steady_clock::now();
    auto c = reference_config();
    c.experiment.id = "E1";
    add_checks(o, run_experiment(c, dir));
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(sec < 1800.0, "runtime " + g(sec) + " s");
}

// 6
void fractional_suite(Outcome& o) {
    const double L = 2 * std::numbers::pi;
    const int N = 128;
    MacroField rough;
    rough.L = L;
    for (int i = 0; i < N; ++i) {
        const double x = (i + 0.5) * L / N;
        rough.values.push_back(1.0 + 0.5 * std::cos(x) + (x > 2.0 && x < 2.8 ? 0.8 : 0.0));
    }
    auto maxdiff = [](const MacroField& a, const MacroField& b) {
        double d = 0.0;
        for (int i = 0; i < a.Nx(); ++i) d = std::max(d, std::abs(a.values[i] - b.values[i]));
        return d;
    };
    const auto whole = fractional_solve({0.5, 1.75, rough}, 0.5);
    const auto part = fractional_solve({0.5, 1.75, fractional_solve({0.5, 1.75, rough}, 0.2)}, 0.3);
    const double es = maxdiff(whole, part);
    o.require(es <= 1e-12, "semigroup " + g(es));

    MacroField smooth = rough, heat = rough;
    const double nu = 0.4, t = 0.3;
    for (int i = 0; i < N; ++i) {
        const double x = (i + 0.5) * L / N;
        smooth.values[i] = 1.0 + std::cos(x) + 0.2 * std::sin(6 * x);
        heat.values[i] = 1.0 + std::exp(-nu * t) * std::cos(x) + 0.2 * std::exp(-36 * nu * t) * std::sin(6 * x);
    }
    const double eh = maxdiff(fractional_solve({nu, 2.0, smooth}, t), heat);
    o.require(eh <= 1e-10, "mu=1 vs heat " + g(eh));

    MacroField mode = rough;
    for (int i = 0; i < N; ++i) mode.values[i] = std::cos((i + 0.5) * L / N);
    const double f = std::exp(-std::pow(2 * std::numbers::pi / L, 1.75) * 0.5);
    const auto out = fractional_solve({1.0, 1.75, mode}, 0.5);
    double em = std::abs(mode_decay(1.0, 1.75, L, 1, 0.5) - f);
    for (int i = 0; i < N; ++i) em = std::max(em, std::abs(out.values[i] - f * mode.values[i]));
    o.require(em <= 1e-12, "single mode " + g(em));

    std::vector<double> x;
    for (double v = -20.0; v <= 20.0; v += 0.25) x.push_back(v);
    const auto p = self_similar_profile(1.0 + 1e-8, 1.0, 1.0, x);
    double ec = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        ec = std::max(ec, std::abs(p.values[i] - 1.0 / (std::numbers::pi * (1.0 + x[i] * x[i]))));
    o.require(ec <= 1e-6, "order 1 profile vs Cauchy " + g(ec));
}

// 7
void particle_suite(Outcome& o, const fs::path& dir) {
    const auto t0 = std::chrono::steady_clock::now();
    auto c = reference_config();
    CoefficientModel m(c.coefficients);
    {
        const auto ctx = make_scaling_context(m, 1.0, 1);
        ParticleOptions po;
        po.freeze_y = true;
        po.move_x = false;
        po.lambda = [](double y) { return y < 0 ? 1.0 : 3.0; };
        po.lambda_max = 4.0;
        po.threads = c.run.threads;
        ParticleSimulator S(m, ctx, po);
        double worst = 0.0;
        for (double y0 : {-1.0, 1.0}) {
            auto e = S.init({.N = 100000, .seed = 5, .y_mode = InitY::Fixed, .y_fixed = y0});
            S.simulate(e, 1.0);
            const double expected = (y0 < 0 ? 1.0 : 3.0) * S.rate_coef() * 1.0 * e.particles.size();
            worst = std::max(worst, std::abs(e.jumps / expected - 1.0));
        }
        o.require(worst < 0.02, "two-level thinning rel err " + g(worst));
    }
    auto e3 = c;
    e3.experiment.id = "E3";
    e3.eps = {0.05};
    e3.run.N = 100000;
    const auto r = run_experiment(e3, dir);
    add_checks(o, r, "KS");
    add_checks(o, r, "Hill");
    add_checks(o, r, "L1");
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(sec < 1200.0, "runtime " + g(sec) + " s");
}

// 8
void flux_probe(Outcome& o, const fs::path& dir) {
    auto c = reference_config();
    c.experiment.id = "E4";
    c.eps = {0.2, 0.1, 0.05, 0.02};
    c.grid.cfl = 0.1;
    c.grid.scheme = TransportScheme::Muscl;
    // both probed modes must be present in the data
    c.experiment.rho0 = {1.0, {{1, 0.5}, {2, 0.25}}};
    c.experiment.probe_modes = {1, 2};
    add_checks(o, run_experiment(c, dir));
}

// 9
void reproducibility(Outcome& o, const std::vector<fs::path>& dirs) {
    for (const auto& d : dirs) {
        if (!fs::exists(d / "manifest.txt")) {
            o.require(false, d.filename().string() + ": no manifest");
            continue;
        }
        const auto v = verify_manifest(d);
        const auto m = parse_manifest(read_text(d / "manifest.txt"));
        std::string miss;
        for (const auto& s : v.mismatches) miss += " " + s;
        o.require(v.ok, d.filename().string() + ": " + std::to_string(m.outputs.size()) + " hashes" + miss);
    }
}

}  // namespace

int main(int argc, char** argv) {
    fs::path work = "acceptance_runs";
    std::vector<int> only;
    for (int i = 1; i < argc; ++i) {
        if (!std::strcmp(argv[i], "--work") && i + 1 < argc) work = argv[++i];
        else if (!std::strcmp(argv[i], "--only") && i + 1 < argc) only.push_back(std::atoi(argv[++i]));
        else {
            std::fprintf(stderr, "usage: %s [--work DIR] [--only N]...\n", argv[0]);
            return 2;
        }
    }
    fs::create_directories(work);
    const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria = {
        {"parameter gate", parameter_gate},
        {"scaling integral oracles", lemma_suite},
        {"chi0 / B0 / nu pipeline", chi_pipeline},
        {"kinetic solver invariants", [&](Outcome& o) { kinetic_invariants(o, work); }},
        {"E1 limit check", [&](Outcome& o) { e1_limit(o, work / "E1"); }},
        {"fractional solver", fractional_suite},
        {"particle suite", [&](Outcome& o) { particle_suite(o, work / "E3"); }},
        {"E4 flux probe", [&](Outcome& o) { flux_probe(o, work / "E4"); }},
        {"reproducibility", [&](Outcome& o) {
             std::vector<fs::path> dirs;
             for (const char* id : {"E1", "E2", "E3", "E4"})
                 if (fs::exists(work / id / "manifest.txt")) dirs.push_back(work / id);
             if (dirs.empty()) {
                 auto c = reference_config();
                 c.eps = {0.2};
                 run_experiment(c, work / "E1");
                 dirs.push_back(work / "E1");
             }
             reproducibility(o, dirs);
         }},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            criteria[i].second(o);
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %d %s: %s (%.1f s) %s\n", id, o.pass ? "PASS" : "FAIL", criteria[i].first, sec,
                    o.detail.str().c_str());
        std::fflush(stdout);
        failed += !o.pass;
    }
    std::printf("%d criteria failed\n", failed);
    return failed ? 1 : 0;
}
