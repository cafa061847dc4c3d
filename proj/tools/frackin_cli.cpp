#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>

#include "frackin/coefficients.hpp"
#include "frackin/config.hpp"
#include "frackin/errors.hpp"
#include "frackin/experiments.hpp"
#include "frackin/fractional.hpp"
#include "frackin/io.hpp"
#include "frackin/special_integrals.hpp"

namespace fs = std::filesystem;
using namespace frackin;

namespace {

struct Common {
    std::string config;
    std::vector<std::string> sets;
    std::string out;
    std::uint64_t seed = 0;
    bool has_seed = false;
    int threads = 0;
};

void add_common(CLI::App* sub, Common& c, bool needs_config = true) {
    auto* opt = sub->add_option("--config", c.config, "INI config file");
    if (needs_config) opt->required();
    sub->add_option("--set", c.sets, "override, section.key=value (repeatable)");
    sub->add_option("--out", c.out, "output directory");
    sub->add_option("--seed", c.seed, "random seed")->each([&c](const std::string&) {
        c.has_seed = true;
    });
    sub->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
}

ExperimentConfig resolve(const Common& c) {
    ExperimentConfig cfg = load_config(c.config, c.sets);
    if (const char* env = std::getenv("FRACKIN_THREADS")) {
        try {
            const int t = std::stoi(env);
            if (t >= 1) cfg.run.threads = t;
        } catch (const std::exception&) {
            throw InputError("FRACKIN_THREADS must be a positive integer");
        }
    }
    if (c.threads > 0) cfg.run.threads = c.threads;
    if (c.has_seed) cfg.run.seed = c.seed;
    if (!c.out.empty()) cfg.output.dir = c.out;
    return cfg;
}

int print_result(const ExperimentResult& r, const ExperimentConfig& cfg) {
    std::cout << r.summary << "outputs: " << cfg.output.dir << "\n"
              << (r.pass() ? "all checks passed" : "some checks failed") << '\n';
    return r.pass() ? 0 : 1;
}

int cmd_validate(const Common& c) {
    const auto cfg = resolve(c);
    const auto rep = validate_parameters(cfg.coefficients);
    const double mu = compute_mu(cfg.coefficients);
    if (!rep.ok) {
        std::cout << rep.table() << "mu = " << mu << '\n';
        return 1;
    }
    CoefficientModel m(cfg.coefficients);
    std::cout << std::setprecision(12) << "ok\nmu = " << mu << "\nnu = " << compute_nu(m, cfg.dim)
              << "\nB0 = " << m.B0() << '\n';
    return 0;
}

int cmd_constants(const Common& c) {
    const auto cfg = resolve(c);
    const auto& p = cfg.coefficients;
    CoefficientModel m(p);
    const double alpha = p.beta - p.n_exp;
    std::cout << std::setprecision(12) << "alpha = " << alpha << "\nmu = " << compute_mu(p)
              << "\nc1 = " << c1_closed(alpha, p.beta);
    try {
        std::cout << "\nc2 = " << c2_closed(alpha, p.beta);
    } catch (const DomainError& e) {
        std::cout << "\nc2 = undefined (" << e.what() << ")";
    }
    std::cout << "\nC_minus = " << m.C_minus() << "\nB0 = " << m.B0()
              << "\nchi0_inf = " << m.chi0_inf() << "\nnu = " << compute_nu(m, cfg.dim)
              << "\nq0_interior_amplitude = " << m.q0_interior_amplitude() << '\n';
    return 0;
}

int run_id(const Common& c, const std::string& forced, bool kinetic_only) {
    auto cfg = resolve(c);
    if (!forced.empty()) cfg.experiment.id = forced;
    if (kinetic_only && cfg.experiment.id == "E3") cfg.experiment.id = "E2";
    const auto r = run_experiment(cfg, cfg.output.dir);
    return print_result(r, cfg);
}

int cmd_fractional(const Common& c) {
    const auto cfg = resolve(c);
    const double mu = compute_mu(cfg.coefficients);
    CoefficientModel m(cfg.coefficients);
    const double nu = compute_nu(m, cfg.dim);
    const auto rho0 = sample_profile(cfg.experiment.rho0, cfg.grid.L, cfg.grid.Nx);
    const auto f = fractional_solve({nu, 1.0 + mu, rho0}, cfg.run.T);
    const fs::path dir = cfg.output.dir;
    write_field_csv(dir / "fields/fractional.csv", f);
    Manifest man;
    man.command = "fractional";
    man.config_ini = serialize_config(cfg);
    man.derived = derived_constants(cfg);
    man.outputs["fields/fractional.csv"] = sha256_file(dir / "fields/fractional.csv");
    write_text(dir / "manifest.txt", manifest_text(man));
    std::cout << std::setprecision(12) << "nu = " << nu << " order = " << 1.0 + mu
              << "\nwrote " << (dir / "fields/fractional.csv").string() << '\n';
    return 0;
}

int cmd_report(const std::string& dir, bool verify) {
    const fs::path d = dir;
    const auto m = parse_manifest(read_text(d / "manifest.txt"));
    std::cout << "command: " << m.command << '\n';
    for (const auto& [k, v] : m.derived) std::cout << "  " << k << " = " << v << '\n';
    const fs::path checks = d / ("reports/" + m.command + "_checks.txt");
    if (fs::exists(checks)) std::cout << read_text(checks);
    int code = 0;
    const auto it = m.runtime.find("verdict");
    if (it != m.runtime.end() && it->second != "pass") code = 1;
    if (verify) {
        if (m.command == "fractional") {
            ExperimentConfig cfg = parse_config(m.config_ini);
            cfg.output.dir = d.string() + ".verify";
            const double mu = compute_mu(cfg.coefficients);
            CoefficientModel cm(cfg.coefficients);
            const auto f = fractional_solve(
                {compute_nu(cm, cfg.dim), 1.0 + mu,
                 sample_profile(cfg.experiment.rho0, cfg.grid.L, cfg.grid.Nx)},
                cfg.run.T);
            const fs::path p = fs::path(cfg.output.dir) / "fields/fractional.csv";
            write_field_csv(p, f);
            const bool ok = sha256_file(p) == m.outputs.at("fields/fractional.csv");
            std::cout << (ok ? "verify: all hashes reproduced\n" : "verify: hash mismatch\n");
            return ok ? code : 1;
        }
        const auto v = verify_manifest(d);
        if (v.ok) {
            std::cout << "verify: all " << m.outputs.size() << " output hashes reproduced\n";
        } else {
            std::cout << "verify: mismatches\n";
            for (const auto& s : v.mismatches) std::cout << "  " << s << '\n';
            code = 1;
        }
    }
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"frackin: kinetic chemotaxis fractional-limit toolkit"};
    app.require_subcommand(1);
    Common c;
    std::string report_dir;
    bool verify = false;

    auto* validate = app.add_subcommand("validate", "check parameter assumptions");
    auto* constants = app.add_subcommand("constants", "print derived constants");
    auto* kinetic = app.add_subcommand("kinetic", "kinetic run (E2 bounds, or E1/E4 by config)");
    auto* particles = app.add_subcommand("particles", "particle run (E3)");
    auto* fractional = app.add_subcommand("fractional", "fractional reference solve");
    auto* compare = app.add_subcommand("compare", "kinetic vs fractional sweep (E1)");
    auto* sweep = app.add_subcommand("sweep", "run the experiment named in the config");
    auto* report = app.add_subcommand("report", "summarize a run directory");
    for (auto* s : {validate, constants, kinetic, particles, fractional, compare, sweep})
        add_common(s, c);
    report->add_option("dir", report_dir, "run directory")->required();
    report->add_flag("--verify", verify, "rerun from the manifest and compare output hashes");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (validate->parsed()) return cmd_validate(c);
        if (constants->parsed()) return cmd_constants(c);
        if (kinetic->parsed()) return run_id(c, "", true);
        if (particles->parsed()) return run_id(c, "E3", false);
        if (fractional->parsed()) return cmd_fractional(c);
        if (compare->parsed()) return run_id(c, "E1", false);
        if (sweep->parsed()) return run_id(c, "", false);
        if (report->parsed()) return cmd_report(report_dir, verify);
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
