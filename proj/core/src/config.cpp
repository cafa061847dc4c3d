#include "frackin/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "frackin/errors.hpp"

namespace frackin {

namespace pt = boost::property_tree;

const std::map<std::string, std::vector<std::string>>& config_schema() {
    static const std::map<std::string, std::vector<std::string>> s = {
        {"coefficients",
         {"sigma", "beta", "gamma", "n_exp", "s_exp", "M0", "c_plus", "c_minus", "A0", "A1", "V0",
          "lambda_plateau", "interior_blend_width"}},
        {"scaling", {"eps", "dim"}},
        {"grid",
         {"L", "Nx", "Ny", "Y_max", "tail_mass", "dt", "cfl", "v_order", "cells_per_band",
          "y_scale_min", "scheme", "dt_sde"}},
        {"run", {"T", "N", "seed", "snapshot_every", "threads"}},
        {"experiment",
         {"id", "rho0_mean", "rho0_modes", "probe_modes", "k_fraction", "slack", "deviation_slack",
          "histogram_bins"}},
        {"output", {"dir", "snapshots", "run_log"}},
    };
    return s;
}

std::string format_double(double v) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

namespace {

const std::vector<std::string> kRequired = {
    "coefficients.sigma", "coefficients.beta",   "coefficients.gamma",   "coefficients.n_exp",
    "coefficients.s_exp", "coefficients.M0",     "coefficients.c_plus",  "coefficients.c_minus",
    "coefficients.A0",    "coefficients.A1",     "coefficients.V0",      "coefficients.lambda_plateau",
    "scaling.eps",        "scaling.dim"};

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) {
        cur = trim(cur);
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

std::string valid_keys_text() {
    std::ostringstream os;
    for (const auto& [sec, keys] : config_schema()) {
        os << "  [" << sec << "]";
        for (const auto& k : keys) os << ' ' << k;
        os << '\n';
    }
    return os.str();
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const char* b = v.data();
    const char* e = v.data() + v.size();
    auto r = std::from_chars(b, e, out);
    if (r.ec != std::errc() || r.ptr != e) throw InputError(key + ": not a number: '" + v + "'");
    return out;
}

long long to_int(const std::string& key, const std::string& v) {
    long long out = 0;
    auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size())
        throw InputError(key + ": not an integer: '" + v + "'");
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw InputError(key + ": not a boolean: '" + v + "'");
}

class Reader {
public:
    explicit Reader(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}
    bool has(const std::string& k) const { return kv_.count(k) != 0; }
    const std::string& str(const std::string& k) const { return kv_.at(k); }
    template <class F>
    void opt(const std::string& k, F&& f) const {
        if (has(k)) f(kv_.at(k));
    }

private:
    std::map<std::string, std::string> kv_;
};

}  // namespace

ExperimentConfig parse_config(const std::string& ini_text,
                              const std::vector<std::string>& overrides) {
    pt::ptree tree;
    try {
        std::istringstream is(ini_text);
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw InputError(std::string("config parse error: ") + e.what());
    }
    std::map<std::string, std::string> kv;
    const auto& schema = config_schema();
    auto check_key = [&](const std::string& sec, const std::string& key) {
        auto it = schema.find(sec);
        if (it == schema.end() ||
            std::find(it->second.begin(), it->second.end(), key) == it->second.end())
            throw InputError("unknown config key '" + sec + "." + key + "'; valid keys:\n" +
                             valid_keys_text());
    };
    for (const auto& [sec, sub] : tree) {
        if (sub.empty()) throw InputError("config key '" + sec + "' outside any section");
        for (const auto& [key, val] : sub) {
            check_key(sec, key);
            kv[sec + "." + key] = trim(val.data());
        }
    }
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        const auto dot = o.find('.');
        if (eq == std::string::npos || dot == std::string::npos || dot > eq)
            throw InputError("override must look like section.key=value: '" + o + "'");
        const std::string sec = trim(o.substr(0, dot)), key = trim(o.substr(dot + 1, eq - dot - 1));
        check_key(sec, key);
        kv[sec + "." + key] = trim(o.substr(eq + 1));
    }
    for (const auto& k : kRequired)
        if (!kv.count(k)) throw InputError("missing required config key '" + k + "'");

    Reader r(std::move(kv));
    ExperimentConfig c;
    auto D = [&](const std::string& k) { return to_double(k, r.str(k)); };
    auto& cf = c.coefficients;
    cf.sigma = D("coefficients.sigma");
    cf.beta = D("coefficients.beta");
    cf.gamma = D("coefficients.gamma");
    cf.n_exp = D("coefficients.n_exp");
    cf.s_exp = D("coefficients.s_exp");
    cf.M0 = D("coefficients.M0");
    cf.c_plus = D("coefficients.c_plus");
    cf.c_minus = D("coefficients.c_minus");
    cf.A0 = D("coefficients.A0");
    cf.A1 = D("coefficients.A1");
    cf.V0 = D("coefficients.V0");
    cf.lambda_plateau = D("coefficients.lambda_plateau");
    r.opt("coefficients.interior_blend_width",
          [&](const std::string& v) { cf.interior_blend_width = to_double("interior_blend_width", v); });

    for (const auto& e : split(r.str("scaling.eps"), ',')) {
        const double v = to_double("scaling.eps", e);
        if (!(v > 0.0)) throw InputError("scaling.eps values must be positive");
        c.eps.push_back(v);
    }
    if (c.eps.empty()) throw InputError("scaling.eps needs at least one value");
    c.dim = static_cast<int>(to_int("scaling.dim", r.str("scaling.dim")));
    if (c.dim != 1 && c.dim != 2) throw InputError("scaling.dim must be 1 or 2");

    auto& g = c.grid;
    r.opt("grid.L", [&](auto& v) { g.L = to_double("grid.L", v); });
    r.opt("grid.Nx", [&](auto& v) { g.Nx = static_cast<int>(to_int("grid.Nx", v)); });
    r.opt("grid.Ny", [&](auto& v) { g.Ny = static_cast<int>(to_int("grid.Ny", v)); });
    r.opt("grid.Y_max", [&](auto& v) { g.Y_max = to_double("grid.Y_max", v); });
    r.opt("grid.tail_mass", [&](auto& v) { g.tail_mass = to_double("grid.tail_mass", v); });
    r.opt("grid.dt", [&](auto& v) { g.dt = to_double("grid.dt", v); });
    r.opt("grid.cfl", [&](auto& v) { g.cfl = to_double("grid.cfl", v); });
    r.opt("grid.v_order", [&](auto& v) { g.v_order = static_cast<int>(to_int("grid.v_order", v)); });
    r.opt("grid.cells_per_band",
          [&](auto& v) { g.cells_per_band = to_double("grid.cells_per_band", v); });
    r.opt("grid.y_scale_min", [&](auto& v) { g.y_scale_min = to_double("grid.y_scale_min", v); });
    r.opt("grid.scheme", [&](const std::string& v) {
        if (v == "upwind")
            g.scheme = TransportScheme::Upwind;
        else if (v == "muscl")
            g.scheme = TransportScheme::Muscl;
        else
            throw InputError("grid.scheme must be upwind or muscl");
    });
    r.opt("grid.dt_sde", [&](auto& v) { c.dt_sde = to_double("grid.dt_sde", v); });
    if (g.Nx < 8 || g.Ny < 8) throw InputError("grid.Nx and grid.Ny must be >= 8");

    auto& run = c.run;
    r.opt("run.T", [&](auto& v) { run.T = to_double("run.T", v); });
    r.opt("run.N", [&](auto& v) {
        const auto n = to_int("run.N", v);
        if (n <= 0) throw InputError("run.N must be positive");
        run.N = static_cast<std::size_t>(n);
    });
    r.opt("run.seed", [&](const std::string& v) {
        std::uint64_t s = 0;
        auto res = std::from_chars(v.data(), v.data() + v.size(), s);
        if (res.ec != std::errc() || res.ptr != v.data() + v.size())
            throw InputError("run.seed: not an unsigned integer: '" + v + "'");
        run.seed = s;
    });
    r.opt("run.snapshot_every",
          [&](auto& v) { run.snapshot_every = static_cast<int>(to_int("run.snapshot_every", v)); });
    r.opt("run.threads", [&](auto& v) { run.threads = static_cast<int>(to_int("run.threads", v)); });
    if (!(run.T > 0.0)) throw InputError("run.T must be positive");
    if (run.threads < 1) throw InputError("run.threads must be >= 1");
    if (run.snapshot_every < 1) throw InputError("run.snapshot_every must be >= 1");

    auto& ex = c.experiment;
    r.opt("experiment.id", [&](const std::string& v) {
        if (v != "E1" && v != "E2" && v != "E3" && v != "E4")
            throw InputError("experiment.id must be one of E1 E2 E3 E4");
        ex.id = v;
    });
    r.opt("experiment.rho0_mean",
          [&](auto& v) { ex.rho0.mean = to_double("experiment.rho0_mean", v); });
    r.opt("experiment.rho0_modes", [&](const std::string& v) {
        ex.rho0.modes.clear();
        for (const auto& item : split(v, ',')) {
            const auto colon = item.find(':');
            if (colon == std::string::npos)
                throw InputError("experiment.rho0_modes entries look like k:amplitude");
            const int k = static_cast<int>(to_int("rho0_modes", trim(item.substr(0, colon))));
            if (k <= 0) throw InputError("experiment.rho0_modes wavenumbers must be positive");
            ex.rho0.modes.emplace_back(k, to_double("rho0_modes", trim(item.substr(colon + 1))));
        }
    });
    r.opt("experiment.probe_modes", [&](const std::string& v) {
        ex.probe_modes.clear();
        for (const auto& item : split(v, ','))
            ex.probe_modes.push_back(static_cast<int>(to_int("probe_modes", item)));
    });
    r.opt("experiment.k_fraction",
          [&](auto& v) { ex.k_fraction = to_double("experiment.k_fraction", v); });
    r.opt("experiment.slack", [&](auto& v) { ex.slack = to_double("experiment.slack", v); });
    r.opt("experiment.deviation_slack",
          [&](auto& v) { ex.deviation_slack = to_double("experiment.deviation_slack", v); });
    r.opt("experiment.histogram_bins", [&](auto& v) {
        ex.histogram_bins = static_cast<int>(to_int("experiment.histogram_bins", v));
    });

    auto& out = c.output;
    r.opt("output.dir", [&](const std::string& v) { out.dir = v; });
    r.opt("output.snapshots", [&](auto& v) { out.snapshots = to_bool("output.snapshots", v); });
    r.opt("output.run_log", [&](auto& v) { out.run_log = to_bool("output.run_log", v); });
    return c;
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), overrides);
}

std::string serialize_config(const ExperimentConfig& c) {
    std::ostringstream os;
    auto F = [](double v) { return format_double(v); };
    const auto& cf = c.coefficients;
    os << "[coefficients]\n"
       << "sigma = " << F(cf.sigma) << "\nbeta = " << F(cf.beta) << "\ngamma = " << F(cf.gamma)
       << "\nn_exp = " << F(cf.n_exp) << "\ns_exp = " << F(cf.s_exp) << "\nM0 = " << F(cf.M0)
       << "\nc_plus = " << F(cf.c_plus) << "\nc_minus = " << F(cf.c_minus)
       << "\nA0 = " << F(cf.A0) << "\nA1 = " << F(cf.A1) << "\nV0 = " << F(cf.V0)
       << "\nlambda_plateau = " << F(cf.lambda_plateau)
       << "\ninterior_blend_width = " << F(cf.interior_blend_width) << "\n\n";
    os << "[scaling]\neps = ";
    for (std::size_t i = 0; i < c.eps.size(); ++i) os << (i ? ", " : "") << F(c.eps[i]);
    os << "\ndim = " << c.dim << "\n\n";
    const auto& g = c.grid;
    os << "[grid]\nL = " << F(g.L) << "\nNx = " << g.Nx << "\nNy = " << g.Ny
       << "\nY_max = " << F(g.Y_max) << "\ntail_mass = " << F(g.tail_mass) << "\ndt = " << F(g.dt)
       << "\ncfl = " << F(g.cfl) << "\nv_order = " << g.v_order
       << "\ncells_per_band = " << F(g.cells_per_band) << "\ny_scale_min = " << F(g.y_scale_min)
       << "\nscheme = " << (g.scheme == TransportScheme::Upwind ? "upwind" : "muscl")
       << "\ndt_sde = " << F(c.dt_sde) << "\n\n";
    os << "[run]\nT = " << F(c.run.T) << "\nN = " << c.run.N << "\nseed = " << c.run.seed
       << "\nsnapshot_every = " << c.run.snapshot_every << "\nthreads = " << c.run.threads
       << "\n\n";
    const auto& ex = c.experiment;
    os << "[experiment]\nid = " << ex.id << "\nrho0_mean = " << F(ex.rho0.mean)
       << "\nrho0_modes = ";
    for (std::size_t i = 0; i < ex.rho0.modes.size(); ++i)
        os << (i ? ", " : "") << ex.rho0.modes[i].first << ':' << F(ex.rho0.modes[i].second);
    os << "\nprobe_modes = ";
    for (std::size_t i = 0; i < ex.probe_modes.size(); ++i)
        os << (i ? ", " : "") << ex.probe_modes[i];
    os << "\nk_fraction = " << F(ex.k_fraction) << "\nslack = " << F(ex.slack)
       << "\ndeviation_slack = " << F(ex.deviation_slack)
       << "\nhistogram_bins = " << ex.histogram_bins << "\n\n";
    os << "[output]\ndir = " << c.output.dir
       << "\nsnapshots = " << (c.output.snapshots ? "true" : "false")
       << "\nrun_log = " << (c.output.run_log ? "true" : "false") << "\n";
    return os.str();
}

}  // namespace frackin
