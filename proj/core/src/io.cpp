#include "frackin/io.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "frackin/errors.hpp"

namespace frackin {

namespace fs = std::filesystem;

void CsvTable::add(std::vector<std::string> row) {
    if (row.size() != header.size()) throw InputError("CSV row width differs from header");
    rows.push_back(std::move(row));
}

std::string CsvTable::text() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
        os << '\n';
    }
    return os.str();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_text(const fs::path& p, const std::string& text) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw InputError("cannot write '" + p.string() + "'");
    out << text;
}

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw InputError("cannot read '" + p.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_field_csv(const fs::path& p, const MacroField& f) {
    CsvTable t;
    t.header = {"x", "value"};
    for (int i = 0; i < f.Nx(); ++i) t.add({fmt(f.x(i)), fmt(f.values[i])});
    write_text(p, t.text());
}

MacroField read_field_csv(const fs::path& p) {
    std::istringstream in(read_text(p));
    std::string line;
    std::getline(in, line);
    if (line != "x,value") throw InputError("not a field CSV: '" + p.string() + "'");
    MacroField f;
    std::vector<double> xs;
    while (std::getline(in, line)) {
        const auto c = line.find(',');
        if (c == std::string::npos) continue;
        xs.push_back(std::stod(line.substr(0, c)));
        f.values.push_back(std::stod(line.substr(c + 1)));
    }
    if (xs.size() >= 1) f.L = 2.0 * xs.front() * xs.size();
    f.label = p.stem().string();
    return f;
}

namespace {

constexpr char kMagic[8] = {'F', 'R', 'K', 'S', 'N', 'A', 'P', '1'};
constexpr char kPMagic[8] = {'F', 'R', 'K', 'P', 'A', 'R', 'T', '1'};

template <class T>
T to_le(T v) {
    if constexpr (std::endian::native == std::endian::big) {
        unsigned char b[sizeof(T)];
        std::memcpy(b, &v, sizeof(T));
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
        std::memcpy(&v, b, sizeof(T));
    }
    return v;
}

class Writer {
public:
    explicit Writer(const fs::path& p) {
        if (p.has_parent_path()) fs::create_directories(p.parent_path());
        out_.open(p, std::ios::binary);
        if (!out_) throw InputError("cannot write '" + p.string() + "'");
    }
    void raw(const char* b, std::size_t n) { out_.write(b, static_cast<std::streamsize>(n)); }
    template <class T>
    void put(T v) {
        v = to_le(v);
        raw(reinterpret_cast<const char*>(&v), sizeof v);
    }
    void doubles(const std::vector<double>& v) {
        for (double d : v) put(d);
    }

private:
    std::ofstream out_;
};

class Reader {
public:
    explicit Reader(const fs::path& p) : in_(p, std::ios::binary), path_(p) {
        if (!in_) throw InputError("cannot read '" + p.string() + "'");
    }
    void raw(char* b, std::size_t n) {
        in_.read(b, static_cast<std::streamsize>(n));
        if (!in_) throw InputError("truncated file '" + path_.string() + "'");
    }
    template <class T>
    T get() {
        T v;
        raw(reinterpret_cast<char*>(&v), sizeof v);
        return to_le(v);
    }
    std::vector<double> doubles(std::size_t n) {
        std::vector<double> v(n);
        for (auto& d : v) d = get<double>();
        return v;
    }

private:
    std::ifstream in_;
    fs::path path_;
};

}  // namespace

void write_snapshot(const fs::path& p, const PhaseGrid& g, const KineticState& s) {
    if (s.q.size() != g.size()) throw InputError("state does not match grid");
    Writer w(p);
    w.raw(kMagic, 8);
    w.put<std::uint64_t>(g.Nx);
    w.put<std::uint64_t>(g.Nv());
    w.put<std::uint64_t>(g.Ny());
    w.put<std::uint64_t>(g.vq.dim);
    w.put(s.time);
    w.put(g.L);
    w.put(s.B);
    w.put(g.dt);
    for (int i = 0; i < g.Nx; ++i) w.put((i + 0.5) * g.dx);
    for (int k = 0; k < g.Nv(); ++k) {
        w.put(g.vq.nodes[k][0]);
        w.put(g.vq.nodes[k][1]);
        w.put(g.vq.weights[k]);
    }
    w.doubles(g.yf);
    w.doubles(g.yc);
    w.doubles(s.q);

    std::ostringstream meta;
    meta << "format = frackin kinetic snapshot v1\n"
         << "layout = little-endian f64, q row-major (x, v, y)\n"
         << "Nx = " << g.Nx << "\nNv = " << g.Nv() << "\nNy = " << g.Ny() << "\ndim = " << g.vq.dim
         << "\ntime = " << fmt(s.time) << "\nL = " << fmt(g.L) << "\nB = " << fmt(s.B)
         << "\ndt = " << fmt(g.dt) << "\nY_max = " << fmt(g.Y_max) << "\neps = " << fmt(s.ctx.eps)
         << "\nmu = " << fmt(s.ctx.mu) << "\nnu = " << fmt(s.ctx.nu) << "\n";
    write_text(fs::path(p.string() + ".txt"), meta.str());
}

KineticState read_snapshot(const fs::path& p, PhaseGrid* grid) {
    Reader r(p);
    char magic[8];
    r.raw(magic, 8);
    if (std::memcmp(magic, kMagic, 8) != 0) throw InputError("not a kinetic snapshot");
    const auto Nx = r.get<std::uint64_t>(), Nv = r.get<std::uint64_t>(),
               Ny = r.get<std::uint64_t>(), dim = r.get<std::uint64_t>();
    KineticState s;
    s.time = r.get<double>();
    const double L = r.get<double>();
    s.B = r.get<double>();
    const double dt = r.get<double>();
    r.doubles(Nx);
    PhaseGrid g;
    g.L = L;
    g.Nx = static_cast<int>(Nx);
    g.dx = L / Nx;
    g.dt = dt;
    g.vq.dim = static_cast<int>(dim);
    for (std::uint64_t k = 0; k < Nv; ++k) {
        const double a = r.get<double>(), b = r.get<double>(), w = r.get<double>();
        g.vq.nodes.push_back({a, b});
        g.vq.weights.push_back(w);
    }
    g.yf = r.doubles(Ny + 1);
    g.yc = r.doubles(Ny);
    for (std::uint64_t j = 0; j < Ny; ++j) g.h.push_back(g.yf[j + 1] - g.yf[j]);
    g.Y_max = g.yf.back();
    s.q = r.doubles(Nx * Nv * Ny);
    if (grid) *grid = std::move(g);
    return s;
}

void write_particles(const fs::path& p, const ParticleEnsemble& e) {
    Writer w(p);
    w.raw(kPMagic, 8);
    w.put<std::uint64_t>(e.particles.size());
    w.put<std::uint64_t>(e.seed);
    w.put(e.time);
    w.put(e.L);
    for (std::size_t i = 0; i < e.particles.size(); ++i) {
        const auto& q = e.particles[i];
        w.put(q.x);
        w.put(q.v[0]);
        w.put(q.v[1]);
        w.put(q.y);
        w.put(q.z);
        w.put(q.run_start);
        w.put<std::uint64_t>(e.stream_pos[i]);
    }
    std::ostringstream meta;
    meta << "format = frackin particle snapshot v1\n"
         << "record = x v0 v1 y z run_start (f64) stream_pos (u64), little-endian\n"
         << "N = " << e.particles.size() << "\nseed = " << e.seed << "\ntime = " << fmt(e.time)
         << "\nL = " << fmt(e.L) << "\neps = " << fmt(e.ctx.eps) << "\n";
    write_text(fs::path(p.string() + ".txt"), meta.str());
}

ParticleEnsemble read_particles(const fs::path& p) {
    Reader r(p);
    char magic[8];
    r.raw(magic, 8);
    if (std::memcmp(magic, kPMagic, 8) != 0) throw InputError("not a particle snapshot");
    ParticleEnsemble e;
    const auto N = r.get<std::uint64_t>();
    e.seed = r.get<std::uint64_t>();
    e.time = r.get<double>();
    e.L = r.get<double>();
    e.particles.resize(N);
    e.stream_pos.resize(N);
    for (std::uint64_t i = 0; i < N; ++i) {
        auto& q = e.particles[i];
        q.x = r.get<double>();
        q.v[0] = r.get<double>();
        q.v[1] = r.get<double>();
        q.y = r.get<double>();
        q.z = r.get<double>();
        q.run_start = r.get<double>();
        e.stream_pos[i] = r.get<std::uint64_t>();
    }
    return e;
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw SolverError("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

std::string sha256_file(const fs::path& p) { return sha256_hex(read_text(p)); }

std::string manifest_text(const Manifest& m) {
    std::ostringstream os;
    os << "# frackin run manifest\n[run]\ncommand = " << m.command << "\n\n";
    // config sections are re-emitted with a "config." prefix
    std::istringstream in(m.config_ini);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.front() == '[')
            os << "[config." << line.substr(1) << '\n';
        else
            os << line << '\n';
    }
    os << "\n[derived]\n";
    for (const auto& [k, v] : m.derived) os << k << " = " << v << '\n';
    os << "\n[outputs]\n";
    for (const auto& [k, v] : m.outputs) os << k << " = " << v << '\n';
    os << "\n[runtime]\n";
    for (const auto& [k, v] : m.runtime) os << k << " = " << v << '\n';
    return os.str();
}

Manifest parse_manifest(const std::string& text) {
    Manifest m;
    std::istringstream in(text);
    std::string line, section;
    std::ostringstream cfg;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string();
        return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
    };
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        if (t.front() == '[') {
            section = t.substr(1, t.size() - 2);
            if (section.rfind("config.", 0) == 0) cfg << '[' << section.substr(7) << "]\n";
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw InputError("malformed manifest line: '" + t + "'");
        const std::string k = trim(t.substr(0, eq)), v = trim(t.substr(eq + 1));
        if (section == "run" && k == "command")
            m.command = v;
        else if (section.rfind("config.", 0) == 0)
            cfg << k << " = " << v << '\n';
        else if (section == "derived")
            m.derived[k] = v;
        else if (section == "outputs")
            m.outputs[k] = v;
        else if (section == "runtime")
            m.runtime[k] = v;
    }
    m.config_ini = cfg.str();
    return m;
}

}  // namespace frackin
