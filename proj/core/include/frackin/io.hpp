#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "frackin/kinetic.hpp"
#include "frackin/particles.hpp"

namespace frackin {

// Plain table: header row, comma separated, '.' decimal.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row);
    std::string text() const;
};

std::string fmt(double v);  // %.12g style, fixed locale

void write_text(const std::filesystem::path& p, const std::string& text);
std::string read_text(const std::filesystem::path& p);
void write_field_csv(const std::filesystem::path& p, const MacroField& f);
MacroField read_field_csv(const std::filesystem::path& p);

// Binary snapshot: little-endian header (magic, dims, time, L, x centres,
// velocity nodes and weights, y faces and centres) then q row-major (x, v, y).
// Writes a sidecar "<path>.txt" with readable metadata.
void write_snapshot(const std::filesystem::path& p, const PhaseGrid& g, const KineticState& s);
KineticState read_snapshot(const std::filesystem::path& p, PhaseGrid* grid = nullptr);

// One record per particle: x, v0, v1, y, z, run_start, stream position.
void write_particles(const std::filesystem::path& p, const ParticleEnsemble& e);
ParticleEnsemble read_particles(const std::filesystem::path& p);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& p);

// Manifest: the resolved config under [config.*], derived constants, output
// hashes relative to the run directory, and an unhashed [runtime] section.
struct Manifest {
    std::string command;
    std::string config_ini;
    std::map<std::string, std::string> derived;
    std::map<std::string, std::string> outputs;  // relative path -> sha256
    std::map<std::string, std::string> runtime;
};

std::string manifest_text(const Manifest& m);
Manifest parse_manifest(const std::string& text);

}  // namespace frackin
