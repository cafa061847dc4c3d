#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "frackin/config.hpp"

namespace frackin {

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct ExperimentResult {
    std::string id;
    std::vector<Check> checks;
    std::vector<std::string> outputs;  // relative to the run directory
    std::map<std::string, std::string> derived;
    std::string summary;

    bool pass() const;
};

ExperimentResult run_E1_kinetic_vs_fractional(const ExperimentConfig& c,
                                              const std::filesystem::path& dir);
ExperimentResult run_E2_entropy_and_bounds(const ExperimentConfig& c,
                                           const std::filesystem::path& dir);
ExperimentResult run_E3_particles_vs_fractional(const ExperimentConfig& c,
                                                const std::filesystem::path& dir);
ExperimentResult run_E4_flux_probe(const ExperimentConfig& c, const std::filesystem::path& dir);

// Dispatch on c.experiment.id, then write manifest.txt into dir.
ExperimentResult run_experiment(const ExperimentConfig& c, const std::filesystem::path& dir);

// Constants shared by every manifest: mu, nu, B0, C_minus, c1.
std::map<std::string, std::string> derived_constants(const ExperimentConfig& c);

struct VerifyResult {
    bool ok = true;
    std::vector<std::string> mismatches;
    std::filesystem::path rerun_dir;
};

// Rebuild the run described by dir/manifest.txt into a sibling directory and compare hashes.
VerifyResult verify_manifest(const std::filesystem::path& dir);

}  // namespace frackin
