#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "frackin/coefficients.hpp"
#include "frackin/kinetic.hpp"

namespace frackin {

struct RunSection {
    double T = 0.5;
    std::size_t N = 100000;
    std::uint64_t seed = 1;
    int snapshot_every = 10;
    int threads = 1;
};

struct ExperimentSection {
    std::string id = "E1";
    CosineProfile rho0{1.0, {{1, 0.5}}};
    std::vector<int> probe_modes{1, 2};
    double k_fraction = 0.05;
    double slack = 1.2;
    double deviation_slack = 1.1;
    int histogram_bins = 64;
};

struct OutputSection {
    std::string dir = "runs/out";
    bool snapshots = true;
    bool run_log = false;
};

struct ExperimentConfig {
    CoefficientSet coefficients;
    std::vector<double> eps;
    int dim = 1;
    GridOptions grid;
    double dt_sde = 1e-3;
    RunSection run;
    ExperimentSection experiment;
    OutputSection output;
};

// Flat INI with sections [coefficients] [scaling] [grid] [run] [experiment] [output].
// Physics keys have no defaults; unknown keys raise InputError listing the valid ones.
ExperimentConfig parse_config(const std::string& ini_text,
                              const std::vector<std::string>& overrides = {});
ExperimentConfig load_config(const std::string& path,
                             const std::vector<std::string>& overrides = {});
std::string serialize_config(const ExperimentConfig& c);

// section -> keys accepted by parse_config
const std::map<std::string, std::vector<std::string>>& config_schema();

std::string format_double(double v);

}  // namespace frackin
