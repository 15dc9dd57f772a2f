#pragma once

// Batch front end: experiment configuration, command dispatch and artifact
// emission (report.json, trace.csv, final.swlatt).
//
// Exit codes: 0 ok, 2 configuration error, 3 numeric abort (sector change,
// stagnation, Poisson failure, non-finite energy), 4 non-convergence or a
// diagnostic outside its tolerance.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "swflow/errors.hpp"
#include "swflow/optimizer.hpp"
#include "swflow/topology.hpp"

namespace swflow {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumeric = 3, kExitNotConverged = 4 };

class ConfigError : public Error {
public:
    using Error::Error;
};

inline const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"check-identities", "gradcheck", "energy",   "minimize",
                                                "saddle",           "enumerate", "homotopy", "convergence-study"};
    return names;
}

struct Perturbation {
    double gauge_amplitude = 0.0;
    double spinor_amplitude = 0.0;
};

struct TopologyConfig {
    std::optional<IntersectionForm> form;
    CohomologyProfile profile;
    int radius = 1;
    std::vector<int> ns{1, 2, 3, 7};
};

struct ExperimentConfig {
    std::string command;
    LatticeSpec lattice = LatticeSpec::cubic(4);
    bool has_lattice = false;
    Flux flux{};
    std::optional<double> k_constant;
    std::optional<std::vector<double>> k_values;  // per-site, site order
    Perturbation perturbation;
    OptimizerConfig optimizer;
    TopologyConfig topology;
    std::array<int, kDim> winding{};
    int images = 16;
    int identity_samples = 100;
    int gradcheck_directions = 40;
    double gradcheck_step = 1e-5;
    std::vector<int> study_sizes{4, 6, 8};
    std::optional<double> study_reference;
    std::optional<std::filesystem::path> snapshot;
    std::uint64_t seed = 0;
    std::filesystem::path output_dir = "out";
    nlohmann::json echo;  // the validated input, echoed into the report
};

// Strict parse: unknown keys and missing command-specific fields raise
// ConfigError. Relative file paths resolve against base_dir.
ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = ".");
ExperimentConfig load_config(const std::filesystem::path& path);

ScalarCurvatureField make_k_field(const ExperimentConfig& cfg, const LatticeSpec& spec);

// Constant-flux background plus seeded perturbations. Throws
// BranchSafetyError when a plaquette angle reaches pi/2.
Configuration seed_initial(const ExperimentConfig& cfg);
Configuration seed_initial(const ExperimentConfig& cfg, const LatticeSpec& spec);

struct RunResult {
    int exit_code = kExitOk;
    nlohmann::json report;
};

// Runs the configured command and writes its artifacts into output_dir.
// Numeric aborts are caught and reported with exit code 3.
RunResult run(const ExperimentConfig& cfg);

nlohmann::json error_json(const std::string& kind, const std::string& message);

}  // namespace swflow
