#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "csflow/dynamics.hpp"
#include "csflow/error.hpp"
#include "csflow/synth.hpp"
#include "csflow/validation.hpp"

namespace csflow {

enum ExitCode : int { ExitOk = 0, ExitConfig = 2, ExitNumerical = 3, ExitValidation = 4 };

// Config-shaped errors exit 2, numerical breakdowns exit 3.
int exit_code_for(ErrorKind k);

enum class Preset { Su2, Su3, Grassmann, Oscillator, Algebra };

struct Outputs {
    bool operators = false;
    bool field = false;
    bool trajectory = false;
    bool phase = false;
    bool validation = false;
};

struct JobConfig {
    std::string source = "config"; // file name used in error messages
    Preset preset = Preset::Su2;
    int rank = 0;                            // algebra: A_rank
    std::optional<std::string> custom_table; // algebra: custom root table as JSON text
    Chart chart = Chart::Matrix;
    std::optional<std::vector<Rational>> weight; // absent: symbolic weights
    std::vector<int> degenerate;
    int m = 1, n = 1; // grassmann Z is m x n; oscillator uses n
    RiccatiVariant variant = RiccatiVariant::Compact;
    LinearHamiltonian hamiltonian;
    std::optional<RiccatiBlocks> blocks;
    Eigen::MatrixXcd omega;
    Eigen::VectorXcd force;
    CVec z0;
    double t_end = 0;
    IntegratorOptions integrator;
    Outputs outputs;
    std::uint64_t seed = 20240611;
    VerifyOptions verify;
};

// Parses and validates a JSON config: labels must resolve and eps must be hermitian.
// Relative "custom" table paths resolve against base_dir. Throws Error(Config, "source: /pointer: ...").
JobConfig parse_config(const std::string& text, const std::string& source = "config",
                       const std::string& base_dir = ".");
JobConfig load_config(const std::string& path);

// Operator table for algebra presets, weights substituted when given.
Representation build_representation(const JobConfig& cfg);
FlowField build_field(const JobConfig& cfg);
// Phase ingredients where a kernel is known: su2, su3 (integral dominant weight), oscillator.
std::optional<PhaseModel> build_phase_model(const JobConfig& cfg);

struct OutputFile {
    std::string name;
    std::string content;
};

struct JobResult {
    int exit_code = ExitOk;
    std::string message;
    std::vector<OutputFile> files;
};

JobResult run_synth(const JobConfig& cfg);
JobResult run_evolve(const JobConfig& cfg);
JobResult run_verify(const JobConfig& cfg);

void write_outputs(const JobResult& r, const std::string& dir);

} // namespace csflow
