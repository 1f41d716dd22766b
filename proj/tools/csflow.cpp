#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "csflow/job.hpp"

namespace {

int run(const std::string& command, const std::string& config, const std::string& out_dir, const std::string& seed) {
    using namespace csflow;
    try {
        JobConfig cfg = load_config(config);
        if (!seed.empty()) {
            try {
                cfg.seed = std::stoull(seed);
            } catch (const std::exception&) {
                throw Error(ErrorKind::Config, "--seed expects a non-negative integer");
            }
        }
        JobResult r = command == "synth" ? run_synth(cfg) : command == "evolve" ? run_evolve(cfg) : run_verify(cfg);
        write_outputs(r, out_dir);
        std::fprintf(r.exit_code == ExitOk ? stdout : stderr, "%s\n", r.message.c_str());
        return r.exit_code;
    } catch (const Error& e) {
        std::fprintf(stderr, "csflow %s: %s\n", command.c_str(), e.what());
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "csflow %s: %s\n", command.c_str(), e.what());
        return ExitConfig;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coherent-state flows: operator synthesis, integration and validation"};
    app.require_subcommand(1);
    std::string config, out_dir = ".", seed;
    for (const char* name : {"synth", "evolve", "verify"}) {
        const char* what = std::string(name) == "synth"    ? "write the operator table"
                           : std::string(name) == "evolve" ? "integrate the flow and export the trajectory"
                                                           : "run the validation suite (exit 4 on failure)";
        auto* sub = app.add_subcommand(name, what);
        sub->add_option("--config", config, "JSON job file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out-dir", out_dir, "directory for output files");
        sub->add_option("--seed", seed, "override the seed for randomized checks");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : csflow::ExitConfig;
    }
    return run(app.get_subcommands().front()->get_name(), config, out_dir, seed);
}
