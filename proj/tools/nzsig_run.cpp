#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nzsig/errors.hpp"
#include "nzsig/experiment.hpp"

namespace {

enum ExitCode { kOk = 0, kInvalid = 1, kSolverFailure = 2 };

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Solve two-player nonzero-sum stochastic impulse games by relaxed policy iteration"};
    std::string config_path;
    std::string output_dir;
    std::optional<std::uint64_t> seed;
    int verbosity = 1;
    app.add_option("config", config_path, "Experiment configuration (JSON)");
    app.add_option("-o,--output-dir", output_dir, "Override output.directory");
    app.add_option("-s,--seed", seed, "Override monte_carlo.seed");
    app.add_option("-v,--verbosity", verbosity, "0 silent, 1 one line per grid size, 2 iteration history")
        ->check(CLI::Range(0, 2));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInvalid;
    }
    if (config_path.empty()) {
        std::cerr << app.help();
        return kInvalid;
    }

    try {
        nzsig::ExperimentConfig config = nzsig::load_config(config_path);
        if (!output_dir.empty()) config.output_dir = output_dir;
        if (seed) {
            if (!config.monte_carlo) throw nzsig::ValidationError("--seed given but the configuration has no monte_carlo section");
            config.monte_carlo->sim.seed = *seed;
        }
        const nzsig::RunReport report = nzsig::run(config, &std::cout, verbosity);
        if (verbosity > 0) std::cout << "wrote " << report.sweep_file.string() << '\n';
    } catch (const nzsig::ValidationError& e) {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        if (std::string(e.what()) == "empty configuration") std::cerr << app.help();
        return kInvalid;
    } catch (const nzsig::SolverError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return kSolverFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kSolverFailure;
    }
    return kOk;
}
