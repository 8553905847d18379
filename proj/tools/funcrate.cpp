#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "funcrate/cli/config.hpp"
#include "funcrate/cli/runner.hpp"
#include "funcrate/error.hpp"
#include "funcrate/path_dump.hpp"

namespace {

using namespace funcrate;
using namespace funcrate::cli;

int run_command(const std::string& config_path, const std::string& output_override) {
    ExperimentConfig config = make_experiment(load_config_file(config_path));
    if (!output_override.empty()) {
        config.output = output_override;
    }
    const RunOutcome outcome = run_experiment(config, workers_from_env(), std::cerr);
    for (const auto& [name, ok] : outcome.checks) {
        std::cout << name << ": " << (ok ? "PASS" : "FAIL") << '\n';
    }
    if (outcome.fit) {
        std::cout << "fitted slope: " << outcome.fit->slope << " +/- " << outcome.fit->slope_stderr << '\n';
    }
    if (outcome.exit_code == kExitPass) {
        std::cout << "pass: results in " << config.output.string() << '\n';
    } else {
        std::cerr << outcome.message << '\n';
    }
    return outcome.exit_code;
}

int dump_command(const std::string& config_path, const std::string& file, std::size_t paths) {
    const ExperimentConfig config = make_experiment(load_config_file(config_path));
    require(config.grid.has_value(), Errc::config, "dump needs n_ref and eval_ns");
    const PathBatch batch(config.model, *config.grid, config.path_count, config.master_seed);
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), Errc::io, "cannot open '" + file + "' for writing");
    write_path_dump(out, batch, std::min(paths, batch.size()));
    return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Riemann-sum approximation of integral functionals of Markov processes: "
                 "Monte Carlo error curves and theoretical bounds"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_override;
    auto* run = app.add_subcommand("run", "Run an experiment described by a config file");
    run->add_option("config", config_path, "Experiment config file")->required();
    run->add_option("-o,--output", output_override, "Override the output directory");

    std::vector<std::string> report_inputs;
    auto* rep = app.add_subcommand("report", "Tabulate summary.json files from experiment directories");
    rep->add_option("dirs", report_inputs, "Experiment output directories or summary.json files")->required();

    ConstantsRequest constants;
    auto* con = app.add_subcommand("constants", "Print the theorem's constants and bound values");
    con->add_option("--gamma", constants.gamma, "Holder exponent")->required();
    con->add_option("--alpha", constants.alpha, "Stability index (2 for brownian)")->required();
    con->add_option("--T", constants.T, "Horizon")->required();
    con->add_option("--model", constants.model, "brownian or stable")->required();
    con->add_option("--sigma", constants.sigma, "Brownian scale")->capture_default_str();
    con->add_option("--scale", constants.scale, "Stable scale")->capture_default_str();
    con->add_option("--norm", constants.holder_norm, "Holder norm of h")->capture_default_str();
    con->add_option("--n", constants.ns, "Step counts at which to print the bound")->capture_default_str();

    std::string dump_file;
    std::size_t dump_paths = 1;
    auto* dump = app.add_subcommand("dump", "Write simulated paths in the binary dump format");
    dump->add_option("config", config_path, "Experiment config file")->required();
    dump->add_option("file", dump_file, "Output file")->required();
    dump->add_option("--paths", dump_paths, "Number of paths to write")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitError;
    }

    try {
        if (*run) {
            return run_command(config_path, output_override);
        }
        if (*rep) {
            std::vector<std::filesystem::path> inputs(report_inputs.begin(), report_inputs.end());
            report(inputs, std::cout);
            return kExitPass;
        }
        if (*con) {
            print_constants(constants, std::cout);
            return kExitPass;
        }
        if (*dump) {
            return dump_command(config_path, dump_file, dump_paths);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}
