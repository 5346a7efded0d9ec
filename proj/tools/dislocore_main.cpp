#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dislocore/errors.hpp"
#include "dislocore/scenario.hpp"

namespace {

constexpr const char* kModes[] = {"simulate",    "verify-boundary", "verify-pair",
                                  "green-check", "minimize",        "converge",
                                  "sweep"};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dislocore: screw-dislocation simulation and minimization engine"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir = ".";
    bool quiet = false;

    for (const char* mode : kModes) {
        CLI::App* sub = app.add_subcommand(mode, std::string("run a ") + mode + " scenario");
        sub->add_option("--scenario", scenario_path, "scenario JSON file")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_flag("--quiet", quiet, "suppress the summary line");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string mode = app.get_subcommands().front()->get_name();

    try {
        const dislocore::Scenario scenario = dislocore::Scenario::from_file(scenario_path);
        if (scenario.mode() != mode)
            throw dislocore::ConfigError("scenario mode '" + scenario.mode() +
                                         "' does not match subcommand '" + mode + "'");
        return dislocore::run_scenario(scenario, out_dir, quiet).exit_code;
    } catch (const dislocore::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
