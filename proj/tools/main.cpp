#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "appslice/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Declarative app slices over a simulated compute/network fabric"};
    app.require_subcommand(1);

    appslice::RunOptions run_opts;
    auto* run = app.add_subcommand("run", "Run a scenario and write its reports");
    run->add_option("scenario", run_opts.scenario_path, "Scenario file")->required();
    run->add_option("--out", run_opts.out_dir, "Output directory")->required();
    run->add_flag("--best-effort", run_opts.force_best_effort,
                  "Skip slicing, share everything best effort");
    run->add_flag("--no-dynamic", run_opts.no_dynamic,
                  "Keep the initial grants for the whole run");

    appslice::SweepOptions sweep_opts;
    std::string axis = "net";
    auto* sweep = app.add_subcommand("sweep", "Run a service-level sweep, CSV to stdout");
    sweep->add_option("--axis", axis, "net, cpu or joint")->required();
    sweep
        ->add_option("--values", sweep_opts.values,
                     "Service levels; net:cpu pairs on the joint grid")
        ->required();
    sweep->add_option("--base", sweep_opts.base_path, "Base scenario file")->required();

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "Check a scenario without running");
    validate->add_option("scenario", validate_path, "Scenario file")->required();

    std::string presets_dir = "scenarios";
    auto* presets = app.add_subcommand("presets", "Write the shipped scenario presets");
    presets->add_option("--out", presets_dir, "Target directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return appslice::cmd_run(run_opts, std::cout, std::cerr);
        if (sweep->parsed()) {
            auto parsed_axis = appslice::sweep_axis_from_string(axis);
            if (!parsed_axis) {
                std::cerr << "error: --axis: expected net, cpu or joint\n";
                return appslice::kExitValidation;
            }
            sweep_opts.axis = *parsed_axis;
            return appslice::cmd_sweep(sweep_opts, std::cout, std::cerr);
        }
        if (validate->parsed())
            return appslice::cmd_validate(validate_path, std::cout, std::cerr);
        if (presets->parsed())
            return appslice::cmd_presets(presets_dir, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
