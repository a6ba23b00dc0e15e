#include "appslice/commands.hpp"

#include <fstream>
#include <ostream>

namespace appslice {

namespace {

void print_diagnostics(const std::vector<Diagnostic>& diags, std::ostream& err) {
    for (const Diagnostic& d : diags)
        err << (d.severity == Severity::Error ? "error: " : "warning: ") << d.path
            << ": " << d.message << "\n";
}

void write_file(const std::filesystem::path& file, const std::string& content) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw Error("cannot write " + file.string());
    out << content;
}

double parse_double_token(const std::string& token) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(token, &used);
    } catch (const std::exception&) {
        throw SchemaError("--values", "not a number: " + token);
    }
    if (used != token.size())
        throw SchemaError("--values", "not a number: " + token);
    return v;
}

}  // namespace

SweepInput parse_sweep_value(SweepAxis axis, const std::string& token) {
    SweepInput input;
    if (axis == SweepAxis::Joint) {
        auto colon = token.find(':');
        if (colon == std::string::npos)
            throw SchemaError("--values", "joint points look like net:cpu, got " + token);
        input.net_mbps = parse_double_token(token.substr(0, colon));
        input.cpu_cores = parse_double_token(token.substr(colon + 1));
    } else if (axis == SweepAxis::Network) {
        input.net_mbps = parse_double_token(token);
    } else {
        input.cpu_cores = parse_double_token(token);
    }
    return input;
}

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err) {
    Scenario sc;
    try {
        sc = load_scenario(options.scenario_path);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    if (options.force_best_effort) sc.best_effort = true;
    if (options.no_dynamic) sc.dynamic_adjustment = false;

    auto diags = validate_scenario(sc);
    print_diagnostics(diags, err);
    if (has_errors(diags)) return kExitValidation;

    RunReport report;
    try {
        report = run_scenario(sc);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    if (report.failure) {
        err << "allocation failed:\n" << report.failure->to_json().dump(2) << "\n";
        return kExitAllocation;
    }

    std::filesystem::create_directories(options.out_dir);
    write_file(options.out_dir / "report.json", report.to_json().dump(2) + "\n");
    write_file(options.out_dir / "metrics.csv", report.metrics_csv());
    write_file(options.out_dir / "adjustments.jsonl", report.adjustments_jsonl());
    out << sc.name << ": alerts=" << report.alerts << " cost=" << report.total_cost
        << " adjustments=" << report.adjustments.size() << "\n";
    return kExitOk;
}

int cmd_sweep(const SweepOptions& options, std::ostream& out, std::ostream& err) {
    Scenario base;
    std::vector<SweepInput> inputs;
    try {
        base = load_scenario(options.base_path);
        for (const std::string& token : options.values)
            inputs.push_back(parse_sweep_value(options.axis, token));
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    if (inputs.empty()) {
        err << "error: --values: at least one point required\n";
        return kExitValidation;
    }

    std::vector<SweepPoint> points;
    try {
        points = run_sweep(base, inputs);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    out << sweep_csv(points);
    return kExitOk;
}

int cmd_validate(const std::filesystem::path& scenario_path, std::ostream& out,
                 std::ostream& err) {
    Scenario sc;
    try {
        sc = load_scenario(scenario_path);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    auto diags = validate_scenario(sc);
    print_diagnostics(diags, err);
    if (has_errors(diags)) return kExitValidation;
    out << sc.name << ": ok\n";
    return kExitOk;
}

int cmd_presets(const std::filesystem::path& out_dir, std::ostream& out,
                std::ostream& err) {
    try {
        std::filesystem::create_directories(out_dir);
        for (const std::string& name : preset_names()) {
            const Scenario sc = make_preset(name);
            const auto file = out_dir / (name + ".json");
            write_file(file, serialize_scenario(sc).dump(2) + "\n");
            out << file.string() << "\n";
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitOk;
}

}  // namespace appslice
