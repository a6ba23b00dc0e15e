#ifndef APPSLICE_SCENARIO_HPP
#define APPSLICE_SCENARIO_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "appslice/fabric.hpp"
#include "appslice/rtm_workload.hpp"
#include "appslice/runtime.hpp"
#include "appslice/spec_model.hpp"

namespace appslice {

/// Everything a run needs: fabric, specs, background load, workload trace
/// and calibration. Two runs of an identical scenario produce identical
/// reports byte for byte.
struct Scenario {
    std::string name;
    std::uint64_t seed = 0;
    double duration_s = 0;
    bool best_effort = false;
    bool dynamic_adjustment = true;
    RuntimeConfig runtime;
    FabricConfig fabric;
    ParsedSpec spec;
    PipelineModel pipeline;
    FrameTrace trace;
    CalibrationProfile profile;

    bool operator==(const Scenario&) const = default;
};

Scenario parse_scenario(const json& document);
Scenario load_scenario(const std::filesystem::path& file);
json serialize_scenario(const Scenario& scenario);

/// Cross-document checks that do not fit single-field validation: slice vs
/// app, profile consistency, trace shape, schedule targets, pipeline wiring.
std::vector<Diagnostic> validate_scenario(const Scenario& scenario);

struct RunReport {
    std::string scenario_name;
    int alerts = 0;
    bool alert_floor_clamped = false;
    double total_cost = 0;
    double simulated_s = 0;
    std::optional<Allocation> allocation;
    std::optional<FailureReport> failure;
    std::vector<std::string> admission_notes;
    std::vector<MetricsSample> metrics;
    std::vector<Adjustment> adjustments;
    std::vector<ServicePoint> service;  // per tick, for the target function

    json to_json() const;
    std::string metrics_csv() const;
    std::string adjustments_jsonl() const;
};

RunReport run_scenario(const Scenario& scenario);

enum class SweepAxis { Network, Compute, Joint };

std::optional<SweepAxis> sweep_axis_from_string(std::string_view s);

struct SweepInput {
    std::optional<double> net_mbps;
    std::optional<double> cpu_cores;
};

struct SweepPoint {
    double net_mbps = 0;
    double cpu_cores = 0;
    int alerts = 0;
    std::string bottleneck;  // network | compute | none
};

/// Runs the base scenario once per point with background load pinned so the
/// requested service level is what the fabric leaves available.
std::vector<SweepPoint> run_sweep(const Scenario& base,
                                  const std::vector<SweepInput>& points);
std::string sweep_csv(const std::vector<SweepPoint>& points);

std::vector<std::string> preset_names();
Scenario make_preset(const std::string& name);

}  // namespace appslice

#endif  // APPSLICE_SCENARIO_HPP
