#ifndef APPSLICE_SPEC_MODEL_HPP
#define APPSLICE_SPEC_MODEL_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "appslice/errors.hpp"

namespace appslice {

using json = nlohmann::ordered_json;

enum class Tier { Device, Edge, Cloud };

const char* to_string(Tier tier);
std::optional<Tier> tier_from_string(std::string_view s);

/// Network requirements of one function, describing the link that feeds it.
/// Rates are Mbps, latency is milliseconds. `duration_ms` empty means the
/// slice holds for the whole run ("auto" in the external format).
struct NetworkReq {
    double latency_ms = 0;
    double throughput_gbr_mbps = 0;
    double throughput_mbr_mbps = 0;
    double packet_error_rate = 0;
    std::optional<double> duration_ms;

    bool operator==(const NetworkReq&) const = default;
};

/// Compute requirements of one function. CPU is integer millicpu, memory is
/// bytes. `tier` empty means the placement is free to choose ("auto").
struct ComputeReq {
    std::int64_t min_millicpu = 0;
    std::int64_t max_millicpu = 0;
    std::int64_t min_memory_bytes = 0;
    std::int64_t max_memory_bytes = 0;
    std::optional<Tier> tier;

    bool operator==(const ComputeReq&) const = default;
};

struct FunctionSliceSpec {
    NetworkReq network;
    ComputeReq compute;

    bool operator==(const FunctionSliceSpec&) const = default;
};

/// Application-wide targets, checked once at admission.
struct AppLevelSpec {
    double latency_ms = 0;
    double bandwidth_mbps = 0;
    int device_count = 1;
    double reliability = 1.0;

    bool operator==(const AppLevelSpec&) const = default;
};

struct FunctionDef {
    std::string name;
    std::vector<std::string> instances;
    // Resolved from the slice document; stays empty until resolution.
    std::optional<FunctionSliceSpec> slice;

    bool operator==(const FunctionDef&) const = default;
};

/// Directed edge between two function instances.
struct AppEdge {
    std::string from_instance;
    std::string to_instance;

    bool operator==(const AppEdge&) const = default;
};

struct AppSpec {
    std::string app_name;
    std::vector<FunctionDef> functions;
    std::vector<AppEdge> edges;

    const FunctionDef* find_function(std::string_view name) const;
    const FunctionDef* function_of_instance(std::string_view instance) const;

    bool operator==(const AppSpec&) const = default;
};

struct AppSliceSpec {
    AppLevelSpec application;
    std::map<std::string, FunctionSliceSpec> per_function;

    bool operator==(const AppSliceSpec&) const = default;
};

enum class Severity { Warning, Error };

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string path;
    std::string message;

    bool operator==(const Diagnostic&) const = default;
};

bool has_errors(const std::vector<Diagnostic>& diags);

struct ParsedSpec {
    AppSpec app;
    AppSliceSpec app_slice;

    bool operator==(const ParsedSpec&) const = default;
};

/// Parses a document with top-level keys "app" and "appSlice". Fills
/// defaults (duration, tier), resolves per-function slices onto the app
/// functions, and enforces document-local invariants. Unknown fields are
/// rejected. Throws SyntaxError, SchemaError or ValidationError.
ParsedSpec parse_spec(const json& document);
ParsedSpec parse_spec_text(const std::string& text);

/// Inverse of parse_spec: emits the canonical external form (explicit
/// "auto" values, millicpu strings, suffixed memory quantities).
json serialize_spec(const ParsedSpec& spec);

/// Cross-checks the slice against the app. Errors for slice entries naming
/// unknown functions and for functions without a slice entry; a warning when
/// per-function guaranteed rates sum above the application bandwidth.
std::vector<Diagnostic> validate_against_app(const AppSliceSpec& slice,
                                             const AppSpec& app);

/// The bundled real-time monitoring pipeline: six functions, a four-edge
/// chain from the video sensor to the alerts manager plus one side input
/// from the biometrics manager, and the baseline slice (5 Mbps guaranteed
/// into face detection, 2000 millicpu for it).
ParsedSpec canonical_rtm_spec();

// Graph helpers over the instance-level edge list, projected to functions.
std::vector<std::string> upstream_functions(const AppSpec& app,
                                            const std::string& function);
/// Deterministic topological order of the function projection; ready nodes
/// are taken in declaration order. Throws ValidationError on a cycle.
std::vector<std::string> topological_function_order(const AppSpec& app);

// Quantity parsing shared by the slice document and scenario readers.
std::int64_t parse_cpu_quantity(const json& value, const std::string& path);
std::int64_t parse_memory_quantity(const json& value, const std::string& path);
std::string format_cpu_quantity(std::int64_t millicpu);
json format_memory_quantity(std::int64_t bytes);

}  // namespace appslice

#endif  // APPSLICE_SPEC_MODEL_HPP
