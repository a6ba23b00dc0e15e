#include "appslice/spec_model.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "json_util.hpp"

namespace appslice {

using detail::as_boolean;
using detail::as_integer;
using detail::as_number;
using detail::as_string;
using detail::expect_array;
using detail::expect_object;
using detail::reject_unknown;
using detail::require_field;

const char* to_string(Tier tier) {
    switch (tier) {
        case Tier::Device: return "device";
        case Tier::Edge: return "edge";
        case Tier::Cloud: return "cloud";
    }
    return "?";
}

std::optional<Tier> tier_from_string(std::string_view s) {
    if (s == "device") return Tier::Device;
    if (s == "edge") return Tier::Edge;
    if (s == "cloud") return Tier::Cloud;
    return std::nullopt;
}

bool has_errors(const std::vector<Diagnostic>& diags) {
    return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) {
        return d.severity == Severity::Error;
    });
}

const FunctionDef* AppSpec::find_function(std::string_view name) const {
    for (const auto& f : functions)
        if (f.name == name) return &f;
    return nullptr;
}

const FunctionDef* AppSpec::function_of_instance(std::string_view instance) const {
    for (const auto& f : functions)
        for (const auto& inst : f.instances)
            if (inst == instance) return &f;
    return nullptr;
}

std::int64_t parse_cpu_quantity(const json& value, const std::string& path) {
    if (value.is_number()) {
        double cores = value.get<double>();
        if (!std::isfinite(cores))
            throw ValidationError(path, "cpu quantity must be finite");
        return std::llround(cores * 1000.0);
    }
    if (value.is_string()) {
        const std::string s = value.get<std::string>();
        if (s.size() >= 2 && s.back() == 'm' &&
            s.find_first_not_of("0123456789") == s.size() - 1) {
            return std::stoll(s.substr(0, s.size() - 1));
        }
        throw SchemaError(path, "expected a core count or a millicpu string like \"2000m\"");
    }
    throw SchemaError(path, "expected a core count or a millicpu string like \"2000m\"");
}

std::int64_t parse_memory_quantity(const json& value, const std::string& path) {
    if (value.is_number_integer() || value.is_number_unsigned())
        return value.get<std::int64_t>();
    if (value.is_string()) {
        const std::string s = value.get<std::string>();
        if (s.size() >= 3) {
            const std::string digits = s.substr(0, s.size() - 2);
            const std::string suffix = s.substr(s.size() - 2);
            if (!digits.empty() &&
                digits.find_first_not_of("0123456789") == std::string::npos) {
                std::int64_t n = std::stoll(digits);
                if (suffix == "Ki") return n * 1024;
                if (suffix == "Mi") return n * 1024 * 1024;
                if (suffix == "Gi") return n * 1024 * 1024 * 1024;
            }
        }
        throw SchemaError(path, "expected bytes or a quantity with a Ki/Mi/Gi suffix");
    }
    throw SchemaError(path, "expected bytes or a quantity with a Ki/Mi/Gi suffix");
}

std::string format_cpu_quantity(std::int64_t millicpu) {
    return std::to_string(millicpu) + "m";
}

json format_memory_quantity(std::int64_t bytes) {
    constexpr std::int64_t ki = 1024;
    constexpr std::int64_t mi = ki * 1024;
    constexpr std::int64_t gi = mi * 1024;
    if (bytes >= gi && bytes % gi == 0) return std::to_string(bytes / gi) + "Gi";
    if (bytes >= mi && bytes % mi == 0) return std::to_string(bytes / mi) + "Mi";
    if (bytes >= ki && bytes % ki == 0) return std::to_string(bytes / ki) + "Ki";
    return bytes;
}

namespace {

NetworkReq parse_network_req(const json& j, const std::string& path) {
    reject_unknown(j, {"latency", "throughputGBR", "throughputMBR",
                       "packetErrorRate", "duration"},
                   path);
    NetworkReq req;
    req.latency_ms = as_number(require_field(j, "latency", path), path + "/latency");
    req.throughput_gbr_mbps =
        as_number(require_field(j, "throughputGBR", path), path + "/throughputGBR");
    req.throughput_mbr_mbps =
        as_number(require_field(j, "throughputMBR", path), path + "/throughputMBR");
    req.packet_error_rate =
        as_number(require_field(j, "packetErrorRate", path), path + "/packetErrorRate");
    if (auto it = j.find("duration"); it != j.end()) {
        const std::string dpath = path + "/duration";
        if (it->is_string()) {
            if (it->get<std::string>() != "auto")
                throw SchemaError(dpath, "expected a duration in ms or \"auto\"");
        } else if (it->is_number()) {
            req.duration_ms = it->get<double>();
        } else {
            throw SchemaError(dpath, "expected a duration in ms or \"auto\"");
        }
    }

    if (req.latency_ms <= 0)
        throw ValidationError(path + "/latency", "must be > 0");
    if (req.throughput_gbr_mbps <= 0)
        throw ValidationError(path + "/throughputGBR", "must be > 0");
    if (req.throughput_mbr_mbps < req.throughput_gbr_mbps)
        throw ValidationError(path + "/throughputMBR",
                              "must be >= throughputGBR");
    if (req.packet_error_rate < 0 || req.packet_error_rate > 1)
        throw ValidationError(path + "/packetErrorRate", "must be in [0, 1]");
    if (req.duration_ms && *req.duration_ms <= 0)
        throw ValidationError(path + "/duration", "must be > 0");
    return req;
}

ComputeReq parse_compute_req(const json& j, const std::string& path) {
    reject_unknown(j, {"minCPUCores", "maxCPUCores", "minMemory", "maxMemory", "tier"},
                   path);
    ComputeReq req;
    req.min_millicpu =
        parse_cpu_quantity(require_field(j, "minCPUCores", path), path + "/minCPUCores");
    req.max_millicpu =
        parse_cpu_quantity(require_field(j, "maxCPUCores", path), path + "/maxCPUCores");
    req.min_memory_bytes =
        parse_memory_quantity(require_field(j, "minMemory", path), path + "/minMemory");
    req.max_memory_bytes =
        parse_memory_quantity(require_field(j, "maxMemory", path), path + "/maxMemory");
    if (auto it = j.find("tier"); it != j.end()) {
        const std::string tpath = path + "/tier";
        const std::string s = as_string(*it, tpath);
        if (s != "auto") {
            auto tier = tier_from_string(s);
            if (!tier)
                throw SchemaError(tpath, "expected device, edge, cloud or auto");
            req.tier = *tier;
        }
    }

    if (req.min_millicpu < 1)
        throw ValidationError(path + "/minCPUCores", "must be at least 1 millicpu");
    if (req.max_millicpu < req.min_millicpu)
        throw ValidationError(path + "/maxCPUCores", "must be >= minCPUCores");
    if (req.min_memory_bytes < 1)
        throw ValidationError(path + "/minMemory", "must be at least 1 byte");
    if (req.max_memory_bytes < req.min_memory_bytes)
        throw ValidationError(path + "/maxMemory", "must be >= minMemory");
    return req;
}

FunctionSliceSpec parse_function_slice(const json& j, const std::string& path) {
    reject_unknown(j, {"network", "compute"}, path);
    FunctionSliceSpec slice;
    slice.network =
        parse_network_req(require_field(j, "network", path), path + "/network");
    slice.compute =
        parse_compute_req(require_field(j, "compute", path), path + "/compute");
    return slice;
}

AppLevelSpec parse_app_level(const json& j, const std::string& path) {
    reject_unknown(j, {"latency", "bandwidth", "deviceCount", "reliability"}, path);
    AppLevelSpec app;
    app.latency_ms = as_number(require_field(j, "latency", path), path + "/latency");
    app.bandwidth_mbps =
        as_number(require_field(j, "bandwidth", path), path + "/bandwidth");
    app.device_count = static_cast<int>(
        as_integer(require_field(j, "deviceCount", path), path + "/deviceCount"));
    app.reliability =
        as_number(require_field(j, "reliability", path), path + "/reliability");

    if (app.latency_ms <= 0)
        throw ValidationError(path + "/latency", "must be > 0");
    if (app.bandwidth_mbps <= 0)
        throw ValidationError(path + "/bandwidth", "must be > 0");
    if (app.device_count < 1)
        throw ValidationError(path + "/deviceCount", "must be >= 1");
    if (app.reliability < 0 || app.reliability > 1)
        throw ValidationError(path + "/reliability", "must be in [0, 1]");
    return app;
}

AppSpec parse_app(const json& j, const std::string& path) {
    reject_unknown(j, {"appName", "functions", "edges"}, path);
    AppSpec app;
    app.app_name = as_string(require_field(j, "appName", path), path + "/appName");

    const json& fns = expect_array(require_field(j, "functions", path),
                                   path + "/functions");
    std::unordered_set<std::string> names;
    std::unordered_set<std::string> instances;
    for (std::size_t i = 0; i < fns.size(); ++i) {
        const std::string fpath = path + "/functions/" + std::to_string(i);
        const json& fj = fns[i];
        reject_unknown(fj, {"name", "instances"}, fpath);
        FunctionDef fn;
        fn.name = as_string(require_field(fj, "name", fpath), fpath + "/name");
        if (!names.insert(fn.name).second)
            throw ValidationError(fpath + "/name", "duplicate function name");
        const json& insts = expect_array(require_field(fj, "instances", fpath),
                                         fpath + "/instances");
        if (insts.empty())
            throw ValidationError(fpath + "/instances",
                                  "function needs at least one instance");
        for (std::size_t k = 0; k < insts.size(); ++k) {
            const std::string ipath = fpath + "/instances/" + std::to_string(k);
            std::string inst = as_string(insts[k], ipath);
            if (!instances.insert(inst).second)
                throw ValidationError(ipath, "duplicate instance name");
            fn.instances.push_back(std::move(inst));
        }
        app.functions.push_back(std::move(fn));
    }

    const json& edges = expect_array(require_field(j, "edges", path), path + "/edges");
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const std::string epath = path + "/edges/" + std::to_string(i);
        const json& ej = edges[i];
        reject_unknown(ej, {"fromInstance", "toInstance"}, epath);
        AppEdge edge;
        edge.from_instance =
            as_string(require_field(ej, "fromInstance", epath), epath + "/fromInstance");
        edge.to_instance =
            as_string(require_field(ej, "toInstance", epath), epath + "/toInstance");
        if (!instances.count(edge.from_instance))
            throw ValidationError(epath + "/fromInstance", "unknown instance");
        if (!instances.count(edge.to_instance))
            throw ValidationError(epath + "/toInstance", "unknown instance");
        app.edges.push_back(std::move(edge));
    }

    // The instance graph must be acyclic.
    std::unordered_map<std::string, std::vector<std::string>> out;
    std::unordered_map<std::string, int> indeg;
    for (const auto& f : app.functions)
        for (const auto& inst : f.instances) indeg[inst] = 0;
    for (const auto& e : app.edges) {
        out[e.from_instance].push_back(e.to_instance);
        ++indeg[e.to_instance];
    }
    std::deque<std::string> ready;
    for (const auto& f : app.functions)
        for (const auto& inst : f.instances)
            if (indeg[inst] == 0) ready.push_back(inst);
    std::size_t visited = 0;
    while (!ready.empty()) {
        std::string inst = std::move(ready.front());
        ready.pop_front();
        ++visited;
        for (const auto& next : out[inst])
            if (--indeg[next] == 0) ready.push_back(next);
    }
    if (visited != instances.size())
        throw ValidationError(path + "/edges", "instance graph has a cycle");

    return app;
}

}  // namespace

ParsedSpec parse_spec(const json& document) {
    const std::string root;
    expect_object(document, "/");
    ParsedSpec spec;
    spec.app = parse_app(require_field(document, "app", root), "/app");

    const json& slice_j = require_field(document, "appSlice", root);
    const std::string spath = "/appSlice";
    reject_unknown(slice_j, {"application", "perFunction"}, spath);
    spec.app_slice.application = parse_app_level(
        require_field(slice_j, "application", spath), spath + "/application");
    const json& per_fn = expect_object(require_field(slice_j, "perFunction", spath),
                                       spath + "/perFunction");
    for (auto it = per_fn.begin(); it != per_fn.end(); ++it) {
        const std::string fpath = spath + "/perFunction/" + it.key();
        spec.app_slice.per_function[it.key()] = parse_function_slice(*it, fpath);
    }

    // Resolve slices onto the functions they describe.
    for (auto& fn : spec.app.functions) {
        auto it = spec.app_slice.per_function.find(fn.name);
        if (it != spec.app_slice.per_function.end()) fn.slice = it->second;
    }
    return spec;
}

ParsedSpec parse_spec_text(const std::string& text) {
    json document;
    try {
        document = json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SyntaxError(e.what());
    }
    return parse_spec(document);
}

json serialize_spec(const ParsedSpec& spec) {
    json app;
    app["appName"] = spec.app.app_name;
    app["functions"] = json::array();
    for (const auto& fn : spec.app.functions) {
        json fj;
        fj["name"] = fn.name;
        fj["instances"] = fn.instances;
        app["functions"].push_back(std::move(fj));
    }
    app["edges"] = json::array();
    for (const auto& e : spec.app.edges) {
        json ej;
        ej["fromInstance"] = e.from_instance;
        ej["toInstance"] = e.to_instance;
        app["edges"].push_back(std::move(ej));
    }

    json slice;
    {
        const AppLevelSpec& a = spec.app_slice.application;
        json aj;
        aj["latency"] = a.latency_ms;
        aj["bandwidth"] = a.bandwidth_mbps;
        aj["deviceCount"] = a.device_count;
        aj["reliability"] = a.reliability;
        slice["application"] = std::move(aj);
    }
    json per_fn = json::object();
    for (const auto& [name, fs] : spec.app_slice.per_function) {
        json nj;
        nj["latency"] = fs.network.latency_ms;
        nj["throughputGBR"] = fs.network.throughput_gbr_mbps;
        nj["throughputMBR"] = fs.network.throughput_mbr_mbps;
        nj["packetErrorRate"] = fs.network.packet_error_rate;
        nj["duration"] = fs.network.duration_ms
                             ? json(*fs.network.duration_ms)
                             : json("auto");
        json cj;
        cj["minCPUCores"] = format_cpu_quantity(fs.compute.min_millicpu);
        cj["maxCPUCores"] = format_cpu_quantity(fs.compute.max_millicpu);
        cj["minMemory"] = format_memory_quantity(fs.compute.min_memory_bytes);
        cj["maxMemory"] = format_memory_quantity(fs.compute.max_memory_bytes);
        cj["tier"] = fs.compute.tier ? json(to_string(*fs.compute.tier)) : json("auto");
        json fj;
        fj["network"] = std::move(nj);
        fj["compute"] = std::move(cj);
        per_fn[name] = std::move(fj);
    }
    slice["perFunction"] = std::move(per_fn);

    json doc;
    doc["app"] = std::move(app);
    doc["appSlice"] = std::move(slice);
    return doc;
}

std::vector<Diagnostic> validate_against_app(const AppSliceSpec& slice,
                                             const AppSpec& app) {
    std::vector<Diagnostic> diags;
    for (const auto& [name, fs] : slice.per_function) {
        (void)fs;
        if (!app.find_function(name))
            diags.push_back({Severity::Error, "/appSlice/perFunction/" + name,
                             "no such function in the app"});
    }
    for (const auto& fn : app.functions) {
        if (!slice.per_function.count(fn.name))
            diags.push_back({Severity::Error, "/appSlice/perFunction/" + fn.name,
                             "function has no slice entry"});
    }
    double gbr_sum = 0;
    for (const auto& [name, fs] : slice.per_function) {
        (void)name;
        gbr_sum += fs.network.throughput_gbr_mbps;
    }
    if (gbr_sum > slice.application.bandwidth_mbps) {
        diags.push_back({Severity::Warning, "/appSlice/application/bandwidth",
                         "per-function guaranteed rates sum to " +
                             std::to_string(gbr_sum) +
                             " Mbps, above the application bandwidth"});
    }
    return diags;
}

std::vector<std::string> upstream_functions(const AppSpec& app,
                                            const std::string& function) {
    std::vector<std::string> ups;
    const FunctionDef* fn = app.find_function(function);
    if (!fn) return ups;
    std::set<std::string> seen;
    for (const auto& e : app.edges) {
        const FunctionDef* to = app.function_of_instance(e.to_instance);
        if (!to || to->name != function) continue;
        const FunctionDef* from = app.function_of_instance(e.from_instance);
        if (!from || from->name == function) continue;
        if (seen.insert(from->name).second) ups.push_back(from->name);
    }
    // Declaration order, not edge order.
    std::sort(ups.begin(), ups.end(), [&](const auto& a, const auto& b) {
        auto index = [&](const std::string& n) {
            for (std::size_t i = 0; i < app.functions.size(); ++i)
                if (app.functions[i].name == n) return i;
            return app.functions.size();
        };
        return index(a) < index(b);
    });
    return ups;
}

std::vector<std::string> topological_function_order(const AppSpec& app) {
    std::unordered_map<std::string, std::set<std::string>> preds;
    for (const auto& fn : app.functions) preds[fn.name] = {};
    for (const auto& e : app.edges) {
        const FunctionDef* from = app.function_of_instance(e.from_instance);
        const FunctionDef* to = app.function_of_instance(e.to_instance);
        if (from && to && from->name != to->name)
            preds[to->name].insert(from->name);
    }
    std::vector<std::string> order;
    std::set<std::string> placed;
    while (order.size() < app.functions.size()) {
        bool progressed = false;
        for (const auto& fn : app.functions) {
            if (placed.count(fn.name)) continue;
            bool ready = std::all_of(
                preds[fn.name].begin(), preds[fn.name].end(),
                [&](const std::string& p) { return placed.count(p) > 0; });
            if (ready) {
                order.push_back(fn.name);
                placed.insert(fn.name);
                progressed = true;
            }
        }
        if (!progressed)
            throw ValidationError("/app/edges",
                                  "function graph has a cycle");
    }
    return order;
}

namespace {

FunctionSliceSpec make_slice(double latency_ms, double gbr, double mbr, double per,
                             std::int64_t min_mcpu, std::int64_t max_mcpu,
                             std::int64_t min_mem, std::int64_t max_mem,
                             std::optional<Tier> tier) {
    FunctionSliceSpec s;
    s.network.latency_ms = latency_ms;
    s.network.throughput_gbr_mbps = gbr;
    s.network.throughput_mbr_mbps = mbr;
    s.network.packet_error_rate = per;
    s.compute.min_millicpu = min_mcpu;
    s.compute.max_millicpu = max_mcpu;
    s.compute.min_memory_bytes = min_mem;
    s.compute.max_memory_bytes = max_mem;
    s.compute.tier = tier;
    return s;
}

}  // namespace

ParsedSpec canonical_rtm_spec() {
    constexpr std::int64_t mi = std::int64_t(1024) * 1024;
    constexpr std::int64_t gi = mi * 1024;

    ParsedSpec spec;
    spec.app.app_name = "realtime-monitoring";
    auto add_fn = [&](const std::string& name) {
        FunctionDef fn;
        fn.name = name;
        fn.instances = {name + "-0"};
        spec.app.functions.push_back(std::move(fn));
    };
    add_fn("videoSensor");
    add_fn("faceDetection");
    add_fn("featureExtraction");
    add_fn("biometricsManager");
    add_fn("faceMatching");
    add_fn("alertsManager");

    auto add_edge = [&](const char* from, const char* to) {
        spec.app.edges.push_back({std::string(from) + "-0", std::string(to) + "-0"});
    };
    add_edge("videoSensor", "faceDetection");
    add_edge("faceDetection", "featureExtraction");
    add_edge("featureExtraction", "faceMatching");
    add_edge("biometricsManager", "faceMatching");
    add_edge("faceMatching", "alertsManager");

    spec.app_slice.application = {150.0, 10.0, 1, 0.99};

    auto& pf = spec.app_slice.per_function;
    // The sensor is pinned to the device next to the camera; everything else
    // is placed by cost. Face detection carries the whole video stream and
    // the heavy model, the biometrics manager keeps the gallery in memory.
    pf["videoSensor"] =
        make_slice(100, 0.1, 1.0, 0.01, 1000, 1000, 256 * mi, 512 * mi, Tier::Device);
    pf["faceDetection"] =
        make_slice(50, 5.0, 5.0, 0.01, 2000, 2000, 8 * gi, 8 * gi, std::nullopt);
    pf["featureExtraction"] =
        make_slice(50, 0.5, 1.0, 0.01, 500, 500, 1 * gi, 2 * gi, std::nullopt);
    pf["biometricsManager"] =
        make_slice(200, 0.1, 0.5, 0.01, 250, 250, 8 * gi, 8 * gi, std::nullopt);
    pf["faceMatching"] =
        make_slice(50, 0.5, 1.0, 0.01, 500, 500, 1 * gi, 2 * gi, std::nullopt);
    pf["alertsManager"] =
        make_slice(200, 0.1, 0.5, 0.01, 250, 250, 512 * mi, 1 * gi, std::nullopt);

    for (auto& fn : spec.app.functions) fn.slice = pf.at(fn.name);
    return spec;
}

}  // namespace appslice
