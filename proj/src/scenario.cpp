#include "appslice/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

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

namespace {

RuntimeConfig parse_runtime(const json& j, const std::string& path) {
    reject_unknown(j, {"intervalS", "saturationThreshold", "underuseThreshold",
                       "underuseTicks", "growthPolicy"},
                   path);
    RuntimeConfig cfg;
    if (auto it = j.find("intervalS"); it != j.end())
        cfg.interval_s = as_number(*it, path + "/intervalS");
    if (auto it = j.find("saturationThreshold"); it != j.end())
        cfg.saturation_threshold = as_number(*it, path + "/saturationThreshold");
    if (auto it = j.find("underuseThreshold"); it != j.end())
        cfg.underuse_threshold = as_number(*it, path + "/underuseThreshold");
    if (auto it = j.find("underuseTicks"); it != j.end())
        cfg.underuse_ticks = static_cast<int>(as_integer(*it, path + "/underuseTicks"));
    if (auto it = j.find("growthPolicy"); it != j.end()) {
        const std::string gpath = path + "/growthPolicy";
        auto policy = growth_policy_from_string(as_string(*it, gpath));
        if (!policy)
            throw SchemaError(gpath, "expected toMBRCap or doubling");
        cfg.growth_policy = *policy;
    }
    if (cfg.interval_s <= 0)
        throw ValidationError(path + "/intervalS", "must be > 0");
    if (cfg.saturation_threshold <= 0 || cfg.saturation_threshold >= 1)
        throw ValidationError(path + "/saturationThreshold", "must be in (0, 1)");
    if (cfg.underuse_threshold <= 0 || cfg.underuse_threshold >= 1)
        throw ValidationError(path + "/underuseThreshold", "must be in (0, 1)");
    if (cfg.underuse_ticks < 1)
        throw ValidationError(path + "/underuseTicks", "must be >= 1");
    return cfg;
}

Tier parse_tier_name(const json& j, const std::string& path) {
    auto tier = tier_from_string(as_string(j, path));
    if (!tier) throw SchemaError(path, "expected device, edge or cloud");
    return *tier;
}

FabricConfig parse_fabric(const json& j, const std::string& path) {
    reject_unknown(j, {"tiers", "links", "loadSchedule"}, path);
    FabricConfig cfg;

    const json& tiers = expect_array(require_field(j, "tiers", path), path + "/tiers");
    for (std::size_t i = 0; i < tiers.size(); ++i) {
        const std::string tpath = path + "/tiers/" + std::to_string(i);
        const json& tj = tiers[i];
        reject_unknown(tj, {"tier", "totalMillicpu", "totalMemory",
                            "costPerMillicpuSecond"},
                       tpath);
        TierCapacity cap;
        cap.id = parse_tier_name(require_field(tj, "tier", tpath), tpath + "/tier");
        cap.total_millicpu =
            as_integer(require_field(tj, "totalMillicpu", tpath), tpath + "/totalMillicpu");
        cap.total_memory_bytes = parse_memory_quantity(
            require_field(tj, "totalMemory", tpath), tpath + "/totalMemory");
        cap.cost_per_millicpu_s =
            as_number(require_field(tj, "costPerMillicpuSecond", tpath),
                      tpath + "/costPerMillicpuSecond");
        if (cap.total_millicpu <= 0)
            throw ValidationError(tpath + "/totalMillicpu", "must be > 0");
        if (cap.total_memory_bytes <= 0)
            throw ValidationError(tpath + "/totalMemory", "must be > 0");
        if (cap.cost_per_millicpu_s < 0)
            throw ValidationError(tpath + "/costPerMillicpuSecond", "must be >= 0");
        cfg.tiers.push_back(cap);
    }

    const json& links = expect_array(require_field(j, "links", path), path + "/links");
    for (std::size_t i = 0; i < links.size(); ++i) {
        const std::string lpath = path + "/links/" + std::to_string(i);
        const json& lj = links[i];
        reject_unknown(lj, {"from", "to", "capacityMbps", "baseLatencyMs", "basePER"},
                       lpath);
        LinkConfig link;
        link.id.from = parse_tier_name(require_field(lj, "from", lpath), lpath + "/from");
        link.id.to = parse_tier_name(require_field(lj, "to", lpath), lpath + "/to");
        link.capacity_mbps =
            as_number(require_field(lj, "capacityMbps", lpath), lpath + "/capacityMbps");
        link.base_latency_ms = as_number(require_field(lj, "baseLatencyMs", lpath),
                                         lpath + "/baseLatencyMs");
        link.base_per =
            as_number(require_field(lj, "basePER", lpath), lpath + "/basePER");
        if (link.capacity_mbps <= 0)
            throw ValidationError(lpath + "/capacityMbps", "must be > 0");
        if (link.base_latency_ms < 0)
            throw ValidationError(lpath + "/baseLatencyMs", "must be >= 0");
        if (link.base_per < 0 || link.base_per > 1)
            throw ValidationError(lpath + "/basePER", "must be in [0, 1]");
        cfg.links.push_back(link);
    }

    if (auto it = j.find("loadSchedule"); it != j.end()) {
        const json& schedule = expect_array(*it, path + "/loadSchedule");
        for (std::size_t i = 0; i < schedule.size(); ++i) {
            const std::string epath = path + "/loadSchedule/" + std::to_string(i);
            const json& ej = schedule[i];
            reject_unknown(ej, {"timeS", "target", "kind", "value"}, epath);
            LoadEvent event;
            event.time_s = as_number(require_field(ej, "timeS", epath), epath + "/timeS");
            const std::string kind =
                as_string(require_field(ej, "kind", epath), epath + "/kind");
            const std::string target =
                as_string(require_field(ej, "target", epath), epath + "/target");
            event.value = as_number(require_field(ej, "value", epath), epath + "/value");
            if (kind == "trafficMbps") {
                event.kind = LoadKind::TrafficMbps;
                auto link = link_id_from_string(target);
                if (!link)
                    throw SchemaError(epath + "/target",
                                      "traffic targets a link like \"device->edge\"");
                event.target = *link;
            } else if (kind == "cpuBurnMillicpu") {
                event.kind = LoadKind::CpuBurnMillicpu;
                auto tier = tier_from_string(target);
                if (!tier)
                    throw SchemaError(epath + "/target", "cpu burn targets a tier");
                event.target = *tier;
            } else {
                throw SchemaError(epath + "/kind",
                                  "expected trafficMbps or cpuBurnMillicpu");
            }
            if (event.time_s < 0)
                throw ValidationError(epath + "/timeS", "must be >= 0");
            if (event.value < 0)
                throw ValidationError(epath + "/value", "must be >= 0");
            cfg.load_schedule.push_back(event);
        }
    }
    return cfg;
}

PipelineModel parse_pipeline(const json& j, const std::string& path) {
    reject_unknown(j, {"targetFunction", "bytesPerFrame", "millicpuPerFps"}, path);
    PipelineModel p;
    p.target_function = as_string(require_field(j, "targetFunction", path),
                                  path + "/targetFunction");
    p.bytes_per_frame = as_number(require_field(j, "bytesPerFrame", path),
                                  path + "/bytesPerFrame");
    p.millicpu_per_fps = as_number(require_field(j, "millicpuPerFps", path),
                                   path + "/millicpuPerFps");
    if (p.bytes_per_frame <= 0)
        throw ValidationError(path + "/bytesPerFrame", "must be > 0");
    if (p.millicpu_per_fps <= 0)
        throw ValidationError(path + "/millicpuPerFps", "must be > 0");
    return p;
}

FrameTrace parse_trace(const json& j, const std::string& path) {
    reject_unknown(j, {"fps", "durationS", "registered", "appearances"}, path);
    FrameTrace trace;
    trace.fps = as_number(require_field(j, "fps", path), path + "/fps");
    trace.duration_s = as_number(require_field(j, "durationS", path), path + "/durationS");
    const json& reg = expect_array(require_field(j, "registered", path),
                                   path + "/registered");
    for (std::size_t i = 0; i < reg.size(); ++i)
        trace.registered.push_back(
            as_string(reg[i], path + "/registered/" + std::to_string(i)));
    const json& apps = expect_array(require_field(j, "appearances", path),
                                    path + "/appearances");
    for (std::size_t i = 0; i < apps.size(); ++i) {
        const std::string apath = path + "/appearances/" + std::to_string(i);
        const json& aj = apps[i];
        reject_unknown(aj, {"personId", "firstFrame", "lastFrame"}, apath);
        Appearance a;
        a.person_id =
            as_string(require_field(aj, "personId", apath), apath + "/personId");
        a.first_frame =
            as_integer(require_field(aj, "firstFrame", apath), apath + "/firstFrame");
        a.last_frame =
            as_integer(require_field(aj, "lastFrame", apath), apath + "/lastFrame");
        trace.appearances.push_back(std::move(a));
    }
    if (trace.fps <= 0) throw ValidationError(path + "/fps", "must be > 0");
    if (trace.duration_s <= 0)
        throw ValidationError(path + "/durationS", "must be > 0");
    return trace;
}

std::vector<std::pair<double, int>> parse_anchors(const json& j,
                                                  const std::string& path) {
    expect_array(j, path);
    std::vector<std::pair<double, int>> anchors;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string apath = path + "/" + std::to_string(i);
        const json& pair = j[i];
        if (!pair.is_array() || pair.size() != 2)
            throw SchemaError(apath, "expected [serviceLevel, alerts]");
        anchors.emplace_back(as_number(pair[0], apath + "/0"),
                             static_cast<int>(as_integer(pair[1], apath + "/1")));
    }
    return anchors;
}

CalibrationProfile parse_profile(const json& j, const std::string& path) {
    reject_unknown(j, {"netAnchorsMbps", "cpuAnchorsCores", "clampFloor"}, path);
    CalibrationProfile profile;
    profile.net_anchors_mbps = parse_anchors(
        require_field(j, "netAnchorsMbps", path), path + "/netAnchorsMbps");
    profile.cpu_anchors_cores = parse_anchors(
        require_field(j, "cpuAnchorsCores", path), path + "/cpuAnchorsCores");
    if (auto it = j.find("clampFloor"); it != j.end())
        profile.clamp_floor = as_boolean(*it, path + "/clampFloor");
    return profile;
}

}  // namespace

Scenario parse_scenario(const json& document) {
    expect_object(document, "/");
    reject_unknown(document,
                   {"name", "seed", "durationS", "bestEffort", "dynamicAdjustment",
                    "runtime", "fabric", "app", "appSlice", "workload"},
                   "");
    Scenario sc;
    sc.name = as_string(require_field(document, "name", ""), "/name");
    if (auto it = document.find("seed"); it != document.end())
        sc.seed = static_cast<std::uint64_t>(as_integer(*it, "/seed"));
    sc.duration_s = as_number(require_field(document, "durationS", ""), "/durationS");
    if (sc.duration_s <= 0) throw ValidationError("/durationS", "must be > 0");
    if (auto it = document.find("bestEffort"); it != document.end())
        sc.best_effort = as_boolean(*it, "/bestEffort");
    if (auto it = document.find("dynamicAdjustment"); it != document.end())
        sc.dynamic_adjustment = as_boolean(*it, "/dynamicAdjustment");
    if (auto it = document.find("runtime"); it != document.end())
        sc.runtime = parse_runtime(*it, "/runtime");
    sc.fabric = parse_fabric(require_field(document, "fabric", ""), "/fabric");
    sc.spec = parse_spec(document);

    const json& workload = require_field(document, "workload", "");
    const std::string wpath = "/workload";
    reject_unknown(workload, {"pipeline", "trace", "profile"}, wpath);
    sc.pipeline = parse_pipeline(require_field(workload, "pipeline", wpath),
                                 wpath + "/pipeline");
    sc.trace = parse_trace(require_field(workload, "trace", wpath), wpath + "/trace");
    sc.profile = parse_profile(require_field(workload, "profile", wpath),
                               wpath + "/profile");
    return sc;
}

Scenario load_scenario(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in)
        throw SyntaxError("cannot open scenario file: " + file.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    json document;
    try {
        document = json::parse(buffer.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw SyntaxError(file.string() + ": " + e.what());
    }
    return parse_scenario(document);
}

json serialize_scenario(const Scenario& sc) {
    json doc;
    doc["name"] = sc.name;
    doc["seed"] = sc.seed;
    doc["durationS"] = sc.duration_s;
    doc["bestEffort"] = sc.best_effort;
    doc["dynamicAdjustment"] = sc.dynamic_adjustment;

    json rt;
    rt["intervalS"] = sc.runtime.interval_s;
    rt["saturationThreshold"] = sc.runtime.saturation_threshold;
    rt["underuseThreshold"] = sc.runtime.underuse_threshold;
    rt["underuseTicks"] = sc.runtime.underuse_ticks;
    rt["growthPolicy"] = to_string(sc.runtime.growth_policy);
    doc["runtime"] = std::move(rt);

    json fabric;
    fabric["tiers"] = json::array();
    for (const auto& t : sc.fabric.tiers) {
        json tj;
        tj["tier"] = to_string(t.id);
        tj["totalMillicpu"] = t.total_millicpu;
        tj["totalMemory"] = format_memory_quantity(t.total_memory_bytes);
        tj["costPerMillicpuSecond"] = t.cost_per_millicpu_s;
        fabric["tiers"].push_back(std::move(tj));
    }
    fabric["links"] = json::array();
    for (const auto& l : sc.fabric.links) {
        json lj;
        lj["from"] = to_string(l.id.from);
        lj["to"] = to_string(l.id.to);
        lj["capacityMbps"] = l.capacity_mbps;
        lj["baseLatencyMs"] = l.base_latency_ms;
        lj["basePER"] = l.base_per;
        fabric["links"].push_back(std::move(lj));
    }
    fabric["loadSchedule"] = json::array();
    for (const auto& e : sc.fabric.load_schedule) {
        json ej;
        ej["timeS"] = e.time_s;
        ej["target"] = std::holds_alternative<Tier>(e.target)
                           ? std::string(to_string(std::get<Tier>(e.target)))
                           : to_string(std::get<LinkId>(e.target));
        ej["kind"] = e.kind == LoadKind::TrafficMbps ? "trafficMbps" : "cpuBurnMillicpu";
        ej["value"] = e.value;
        fabric["loadSchedule"].push_back(std::move(ej));
    }
    doc["fabric"] = std::move(fabric);

    json spec = serialize_spec(sc.spec);
    doc["app"] = std::move(spec["app"]);
    doc["appSlice"] = std::move(spec["appSlice"]);

    json workload;
    json pj;
    pj["targetFunction"] = sc.pipeline.target_function;
    pj["bytesPerFrame"] = sc.pipeline.bytes_per_frame;
    pj["millicpuPerFps"] = sc.pipeline.millicpu_per_fps;
    workload["pipeline"] = std::move(pj);
    json tj;
    tj["fps"] = sc.trace.fps;
    tj["durationS"] = sc.trace.duration_s;
    tj["registered"] = sc.trace.registered;
    tj["appearances"] = json::array();
    for (const auto& a : sc.trace.appearances) {
        json aj;
        aj["personId"] = a.person_id;
        aj["firstFrame"] = a.first_frame;
        aj["lastFrame"] = a.last_frame;
        tj["appearances"].push_back(std::move(aj));
    }
    workload["trace"] = std::move(tj);
    json prof;
    prof["netAnchorsMbps"] = json::array();
    for (const auto& [k, v] : sc.profile.net_anchors_mbps)
        prof["netAnchorsMbps"].push_back(json::array({k, v}));
    prof["cpuAnchorsCores"] = json::array();
    for (const auto& [k, v] : sc.profile.cpu_anchors_cores)
        prof["cpuAnchorsCores"].push_back(json::array({k, v}));
    prof["clampFloor"] = sc.profile.clamp_floor;
    workload["profile"] = std::move(prof);
    doc["workload"] = std::move(workload);
    return doc;
}

std::vector<Diagnostic> validate_scenario(const Scenario& sc) {
    std::vector<Diagnostic> diags;

    auto slice_diags = validate_against_app(sc.spec.app_slice, sc.spec.app);
    diags.insert(diags.end(), slice_diags.begin(), slice_diags.end());

    // Fabric shape.
    std::set<Tier> tier_set;
    for (std::size_t i = 0; i < sc.fabric.tiers.size(); ++i) {
        if (!tier_set.insert(sc.fabric.tiers[i].id).second)
            diags.push_back({Severity::Error,
                             "/fabric/tiers/" + std::to_string(i), "duplicate tier"});
    }
    if (tier_set.empty())
        diags.push_back({Severity::Error, "/fabric/tiers", "needs at least one tier"});
    std::set<LinkId> link_set;
    for (std::size_t i = 0; i < sc.fabric.links.size(); ++i) {
        const LinkConfig& l = sc.fabric.links[i];
        const std::string lpath = "/fabric/links/" + std::to_string(i);
        if (!tier_set.count(l.id.from) || !tier_set.count(l.id.to))
            diags.push_back({Severity::Error, lpath, "link references a missing tier"});
        if (!link_set.insert(l.id).second)
            diags.push_back({Severity::Error, lpath, "duplicate link"});
    }
    double prev_time = 0;
    for (std::size_t i = 0; i < sc.fabric.load_schedule.size(); ++i) {
        const LoadEvent& e = sc.fabric.load_schedule[i];
        const std::string epath = "/fabric/loadSchedule/" + std::to_string(i);
        if (e.time_s < prev_time)
            diags.push_back({Severity::Error, epath + "/timeS",
                             "times must be non-decreasing"});
        prev_time = std::max(prev_time, e.time_s);
        if (std::holds_alternative<Tier>(e.target)) {
            if (!tier_set.count(std::get<Tier>(e.target)))
                diags.push_back({Severity::Error, epath + "/target", "unknown tier"});
        } else if (!link_set.count(std::get<LinkId>(e.target))) {
            diags.push_back({Severity::Error, epath + "/target", "unknown link"});
        }
    }

    // Pinned tiers must exist in this fabric.
    for (const auto& [name, fs] : sc.spec.app_slice.per_function) {
        if (fs.compute.tier && !tier_set.count(*fs.compute.tier))
            diags.push_back({Severity::Error,
                             "/appSlice/perFunction/" + name + "/compute/tier",
                             "tier not present in the fabric"});
    }

    // Workload wiring.
    const FunctionDef* target = sc.spec.app.find_function(sc.pipeline.target_function);
    if (!target) {
        diags.push_back({Severity::Error, "/workload/pipeline/targetFunction",
                         "no such function in the app"});
    } else {
        auto ups = upstream_functions(sc.spec.app, sc.pipeline.target_function);
        if (ups.size() != 1)
            diags.push_back({Severity::Error, "/workload/pipeline/targetFunction",
                             "target function needs exactly one upstream feed, has " +
                                 std::to_string(ups.size())});
    }

    auto trace_diags = validate_trace(sc.trace, "/workload/trace");
    diags.insert(diags.end(), trace_diags.begin(), trace_diags.end());
    auto profile_diags =
        validate_profile(sc.profile, sc.pipeline.full_mbps(sc.trace),
                         sc.pipeline.full_millicpu(sc.trace), "/workload/profile");
    diags.insert(diags.end(), profile_diags.begin(), profile_diags.end());
    return diags;
}

}  // namespace appslice
