#include "appslice/scenario.hpp"

namespace appslice {

namespace {

Scenario base_scenario(std::string name) {
    Scenario sc;
    sc.name = std::move(name);
    sc.seed = 0;
    sc.duration_s = 20;
    sc.best_effort = false;
    sc.dynamic_adjustment = false;
    sc.runtime = RuntimeConfig{};
    sc.fabric = default_fabric_config();
    sc.spec = canonical_rtm_spec();
    sc.pipeline = canonical_pipeline();
    sc.trace = canonical_frame_trace();
    sc.profile = canonical_profile();
    return sc;
}

// Contended fabric: the stream link keeps only 0.25 Mbps of best-effort
// headroom and the edge pool only 100 millicpu.
void add_contention(Scenario& sc) {
    LoadEvent traffic;
    traffic.time_s = 0;
    traffic.target = LinkId{Tier::Device, Tier::Edge};
    traffic.kind = LoadKind::TrafficMbps;
    traffic.value = 4.75;
    LoadEvent burn;
    burn.time_s = 0;
    burn.target = Tier::Edge;
    burn.kind = LoadKind::CpuBurnMillicpu;
    burn.value = 71900;
    sc.fabric.load_schedule.push_back(traffic);
    sc.fabric.load_schedule.push_back(burn);
}

void relax_detection_gbr(Scenario& sc) {
    auto relax = [](NetworkReq& net) {
        net.throughput_gbr_mbps = 0.5;
        net.throughput_mbr_mbps = 5.0;
    };
    relax(sc.spec.app_slice.per_function.at("faceDetection").network);
    for (FunctionDef& fn : sc.spec.app.functions)
        if (fn.name == "faceDetection" && fn.slice) relax(fn.slice->network);
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"fig5_net",        "fig5_cpu",    "fig7a_appslice",
            "fig7a_besteffort", "fig7b_static", "fig7b_dynamic"};
}

Scenario make_preset(const std::string& name) {
    Scenario sc = base_scenario(name);
    if (name == "fig5_net" || name == "fig5_cpu") {
        // Uncontended best-effort baselines; sweeps add the load point by point.
        sc.best_effort = true;
        return sc;
    }
    if (name == "fig7a_appslice") {
        sc.dynamic_adjustment = true;
        add_contention(sc);
        return sc;
    }
    if (name == "fig7a_besteffort") {
        sc.best_effort = true;
        add_contention(sc);
        return sc;
    }
    if (name == "fig7b_static") {
        relax_detection_gbr(sc);
        add_contention(sc);
        return sc;
    }
    if (name == "fig7b_dynamic") {
        sc.dynamic_adjustment = true;
        relax_detection_gbr(sc);
        add_contention(sc);
        return sc;
    }
    throw Error("unknown preset: " + name);
}

}  // namespace appslice
