#include <sstream>

#include "appslice/scenario.hpp"

namespace appslice {

namespace {

std::string fmt(double v) { return json(v).dump(); }

json allocation_json(const Allocation& alloc) {
    json a;
    a["bestEffort"] = alloc.best_effort;
    a["costRatePerSecond"] = alloc.total_cost_rate;
    json fns;
    for (const auto& [name, fn] : alloc.functions) {
        json f;
        f["tier"] = to_string(fn.tier);
        if (fn.compute) {
            json c;
            c["grantedMillicpu"] = fn.compute->granted_millicpu;
            c["grantedMemory"] = format_memory_quantity(fn.compute->granted_memory_bytes);
            f["compute"] = std::move(c);
        } else {
            f["compute"] = nullptr;
        }
        json links = json::array();
        for (const NetworkSlice& ns : fn.network) {
            json l;
            l["link"] = to_string(ns.link);
            l["gbrMbps"] = ns.gbr_mbps;
            l["mbrMbps"] = ns.mbr_mbps;
            links.push_back(std::move(l));
        }
        f["network"] = std::move(links);
        fns[name] = std::move(f);
    }
    a["functions"] = std::move(fns);
    return a;
}

}  // namespace

json RunReport::to_json() const {
    json doc;
    doc["scenario"] = scenario_name;
    doc["alerts"] = alerts;
    doc["alertFloorClamped"] = alert_floor_clamped;
    doc["totalCost"] = total_cost;
    doc["simulatedS"] = simulated_s;
    doc["admissionNotes"] = admission_notes;
    if (allocation) doc["allocation"] = allocation_json(*allocation);
    if (failure) doc["failure"] = failure->to_json();
    json adj = json::array();
    for (const Adjustment& a : adjustments) adj.push_back(a.to_json());
    doc["adjustments"] = std::move(adj);
    return doc;
}

std::string RunReport::metrics_csv() const {
    std::ostringstream out;
    out << "time_s,function,delivered_mbps,demand_mbps,granted_millicpu,"
           "used_millicpu,latency_ms,per,alerts_cum\n";
    for (const MetricsSample& sample : metrics) {
        for (const auto& [name, m] : sample.per_function) {
            out << fmt(sample.time_s) << ',' << name << ',' << fmt(m.delivered_mbps)
                << ',' << fmt(m.demand_mbps) << ',' << fmt(m.granted_millicpu) << ','
                << fmt(m.used_millicpu) << ',' << fmt(m.latency_ms) << ','
                << fmt(m.per) << ',' << sample.app_alerts_so_far << '\n';
        }
    }
    return out.str();
}

std::string RunReport::adjustments_jsonl() const {
    std::ostringstream out;
    for (const Adjustment& a : adjustments) out << a.to_json().dump() << '\n';
    return out.str();
}

}  // namespace appslice
