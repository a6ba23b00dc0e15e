#include <algorithm>
#include <cmath>
#include <sstream>

#include "appslice/scenario.hpp"

namespace appslice {

namespace {

std::string fmt(double v) { return json(v).dump(); }

std::vector<LinkId> stream_path(const Fabric& fabric, Tier from, Tier to) {
    if (from == to) return {};
    auto path = fabric.find_path(from, to);
    if (!path) throw FabricError("no path between placed tiers");
    return *path;
}

double path_latency(const Fabric& fabric, const std::vector<LinkId>& path) {
    double total = 0;
    for (const LinkId& id : path) total += fabric.link(id).base_latency_ms;
    return total;
}

double path_per(const Fabric& fabric, const std::vector<LinkId>& path) {
    double success = 1;
    for (const LinkId& id : path) success *= 1 - fabric.link(id).base_per;
    return 1 - success;
}

/// App-level budget checks over the chosen placement. Violations become
/// human-readable notes, not failures: the per-function slices were already
/// admitted, these describe the composed pipeline.
std::vector<std::string> admission_notes(const Fabric& fabric,
                                         const std::vector<ResourceRequest>& requests,
                                         const Allocation& allocation,
                                         const AppLevelSpec& app_level) {
    std::map<std::string, double> latency;
    std::map<std::string, double> success;
    double worst_latency = 0;
    double worst_success = 1;
    for (const ResourceRequest& req : requests) {  // topological order
        Tier here = allocation.functions.at(req.function).tier;
        double lat = 0;
        double suc = 1;
        for (const std::string& up : req.upstreams) {
            Tier up_tier = allocation.functions.at(up).tier;
            auto path = stream_path(fabric, up_tier, here);
            lat = std::max(lat, latency.at(up) + path_latency(fabric, path));
            suc = std::min(suc, success.at(up) * (1 - path_per(fabric, path)));
        }
        latency[req.function] = lat;
        success[req.function] = suc;
        worst_latency = std::max(worst_latency, lat);
        worst_success = std::min(worst_success, suc);
    }
    std::vector<std::string> notes;
    if (worst_latency > app_level.latency_ms)
        notes.push_back("end-to-end path latency " + fmt(worst_latency) +
                        " ms exceeds the application budget " +
                        fmt(app_level.latency_ms) + " ms");
    if (worst_success < app_level.reliability)
        notes.push_back("end-to-end delivery probability " + fmt(worst_success) +
                        " is below the application target " +
                        fmt(app_level.reliability));
    return notes;
}

}  // namespace

RunReport run_scenario(const Scenario& sc) {
    auto diags = validate_scenario(sc);
    for (const Diagnostic& d : diags)
        if (d.severity == Severity::Error) throw ValidationError(d.path, d.message);

    RunReport report;
    report.scenario_name = sc.name;

    Fabric fabric(sc.fabric);
    auto requests = build_requests(sc.spec.app, sc.spec.app_slice);
    AllocationResult placed = sc.best_effort ? place_best_effort(requests, fabric)
                                             : allocate(requests, fabric);
    if (std::holds_alternative<FailureReport>(placed)) {
        report.failure = std::get<FailureReport>(placed);
        return report;
    }
    Allocation allocation = std::get<Allocation>(placed);
    report.allocation = allocation;  // initial grants; resizes land in the log
    report.admission_notes =
        admission_notes(fabric, requests, allocation, sc.spec.app_slice.application);

    const ResourceRequest* target = nullptr;
    for (const ResourceRequest& req : requests)
        if (req.function == sc.pipeline.target_function) target = &req;
    if (!target || target->upstreams.size() != 1)
        throw ValidationError("/workload/pipeline/targetFunction",
                              "target function needs exactly one upstream feed");
    const std::string& upstream = target->upstreams.front();
    const Tier target_tier = allocation.functions.at(target->function).tier;
    const Tier upstream_tier = allocation.functions.at(upstream).tier;
    const auto path = stream_path(fabric, upstream_tier, target_tier);

    const double full_mbps = sc.pipeline.full_mbps(sc.trace);
    const double full_millicpu = sc.pipeline.full_millicpu(sc.trace);
    const double interval = sc.runtime.interval_s;
    const int ticks = static_cast<int>(std::ceil(sc.duration_s / interval));

    // Slice ids along the stream path, in path order (empty in best effort).
    std::vector<std::optional<std::uint64_t>> path_slices(path.size());
    if (!sc.best_effort) {
        const auto& fn_alloc = allocation.functions.at(target->function);
        for (std::size_t i = 0; i < path.size(); ++i)
            for (const NetworkSlice& ns : fn_alloc.network)
                if (ns.link == path[i]) path_slices[i] = ns.slice_id;
    }

    Controller controller(sc.runtime);
    int alerts_max = 0;
    bool clamped_any = false;
    double backlog = 0;

    for (int k = 0; k < ticks; ++k) {
        const double t = k * interval;
        fabric.advance_to(t);
        const Demand demand = demand_at(sc.pipeline, sc.trace, t);

        double net_capable = 0;
        if (demand.mbps > 0) {
            net_capable = demand.mbps;
            for (std::size_t i = 0; i < path.size(); ++i) {
                auto delivered = fabric.link_delivery(
                    path[i], {FlowDemand{path_slices[i], net_capable}});
                net_capable = delivered.front();
            }
        }
        double cpu_capable = 0;
        const auto& target_alloc = allocation.functions.at(target->function);
        if (target_alloc.compute) {
            cpu_capable = static_cast<double>(
                fabric.compute_slice(target_alloc.compute->slice_id)->granted_millicpu);
        } else {
            auto shares = fabric.compute_delivery(
                target_tier,
                {PodDemand{std::nullopt,
                           static_cast<std::int64_t>(std::llround(full_millicpu))}});
            cpu_capable = shares.front();
        }

        const double f_net =
            full_mbps > 0 ? std::min(1.0, net_capable / full_mbps) : 0.0;
        const double f =
            processed_fraction(net_capable, cpu_capable, full_mbps, full_millicpu);
        backlog += interval * sc.trace.fps * std::max(0.0, f_net - f);

        MetricsSample sample;
        sample.time_s = t;
        for (const ResourceRequest& req : requests) {
            const auto& fn_alloc = allocation.functions.at(req.function);
            FunctionMetrics m;
            if (fn_alloc.compute) {
                m.granted_millicpu = static_cast<double>(
                    fabric.compute_slice(fn_alloc.compute->slice_id)->granted_millicpu);
            }
            if (req.function == target->function) {
                m.delivered_mbps = net_capable;
                m.demand_mbps = demand.mbps;
                m.latency_ms = path_latency(fabric, path);
                m.per = path_per(fabric, path);
                m.used_millicpu = f * full_millicpu;
                m.backlog_frames = backlog;
                if (!fn_alloc.compute) m.granted_millicpu = cpu_capable;
            } else {
                double lat = 0, per = 0;
                for (const std::string& up : req.upstreams) {
                    auto p = stream_path(fabric, allocation.functions.at(up).tier,
                                         fn_alloc.tier);
                    lat = std::max(lat, path_latency(fabric, p));
                    per = std::max(per, path_per(fabric, p));
                }
                m.latency_ms = lat;
                m.per = per;
            }
            sample.per_function[req.function] = m;
        }

        report.service.push_back({net_capable, cpu_capable, true});
        bool clamped = false;
        const int ceiling =
            interval_alert_ceiling(sc.profile, net_capable, cpu_capable, &clamped);
        clamped_any = clamped_any || clamped;
        alerts_max = std::max(alerts_max, ceiling);
        sample.app_alerts_so_far = alerts_max;
        report.metrics.push_back(sample);

        if (!sc.best_effort && sc.dynamic_adjustment) {
            auto adjustments = controller.tick(sample, requests, allocation, fabric);
            report.adjustments.insert(report.adjustments.end(), adjustments.begin(),
                                      adjustments.end());
        }

        if (!sc.best_effort) {
            const double dt = std::min(interval, sc.duration_s - t);
            for (const auto& [name, fn_alloc] : allocation.functions) {
                if (!fn_alloc.compute) continue;
                const ComputeSlice* live =
                    fabric.compute_slice(fn_alloc.compute->slice_id);
                report.total_cost += static_cast<double>(live->granted_millicpu) *
                                     fabric.tier(live->tier).cost_per_millicpu_s * dt;
            }
        }
    }

    report.alerts = alerts_max;
    report.alert_floor_clamped = clamped_any;
    report.simulated_s = sc.duration_s;
    return report;
}

std::optional<SweepAxis> sweep_axis_from_string(std::string_view s) {
    if (s == "net") return SweepAxis::Network;
    if (s == "cpu") return SweepAxis::Compute;
    if (s == "joint") return SweepAxis::Joint;
    return std::nullopt;
}

std::vector<SweepPoint> run_sweep(const Scenario& base,
                                  const std::vector<SweepInput>& points) {
    // Dry placement of the base to learn where the stream flows, so load can
    // be pinned on its path and its compute tier.
    Fabric probe(base.fabric);
    auto requests = build_requests(base.spec.app, base.spec.app_slice);
    auto placed = place_best_effort(requests, probe);
    if (std::holds_alternative<FailureReport>(placed))
        throw FabricError("sweep base scenario cannot be placed");
    const Allocation& layout = std::get<Allocation>(placed);

    const ResourceRequest* target = nullptr;
    for (const ResourceRequest& req : requests)
        if (req.function == base.pipeline.target_function) target = &req;
    if (!target || target->upstreams.size() != 1)
        throw ValidationError("/workload/pipeline/targetFunction",
                              "target function needs exactly one upstream feed");
    const Tier target_tier = layout.functions.at(target->function).tier;
    const Tier upstream_tier = layout.functions.at(target->upstreams.front()).tier;
    const auto path = stream_path(probe, upstream_tier, target_tier);

    std::vector<SweepPoint> out;
    for (const SweepInput& input : points) {
        Scenario sc = base;
        if (input.net_mbps) {
            if (path.empty())
                throw FabricError("stream path has no links to throttle");
            for (const LinkId& id : path) {
                LoadEvent e;
                e.time_s = 0;
                e.target = id;
                e.kind = LoadKind::TrafficMbps;
                e.value = std::max(0.0, probe.link(id).capacity_mbps - *input.net_mbps);
                sc.fabric.load_schedule.push_back(e);
            }
        }
        if (input.cpu_cores) {
            LoadEvent e;
            e.time_s = 0;
            e.target = target_tier;
            e.kind = LoadKind::CpuBurnMillicpu;
            const auto want =
                static_cast<std::int64_t>(std::llround(*input.cpu_cores * 1000));
            e.value = static_cast<double>(
                std::max<std::int64_t>(0, probe.tier(target_tier).total_millicpu - want));
            sc.fabric.load_schedule.push_back(e);
        }
        RunReport rep = run_scenario(sc);

        SweepPoint point;
        point.alerts = rep.alerts;
        if (rep.service.empty()) {
            point.net_mbps = input.net_mbps.value_or(0);
            point.cpu_cores = input.cpu_cores.value_or(0);
            point.bottleneck = "none";
        } else {
            std::size_t best = 0;
            int best_ceiling = -1;
            for (std::size_t i = 0; i < rep.service.size(); ++i) {
                const ServicePoint& sp = rep.service[i];
                int c = interval_alert_ceiling(base.profile, sp.net_mbps,
                                               sp.cpu_millicpu);
                if (c > best_ceiling) {
                    best_ceiling = c;
                    best = i;
                }
            }
            const ServicePoint& sp = rep.service[best];
            point.net_mbps = sp.net_mbps;
            point.cpu_cores = sp.cpu_millicpu / 1000.0;
            const int a_net = base.profile.net_alerts(sp.net_mbps);
            const int a_cpu = base.profile.cpu_alerts(sp.cpu_millicpu / 1000.0);
            point.bottleneck = a_net < a_cpu   ? "network"
                               : a_cpu < a_net ? "compute"
                                               : "none";
        }
        out.push_back(point);
    }
    return out;
}

std::string sweep_csv(const std::vector<SweepPoint>& points) {
    std::ostringstream out;
    out << "net_mbps,cpu_cores,alerts,bottleneck\n";
    for (const SweepPoint& p : points)
        out << fmt(p.net_mbps) << ',' << fmt(p.cpu_cores) << ',' << p.alerts << ','
            << p.bottleneck << '\n';
    return out.str();
}

}  // namespace appslice
