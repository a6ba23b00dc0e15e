#include "appslice/runtime.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace appslice {

const char* to_string(GrowthPolicy policy) {
    switch (policy) {
        case GrowthPolicy::ToMbrCap: return "toMBRCap";
        case GrowthPolicy::Doubling: return "doubling";
    }
    return "?";
}

std::optional<GrowthPolicy> growth_policy_from_string(std::string_view s) {
    if (s == "toMBRCap") return GrowthPolicy::ToMbrCap;
    if (s == "doubling") return GrowthPolicy::Doubling;
    return std::nullopt;
}

const char* to_string(Resource r) {
    return r == Resource::Network ? "network" : "compute";
}

const char* to_string(AdjustAction a) {
    switch (a) {
        case AdjustAction::Grow: return "grow";
        case AdjustAction::Shrink: return "shrink";
        case AdjustAction::Error: return "error";
    }
    return "?";
}

json Adjustment::to_json() const {
    json j;
    j["timeS"] = time_s;
    j["function"] = function;
    j["resource"] = to_string(resource);
    j["action"] = to_string(action);
    j["from"] = from_value;
    j["to"] = to_value;
    if (!detail.empty()) j["detail"] = detail;
    return j;
}

json FailureReport::to_json() const {
    json j;
    j["failures"] = json::array();
    for (const auto& item : items) {
        json fj;
        fj["function"] = item.function;
        fj["dimensions"] = item.dimensions;
        j["failures"].push_back(std::move(fj));
    }
    return j;
}

std::vector<ResourceRequest> build_requests(const AppSpec& app,
                                            const AppSliceSpec& slice) {
    std::vector<ResourceRequest> requests;
    for (const std::string& name : topological_function_order(app)) {
        const FunctionDef* fn = app.find_function(name);
        auto it = slice.per_function.find(name);
        if (it == slice.per_function.end())
            throw ValidationError("/appSlice/perFunction/" + name,
                                  "function has no slice entry");
        (void)fn;
        ResourceRequest req;
        req.function = name;
        req.compute = it->second.compute;
        req.network = it->second.network;
        req.pinned_tier = it->second.compute.tier;
        req.upstreams = upstream_functions(app, name);
        requests.push_back(std::move(req));
    }
    return requests;
}

bool match_resources(const ComputeReq& compute, const NetworkReq& network,
                     const TierAvailability& tier, const LinkAvailability& link) {
    if (tier.free_millicpu < compute.min_millicpu) return false;
    if (tier.free_memory_bytes < compute.min_memory_bytes) return false;
    if (link.gbr_headroom_mbps < network.throughput_gbr_mbps) return false;
    if (link.base_latency_ms > network.latency_ms) return false;
    if (link.base_per > network.packet_error_rate) return false;
    return true;
}

namespace {

std::vector<Tier> candidate_tiers(const ResourceRequest& req, const Fabric& fabric) {
    if (req.pinned_tier) {
        if (fabric.has_tier(*req.pinned_tier)) return {*req.pinned_tier};
        return {};
    }
    std::vector<Tier> tiers = fabric.tiers();
    std::stable_sort(tiers.begin(), tiers.end(), [&](Tier a, Tier b) {
        double ca = fabric.tier(a).cost_per_millicpu_s;
        double cb = fabric.tier(b).cost_per_millicpu_s;
        if (ca != cb) return ca < cb;
        return a < b;  // fixed order device < edge < cloud on ties
    });
    return tiers;
}

/// Combined error rate of a path under independent per-link losses.
double path_per(const Fabric& fabric, const std::vector<LinkId>& path) {
    double ok = 1.0;
    for (const LinkId& l : path) ok *= 1.0 - fabric.link(l).base_per;
    return 1.0 - ok;
}

double path_latency(const Fabric& fabric, const std::vector<LinkId>& path) {
    double total = 0;
    for (const LinkId& l : path) total += fabric.link(l).base_latency_ms;
    return total;
}

struct TierCheck {
    bool feasible = false;
    std::vector<std::string> failed;  // dimensions
    std::vector<std::vector<LinkId>> paths;
};

TierCheck check_tier(const ResourceRequest& req, Tier candidate,
                     const std::map<std::string, Tier>& placed,
                     const Fabric& fabric, bool reserve) {
    TierCheck check;
    auto fail = [&](const char* dim) {
        if (std::find(check.failed.begin(), check.failed.end(), dim) ==
            check.failed.end())
            check.failed.emplace_back(dim);
    };

    if (reserve) {
        if (fabric.free_millicpu(candidate) < req.compute.min_millicpu)
            fail("compute.cpu");
        if (fabric.free_memory(candidate) < req.compute.min_memory_bytes)
            fail("compute.memory");
    } else {
        if (fabric.tier(candidate).total_millicpu < req.compute.min_millicpu)
            fail("compute.cpu");
        if (fabric.tier(candidate).total_memory_bytes < req.compute.min_memory_bytes)
            fail("compute.memory");
    }

    for (const std::string& up : req.upstreams) {
        auto it = placed.find(up);
        if (it == placed.end() || it->second == candidate) continue;
        auto path = fabric.find_path(it->second, candidate);
        if (!path) {
            fail("network.path");
            continue;
        }
        if (reserve) {
            bool room = true;
            for (const LinkId& l : *path)
                if (fabric.gbr_headroom(l) < req.network.throughput_gbr_mbps)
                    room = false;
            if (!room) fail("network.bandwidth");
            if (path_latency(fabric, *path) > req.network.latency_ms)
                fail("network.latency");
            if (path_per(fabric, *path) > req.network.packet_error_rate)
                fail("network.packetErrorRate");
        }
        check.paths.push_back(std::move(*path));
    }
    check.feasible = check.failed.empty();
    return check;
}

}  // namespace

AllocationResult allocate(const std::vector<ResourceRequest>& requests,
                          Fabric& fabric) {
    Allocation allocation;
    FailureReport failure;
    std::map<std::string, Tier> placed;
    std::vector<std::uint64_t> granted_ids;

    for (const ResourceRequest& req : requests) {
        bool done = false;
        std::vector<std::string> failed_dimensions;
        for (Tier candidate : candidate_tiers(req, fabric)) {
            TierCheck check = check_tier(req, candidate, placed, fabric, true);
            if (!check.feasible) {
                for (const auto& d : check.failed)
                    if (std::find(failed_dimensions.begin(), failed_dimensions.end(),
                                  d) == failed_dimensions.end())
                        failed_dimensions.push_back(d);
                continue;
            }
            FunctionAllocation fa;
            fa.tier = candidate;
            fa.compute = fabric.grant_compute(req.compute, candidate, req.function);
            granted_ids.push_back(fa.compute->slice_id);
            for (const auto& path : check.paths) {
                for (const LinkId& l : path) {
                    NetworkSlice ns = fabric.grant_network(req.network, l, req.function);
                    granted_ids.push_back(ns.slice_id);
                    fa.network.push_back(std::move(ns));
                }
            }
            allocation.total_cost_rate +=
                static_cast<double>(fa.compute->granted_millicpu) *
                fabric.tier(candidate).cost_per_millicpu_s;
            allocation.functions[req.function] = std::move(fa);
            placed[req.function] = candidate;
            done = true;
            break;
        }
        if (!done) {
            if (failed_dimensions.empty())
                failed_dimensions.emplace_back("placement");
            failure.items.push_back({req.function, std::move(failed_dimensions)});
        }
    }

    if (!failure.items.empty()) {
        // Undo in reverse grant order so the ledgers return to their exact
        // previous values.
        for (auto it = granted_ids.rbegin(); it != granted_ids.rend(); ++it)
            fabric.release(*it);
        return failure;
    }
    return allocation;
}

AllocationResult place_best_effort(const std::vector<ResourceRequest>& requests,
                                   const Fabric& fabric) {
    Allocation allocation;
    allocation.best_effort = true;
    FailureReport failure;
    std::map<std::string, Tier> placed;

    for (const ResourceRequest& req : requests) {
        bool done = false;
        std::vector<std::string> failed_dimensions;
        for (Tier candidate : candidate_tiers(req, fabric)) {
            TierCheck check = check_tier(req, candidate, placed, fabric, false);
            if (!check.feasible) {
                for (const auto& d : check.failed)
                    if (std::find(failed_dimensions.begin(), failed_dimensions.end(),
                                  d) == failed_dimensions.end())
                        failed_dimensions.push_back(d);
                continue;
            }
            FunctionAllocation fa;
            fa.tier = candidate;
            allocation.functions[req.function] = std::move(fa);
            placed[req.function] = candidate;
            done = true;
            break;
        }
        if (!done) {
            if (failed_dimensions.empty())
                failed_dimensions.emplace_back("placement");
            failure.items.push_back({req.function, std::move(failed_dimensions)});
        }
    }
    if (!failure.items.empty()) return failure;
    return allocation;
}

std::vector<Adjustment> Controller::tick(const MetricsSample& sample,
                                         const std::vector<ResourceRequest>& requests,
                                         const Allocation& allocation,
                                         Fabric& fabric) {
    std::vector<Adjustment> adjustments;
    for (const ResourceRequest& req : requests) {
        auto mit = sample.per_function.find(req.function);
        auto ait = allocation.functions.find(req.function);
        if (mit == sample.per_function.end() || ait == allocation.functions.end())
            continue;
        const FunctionMetrics& m = mit->second;
        const FunctionAllocation& fa = ait->second;
        FunctionState& st = state_[req.function];

        // Network. All of a function's network slices share one guaranteed
        // rate, so resizes apply to each traversed link together.
        if (!fa.network.empty()) {
            const NetworkSlice* live = fabric.network_slice(fa.network.front().slice_id);
            if (live) {
                double gbr = live->gbr_mbps;
                bool saturated = m.delivered_mbps >= cfg_.saturation_threshold * gbr &&
                                 m.demand_mbps > m.delivered_mbps;
                if (saturated) {
                    st.network_underuse_ticks = 0;
                    double target = cfg_.growth_policy == GrowthPolicy::ToMbrCap
                                        ? req.network.throughput_mbr_mbps
                                        : std::min(req.network.throughput_mbr_mbps,
                                                   gbr * 2.0);
                    if (target > gbr) {
                        bool room = true;
                        std::string blocked;
                        for (const NetworkSlice& ns : fa.network) {
                            const NetworkSlice* cur = fabric.network_slice(ns.slice_id);
                            if (!cur ||
                                fabric.gbr_headroom(cur->link) < target - cur->gbr_mbps) {
                                room = false;
                                blocked = to_string(ns.link);
                            }
                        }
                        if (room) {
                            for (const NetworkSlice& ns : fa.network)
                                fabric.resize_network(ns.slice_id, target);
                            adjustments.push_back({sample.time_s, req.function,
                                                   Resource::Network, AdjustAction::Grow,
                                                   gbr, target, ""});
                        } else {
                            adjustments.push_back({sample.time_s, req.function,
                                                   Resource::Network, AdjustAction::Error,
                                                   gbr, target,
                                                   "no headroom on " + blocked});
                        }
                    }
                } else {
                    if (m.delivered_mbps < cfg_.underuse_threshold * gbr)
                        ++st.network_underuse_ticks;
                    else
                        st.network_underuse_ticks = 0;
                    if (st.network_underuse_ticks >= cfg_.underuse_ticks) {
                        double target = std::max(req.network.throughput_gbr_mbps,
                                                 m.delivered_mbps);
                        if (target < gbr) {
                            for (const NetworkSlice& ns : fa.network)
                                fabric.resize_network(ns.slice_id, target);
                            adjustments.push_back({sample.time_s, req.function,
                                                   Resource::Network,
                                                   AdjustAction::Shrink, gbr, target,
                                                   ""});
                            st.network_underuse_ticks = 0;
                        }
                    }
                }
            }
        }

        // Compute.
        if (fa.compute) {
            const ComputeSlice* live = fabric.compute_slice(fa.compute->slice_id);
            if (live) {
                double granted = static_cast<double>(live->granted_millicpu);
                bool backlog_rising = st.has_previous_backlog &&
                                      m.backlog_frames > st.previous_backlog;
                bool saturated =
                    m.used_millicpu >= cfg_.saturation_threshold * granted &&
                    backlog_rising;
                if (saturated) {
                    st.compute_underuse_ticks = 0;
                    std::int64_t target =
                        cfg_.growth_policy == GrowthPolicy::ToMbrCap
                            ? req.compute.max_millicpu
                            : std::min(req.compute.max_millicpu,
                                       live->granted_millicpu * 2);
                    if (target > live->granted_millicpu) {
                        std::int64_t need = target - live->granted_millicpu;
                        if (fabric.free_millicpu(live->tier) >= need) {
                            fabric.resize_compute(live->slice_id, target);
                            adjustments.push_back({sample.time_s, req.function,
                                                   Resource::Compute, AdjustAction::Grow,
                                                   granted, static_cast<double>(target),
                                                   ""});
                        } else {
                            adjustments.push_back(
                                {sample.time_s, req.function, Resource::Compute,
                                 AdjustAction::Error, granted,
                                 static_cast<double>(target),
                                 std::string("no free cpu on ") + to_string(live->tier)});
                        }
                    }
                } else {
                    if (m.used_millicpu < cfg_.underuse_threshold * granted)
                        ++st.compute_underuse_ticks;
                    else
                        st.compute_underuse_ticks = 0;
                    if (st.compute_underuse_ticks >= cfg_.underuse_ticks) {
                        std::int64_t target = std::max(
                            req.compute.min_millicpu,
                            static_cast<std::int64_t>(std::ceil(m.used_millicpu)));
                        if (target < live->granted_millicpu) {
                            fabric.resize_compute(live->slice_id, target);
                            adjustments.push_back({sample.time_s, req.function,
                                                   Resource::Compute,
                                                   AdjustAction::Shrink, granted,
                                                   static_cast<double>(target), ""});
                            st.compute_underuse_ticks = 0;
                        }
                    }
                }
            }
        }

        st.previous_backlog = m.backlog_frames;
        st.has_previous_backlog = true;
    }
    return adjustments;
}

}  // namespace appslice
