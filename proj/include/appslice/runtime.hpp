#ifndef APPSLICE_RUNTIME_HPP
#define APPSLICE_RUNTIME_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "appslice/fabric.hpp"
#include "appslice/spec_model.hpp"

namespace appslice {

/// One function's placement request, resolved from the validated specs.
/// `upstreams` lists the functions feeding it, in declaration order; the
/// network requirement applies to the paths from those upstreams.
struct ResourceRequest {
    std::string function;
    ComputeReq compute;
    NetworkReq network;
    std::optional<Tier> pinned_tier;
    std::vector<std::string> upstreams;

    bool operator==(const ResourceRequest&) const = default;
};

/// Requests in topological function order. Requires every function to carry
/// a resolved slice; throws ValidationError otherwise.
std::vector<ResourceRequest> build_requests(const AppSpec& app,
                                            const AppSliceSpec& slice);

struct TierAvailability {
    std::int64_t free_millicpu = 0;
    std::int64_t free_memory_bytes = 0;
};

struct LinkAvailability {
    double gbr_headroom_mbps = 0;
    double base_latency_ms = 0;
    double base_per = 0;
};

/// Pure admission predicate: do the tier and the link satisfy the request?
bool match_resources(const ComputeReq& compute, const NetworkReq& network,
                     const TierAvailability& tier, const LinkAvailability& link);

struct FunctionAllocation {
    Tier tier = Tier::Device;
    std::optional<ComputeSlice> compute;
    std::vector<NetworkSlice> network;  // one per traversed link, usually <= 1

    bool operator==(const FunctionAllocation&) const = default;
};

struct Allocation {
    std::map<std::string, FunctionAllocation> functions;
    double total_cost_rate = 0;  // cost units per second
    bool best_effort = false;

    bool operator==(const Allocation&) const = default;
};

struct FailureReport {
    struct Item {
        std::string function;
        std::vector<std::string> dimensions;

        bool operator==(const Item&) const = default;
    };
    std::vector<Item> items;

    json to_json() const;

    bool operator==(const FailureReport&) const = default;
};

using AllocationResult = std::variant<Allocation, FailureReport>;

/// Places every function on the first tier, in ascending cost order, that
/// satisfies its request; grants are made as it goes. If any function has no
/// feasible tier, every grant already made is released and the report lists
/// the failing dimensions per function.
AllocationResult allocate(const std::vector<ResourceRequest>& requests,
                          Fabric& fabric);

/// Placement without reservations: feasibility degrades to "fits the tier at
/// all and a path from each upstream exists". The fabric is not modified.
AllocationResult place_best_effort(const std::vector<ResourceRequest>& requests,
                                   const Fabric& fabric);

enum class GrowthPolicy { ToMbrCap, Doubling };

const char* to_string(GrowthPolicy policy);
std::optional<GrowthPolicy> growth_policy_from_string(std::string_view s);

struct RuntimeConfig {
    double interval_s = 2.0;
    double saturation_threshold = 0.95;
    double underuse_threshold = 0.5;
    int underuse_ticks = 3;
    GrowthPolicy growth_policy = GrowthPolicy::ToMbrCap;

    bool operator==(const RuntimeConfig&) const = default;
};

struct FunctionMetrics {
    double delivered_mbps = 0;
    double demand_mbps = 0;
    double latency_ms = 0;
    double per = 0;
    double used_millicpu = 0;
    double granted_millicpu = 0;
    double backlog_frames = 0;

    bool operator==(const FunctionMetrics&) const = default;
};

struct MetricsSample {
    double time_s = 0;
    std::map<std::string, FunctionMetrics> per_function;
    int app_alerts_so_far = 0;

    bool operator==(const MetricsSample&) const = default;
};

enum class Resource { Network, Compute };
enum class AdjustAction { Grow, Shrink, Error };

const char* to_string(Resource r);
const char* to_string(AdjustAction a);

struct Adjustment {
    double time_s = 0;
    std::string function;
    Resource resource = Resource::Network;
    AdjustAction action = AdjustAction::Grow;
    double from_value = 0;
    double to_value = 0;
    std::string detail;

    json to_json() const;

    bool operator==(const Adjustment&) const = default;
};

/// The periodic adjustment loop. Grows a grant when it is saturated and
/// demand goes unmet, shrinks it back toward the requested minimum after
/// sustained underuse, and reports instead of growing when the fabric has
/// no room. Holds the hysteresis counters between ticks.
class Controller {
public:
    explicit Controller(RuntimeConfig config) : cfg_(config) {}

    std::vector<Adjustment> tick(const MetricsSample& sample,
                                 const std::vector<ResourceRequest>& requests,
                                 const Allocation& allocation, Fabric& fabric);

private:
    struct FunctionState {
        int network_underuse_ticks = 0;
        int compute_underuse_ticks = 0;
        double previous_backlog = 0;
        bool has_previous_backlog = false;
    };

    RuntimeConfig cfg_;
    std::map<std::string, FunctionState> state_;
};

}  // namespace appslice

#endif  // APPSLICE_RUNTIME_HPP
