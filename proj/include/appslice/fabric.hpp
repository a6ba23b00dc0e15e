#ifndef APPSLICE_FABRIC_HPP
#define APPSLICE_FABRIC_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "appslice/spec_model.hpp"

namespace appslice {

/// Directed inter-tier link.
struct LinkId {
    Tier from = Tier::Device;
    Tier to = Tier::Edge;

    auto operator<=>(const LinkId&) const = default;
};

std::string to_string(const LinkId& id);
std::optional<LinkId> link_id_from_string(std::string_view s);

struct TierCapacity {
    Tier id = Tier::Device;
    std::int64_t total_millicpu = 0;
    std::int64_t total_memory_bytes = 0;
    double cost_per_millicpu_s = 0;

    bool operator==(const TierCapacity&) const = default;
};

struct LinkConfig {
    LinkId id;
    double capacity_mbps = 0;
    double base_latency_ms = 0;
    double base_per = 0;

    bool operator==(const LinkConfig&) const = default;
};

enum class LoadKind { TrafficMbps, CpuBurnMillicpu };

/// One step of external background load. Traffic targets a link, cpu burn
/// targets a tier. Values replace the previous level for that target.
struct LoadEvent {
    double time_s = 0;
    std::variant<Tier, LinkId> target;
    LoadKind kind = LoadKind::TrafficMbps;
    double value = 0;

    bool operator==(const LoadEvent&) const = default;
};

struct FabricConfig {
    std::vector<TierCapacity> tiers;
    std::vector<LinkConfig> links;
    std::vector<LoadEvent> load_schedule;  // times non-decreasing

    bool operator==(const FabricConfig&) const = default;
};

struct ComputeSlice {
    std::uint64_t slice_id = 0;
    std::string owner;
    Tier tier = Tier::Device;
    std::int64_t granted_millicpu = 0;
    std::int64_t granted_memory_bytes = 0;

    bool operator==(const ComputeSlice&) const = default;
};

struct NetworkSlice {
    std::uint64_t slice_id = 0;
    std::string owner;
    LinkId link;
    double gbr_mbps = 0;
    double mbr_mbps = 0;
    double latency_bound_ms = 0;
    double per_bound = 0;

    bool operator==(const NetworkSlice&) const = default;
};

/// A flow competing for a link. With a slice id the flow is guaranteed its
/// slice's GBR and capped at its MBR; without one it is best effort.
struct FlowDemand {
    std::optional<std::uint64_t> slice_id;
    double demand_mbps = 0;
};

/// A pod competing for a tier's cpu. With a slice id delivery equals the
/// hard reservation; without one the pod shares the residual pool.
struct PodDemand {
    std::optional<std::uint64_t> slice_id;
    std::int64_t demand_millicpu = 0;
};

enum class FabricEventKind {
    GrantCompute,
    GrantNetwork,
    Release,
    ResizeCompute,
    ResizeNetwork,
    ExternalTraffic,
    CpuBurn,
};

const char* to_string(FabricEventKind kind);

struct FabricEvent {
    std::uint64_t seq = 0;
    double time_s = 0;
    FabricEventKind kind = FabricEventKind::GrantCompute;
    std::uint64_t slice_id = 0;  // 0 when not slice related
    std::string target;          // tier or link name
    double value_a = 0;          // granted cpu / gbr / load level
    double value_b = 0;          // granted memory / mbr

    json to_json() const;
};

/// Max-min fair shares of `budget` over `demands`.
std::vector<double> maxmin_shares(const std::vector<double>& demands, double budget);

/// The shared compute+network substrate. Keeps hard reservations, external
/// load levels and an append-only event log. All mutators re-derive the
/// per-tier and per-link totals from the live slice set so that a grant
/// followed by its release restores previous state bit for bit.
class Fabric {
public:
    explicit Fabric(FabricConfig config);

    // Topology.
    bool has_tier(Tier t) const;
    const TierCapacity& tier(Tier t) const;
    bool has_link(LinkId id) const;
    const LinkConfig& link(LinkId id) const;
    std::vector<Tier> tiers() const;
    std::vector<LinkId> links() const;
    /// Shortest directed path by hop count; neighbors are explored in link
    /// declaration order, so the result is deterministic.
    std::optional<std::vector<LinkId>> find_path(Tier from, Tier to) const;

    // Ledger queries.
    std::int64_t granted_millicpu(Tier t) const;
    std::int64_t granted_memory(Tier t) const;
    std::int64_t free_millicpu(Tier t) const;
    std::int64_t free_memory(Tier t) const;
    double granted_gbr(LinkId id) const;
    double gbr_headroom(LinkId id) const;
    double external_traffic(LinkId id) const;
    std::int64_t cpu_burn(Tier t) const;

    // Slice lifecycle.
    ComputeSlice grant_compute(const ComputeReq& req, Tier t, const std::string& owner);
    NetworkSlice grant_network(const NetworkReq& req, LinkId id, const std::string& owner);
    void release(std::uint64_t slice_id);
    void resize_compute(std::uint64_t slice_id, std::int64_t new_millicpu);
    void resize_network(std::uint64_t slice_id, double new_gbr_mbps);
    const ComputeSlice* compute_slice(std::uint64_t slice_id) const;
    const NetworkSlice* network_slice(std::uint64_t slice_id) const;

    // External load.
    void set_external_traffic(LinkId id, double mbps);
    void set_cpu_burn(Tier t, std::int64_t millicpu);
    /// Applies schedule entries with time <= time_s that have not been
    /// applied yet, then moves the clock forward.
    void advance_to(double time_s);
    double clock() const { return clock_s_; }

    // Service model.
    /// Delivered Mbps per flow: guaranteed rate first, then a max-min fair
    /// split of the post-reservation residual left by external traffic.
    std::vector<double> link_delivery(LinkId id, const std::vector<FlowDemand>& flows) const;
    /// Delivered millicpu per pod: reservations are hard; best-effort pods
    /// split what cpu burn leaves of the unreserved pool.
    std::vector<double> compute_delivery(Tier t, const std::vector<PodDemand>& pods) const;

    const std::vector<FabricEvent>& events() const { return events_; }
    std::string events_jsonl() const;

    /// Internal consistency: reservations never exceed capacity.
    void check_conservation() const;

private:
    struct TierLedger {
        TierCapacity cap;
        std::int64_t burn_millicpu = 0;
        std::int64_t granted_millicpu = 0;  // derived
        std::int64_t granted_memory = 0;    // derived
    };
    struct LinkLedger {
        LinkConfig cfg;
        double external_mbps = 0;
        double granted_gbr = 0;  // derived
    };

    void refresh_tier(Tier t);
    void refresh_link(LinkId id);
    void log(FabricEventKind kind, std::uint64_t slice_id, const std::string& target,
             double a, double b);

    std::map<Tier, TierLedger> tiers_;
    std::map<LinkId, LinkLedger> links_;
    std::vector<LinkId> link_order_;
    std::map<std::uint64_t, ComputeSlice> compute_slices_;
    std::map<std::uint64_t, NetworkSlice> network_slices_;
    std::vector<LoadEvent> schedule_;
    std::size_t schedule_cursor_ = 0;
    std::uint64_t next_slice_id_ = 1;
    std::uint64_t next_seq_ = 1;
    double clock_s_ = 0;
    std::vector<FabricEvent> events_;
};

/// The testbed-shaped default: one device, a pooled three-worker edge, a
/// cloud region, a thin device uplink and a fat edge-to-cloud link.
FabricConfig default_fabric_config();

}  // namespace appslice

#endif  // APPSLICE_FABRIC_HPP
