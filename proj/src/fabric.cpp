#include "appslice/fabric.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <set>
#include <sstream>

namespace appslice {

std::string to_string(const LinkId& id) {
    return std::string(to_string(id.from)) + "->" + to_string(id.to);
}

std::optional<LinkId> link_id_from_string(std::string_view s) {
    auto pos = s.find("->");
    if (pos == std::string_view::npos) return std::nullopt;
    auto from = tier_from_string(s.substr(0, pos));
    auto to = tier_from_string(s.substr(pos + 2));
    if (!from || !to) return std::nullopt;
    return LinkId{*from, *to};
}

const char* to_string(FabricEventKind kind) {
    switch (kind) {
        case FabricEventKind::GrantCompute: return "grantCompute";
        case FabricEventKind::GrantNetwork: return "grantNetwork";
        case FabricEventKind::Release: return "release";
        case FabricEventKind::ResizeCompute: return "resizeCompute";
        case FabricEventKind::ResizeNetwork: return "resizeNetwork";
        case FabricEventKind::ExternalTraffic: return "externalTraffic";
        case FabricEventKind::CpuBurn: return "cpuBurn";
    }
    return "?";
}

json FabricEvent::to_json() const {
    json j;
    j["seq"] = seq;
    j["timeS"] = time_s;
    j["kind"] = to_string(kind);
    if (slice_id != 0) j["sliceId"] = slice_id;
    j["target"] = target;
    j["valueA"] = value_a;
    j["valueB"] = value_b;
    return j;
}

std::vector<double> maxmin_shares(const std::vector<double>& demands, double budget) {
    std::vector<double> shares(demands.size(), 0.0);
    if (demands.empty() || budget <= 0) return shares;
    std::vector<std::size_t> order(demands.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return demands[a] < demands[b];
    });
    double remaining = budget;
    std::size_t left = demands.size();
    for (std::size_t idx : order) {
        double fair = remaining / static_cast<double>(left);
        double take = std::min(demands[idx], fair);
        if (take < 0) take = 0;
        shares[idx] = take;
        remaining -= take;
        --left;
    }
    return shares;
}

Fabric::Fabric(FabricConfig config) {
    for (const auto& t : config.tiers) {
        if (tiers_.count(t.id))
            throw ValidationError("/fabric/tiers", "duplicate tier");
        tiers_[t.id] = TierLedger{t, 0, 0, 0};
    }
    for (const auto& l : config.links) {
        if (!tiers_.count(l.id.from) || !tiers_.count(l.id.to))
            throw UnknownTarget("link " + to_string(l.id) + " references a missing tier");
        if (links_.count(l.id))
            throw ValidationError("/fabric/links", "duplicate link");
        links_[l.id] = LinkLedger{l, 0, 0};
        link_order_.push_back(l.id);
    }
    double prev = 0;
    for (const auto& e : config.load_schedule) {
        if (e.time_s < prev)
            throw ValidationError("/fabric/loadSchedule", "times must be non-decreasing");
        prev = e.time_s;
        if (std::holds_alternative<Tier>(e.target)) {
            if (!tiers_.count(std::get<Tier>(e.target)))
                throw UnknownTarget("load schedule targets a missing tier");
        } else if (!links_.count(std::get<LinkId>(e.target))) {
            throw UnknownTarget("load schedule targets a missing link");
        }
    }
    schedule_ = std::move(config.load_schedule);
}

bool Fabric::has_tier(Tier t) const { return tiers_.count(t) > 0; }

const TierCapacity& Fabric::tier(Tier t) const {
    auto it = tiers_.find(t);
    if (it == tiers_.end())
        throw UnknownTarget(std::string("no such tier: ") + to_string(t));
    return it->second.cap;
}

bool Fabric::has_link(LinkId id) const { return links_.count(id) > 0; }

const LinkConfig& Fabric::link(LinkId id) const {
    auto it = links_.find(id);
    if (it == links_.end())
        throw UnknownTarget("no such link: " + to_string(id));
    return it->second.cfg;
}

std::vector<Tier> Fabric::tiers() const {
    std::vector<Tier> out;
    for (const auto& [t, ledger] : tiers_) {
        (void)ledger;
        out.push_back(t);
    }
    return out;
}

std::vector<LinkId> Fabric::links() const { return link_order_; }

std::optional<std::vector<LinkId>> Fabric::find_path(Tier from, Tier to) const {
    if (from == to) return std::vector<LinkId>{};
    std::map<Tier, LinkId> via;
    std::deque<Tier> frontier{from};
    std::set<Tier> seen{from};
    while (!frontier.empty()) {
        Tier at = frontier.front();
        frontier.pop_front();
        for (const LinkId& l : link_order_) {
            if (l.from != at || seen.count(l.to)) continue;
            via[l.to] = l;
            if (l.to == to) {
                std::vector<LinkId> path;
                Tier cur = to;
                while (cur != from) {
                    LinkId step = via.at(cur);
                    path.push_back(step);
                    cur = step.from;
                }
                std::reverse(path.begin(), path.end());
                return path;
            }
            seen.insert(l.to);
            frontier.push_back(l.to);
        }
    }
    return std::nullopt;
}

std::int64_t Fabric::granted_millicpu(Tier t) const {
    auto it = tiers_.find(t);
    if (it == tiers_.end())
        throw UnknownTarget(std::string("no such tier: ") + to_string(t));
    return it->second.granted_millicpu;
}

std::int64_t Fabric::granted_memory(Tier t) const {
    auto it = tiers_.find(t);
    if (it == tiers_.end())
        throw UnknownTarget(std::string("no such tier: ") + to_string(t));
    return it->second.granted_memory;
}

std::int64_t Fabric::free_millicpu(Tier t) const {
    const auto& ledger = tiers_.at(t);
    return ledger.cap.total_millicpu - ledger.granted_millicpu;
}

std::int64_t Fabric::free_memory(Tier t) const {
    const auto& ledger = tiers_.at(t);
    return ledger.cap.total_memory_bytes - ledger.granted_memory;
}

double Fabric::granted_gbr(LinkId id) const {
    auto it = links_.find(id);
    if (it == links_.end())
        throw UnknownTarget("no such link: " + to_string(id));
    return it->second.granted_gbr;
}

double Fabric::gbr_headroom(LinkId id) const {
    const auto& ledger = links_.at(id);
    return ledger.cfg.capacity_mbps - ledger.granted_gbr;
}

double Fabric::external_traffic(LinkId id) const {
    auto it = links_.find(id);
    if (it == links_.end())
        throw UnknownTarget("no such link: " + to_string(id));
    return it->second.external_mbps;
}

std::int64_t Fabric::cpu_burn(Tier t) const {
    auto it = tiers_.find(t);
    if (it == tiers_.end())
        throw UnknownTarget(std::string("no such tier: ") + to_string(t));
    return it->second.burn_millicpu;
}

void Fabric::refresh_tier(Tier t) {
    auto& ledger = tiers_.at(t);
    std::int64_t cpu = 0;
    std::int64_t mem = 0;
    // Slice ids ascend, so the summation order is reproducible.
    for (const auto& [id, s] : compute_slices_) {
        (void)id;
        if (s.tier == t) {
            cpu += s.granted_millicpu;
            mem += s.granted_memory_bytes;
        }
    }
    ledger.granted_millicpu = cpu;
    ledger.granted_memory = mem;
}

void Fabric::refresh_link(LinkId id) {
    auto& ledger = links_.at(id);
    double gbr = 0;
    for (const auto& [sid, s] : network_slices_) {
        (void)sid;
        if (s.link == id) gbr += s.gbr_mbps;
    }
    ledger.granted_gbr = gbr;
}

void Fabric::log(FabricEventKind kind, std::uint64_t slice_id,
                 const std::string& target, double a, double b) {
    events_.push_back({next_seq_++, clock_s_, kind, slice_id, target, a, b});
}

ComputeSlice Fabric::grant_compute(const ComputeReq& req, Tier t,
                                   const std::string& owner) {
    auto it = tiers_.find(t);
    if (it == tiers_.end())
        throw UnknownTarget(std::string("no such tier: ") + to_string(t));
    if (free_millicpu(t) < req.min_millicpu)
        throw InsufficientCompute(std::string(to_string(t)) + ": " +
                                  std::to_string(free_millicpu(t)) +
                                  "m free, need " +
                                  std::to_string(req.min_millicpu) + "m");
    if (free_memory(t) < req.min_memory_bytes)
        throw InsufficientCompute(std::string(to_string(t)) + ": " +
                                  std::to_string(free_memory(t)) +
                                  " bytes free, need " +
                                  std::to_string(req.min_memory_bytes));
    ComputeSlice slice;
    slice.slice_id = next_slice_id_++;
    slice.owner = owner;
    slice.tier = t;
    slice.granted_millicpu = std::max(req.min_millicpu,
                                      std::min(req.max_millicpu, free_millicpu(t)));
    slice.granted_memory_bytes = std::max(req.min_memory_bytes,
                                          std::min(req.max_memory_bytes, free_memory(t)));
    compute_slices_[slice.slice_id] = slice;
    refresh_tier(t);
    log(FabricEventKind::GrantCompute, slice.slice_id, to_string(t),
        static_cast<double>(slice.granted_millicpu),
        static_cast<double>(slice.granted_memory_bytes));
    check_conservation();
    return slice;
}

NetworkSlice Fabric::grant_network(const NetworkReq& req, LinkId id,
                                   const std::string& owner) {
    auto it = links_.find(id);
    if (it == links_.end())
        throw UnknownTarget("no such link: " + to_string(id));
    const LinkConfig& cfg = it->second.cfg;
    if (gbr_headroom(id) < req.throughput_gbr_mbps)
        throw InsufficientBandwidth(to_string(id) + ": headroom " +
                                    std::to_string(gbr_headroom(id)) +
                                    " Mbps, need " +
                                    std::to_string(req.throughput_gbr_mbps));
    if (cfg.base_latency_ms > req.latency_ms)
        throw LatencyUnsatisfiable(to_string(id) + ": base latency " +
                                   std::to_string(cfg.base_latency_ms) + " ms");
    if (cfg.base_per > req.packet_error_rate)
        throw PERUnsatisfiable(to_string(id) + ": base error rate " +
                               std::to_string(cfg.base_per));
    NetworkSlice slice;
    slice.slice_id = next_slice_id_++;
    slice.owner = owner;
    slice.link = id;
    slice.gbr_mbps = req.throughput_gbr_mbps;
    slice.mbr_mbps = req.throughput_mbr_mbps;
    slice.latency_bound_ms = req.latency_ms;
    slice.per_bound = req.packet_error_rate;
    network_slices_[slice.slice_id] = slice;
    refresh_link(id);
    log(FabricEventKind::GrantNetwork, slice.slice_id, to_string(id),
        slice.gbr_mbps, slice.mbr_mbps);
    check_conservation();
    return slice;
}

void Fabric::release(std::uint64_t slice_id) {
    if (auto it = compute_slices_.find(slice_id); it != compute_slices_.end()) {
        Tier t = it->second.tier;
        compute_slices_.erase(it);
        refresh_tier(t);
        log(FabricEventKind::Release, slice_id, to_string(t), 0, 0);
        check_conservation();
        return;
    }
    if (auto it = network_slices_.find(slice_id); it != network_slices_.end()) {
        LinkId id = it->second.link;
        network_slices_.erase(it);
        refresh_link(id);
        log(FabricEventKind::Release, slice_id, to_string(id), 0, 0);
        check_conservation();
        return;
    }
    throw UnknownSlice("no slice with id " + std::to_string(slice_id));
}

void Fabric::resize_compute(std::uint64_t slice_id, std::int64_t new_millicpu) {
    auto it = compute_slices_.find(slice_id);
    if (it == compute_slices_.end())
        throw UnknownSlice("no compute slice with id " + std::to_string(slice_id));
    ComputeSlice& slice = it->second;
    std::int64_t others = granted_millicpu(slice.tier) - slice.granted_millicpu;
    if (others + new_millicpu > tier(slice.tier).total_millicpu)
        throw InsufficientCompute(std::string(to_string(slice.tier)) +
                                  ": cannot resize slice to " +
                                  std::to_string(new_millicpu) + "m");
    slice.granted_millicpu = new_millicpu;
    refresh_tier(slice.tier);
    log(FabricEventKind::ResizeCompute, slice_id, to_string(slice.tier),
        static_cast<double>(new_millicpu), 0);
    check_conservation();
}

void Fabric::resize_network(std::uint64_t slice_id, double new_gbr_mbps) {
    auto it = network_slices_.find(slice_id);
    if (it == network_slices_.end())
        throw UnknownSlice("no network slice with id " + std::to_string(slice_id));
    NetworkSlice& slice = it->second;
    double others = granted_gbr(slice.link) - slice.gbr_mbps;
    if (others + new_gbr_mbps > link(slice.link).capacity_mbps)
        throw InsufficientBandwidth(to_string(slice.link) +
                                    ": cannot resize slice to " +
                                    std::to_string(new_gbr_mbps) + " Mbps");
    slice.gbr_mbps = new_gbr_mbps;
    refresh_link(slice.link);
    log(FabricEventKind::ResizeNetwork, slice_id, to_string(slice.link),
        new_gbr_mbps, slice.mbr_mbps);
    check_conservation();
}

const ComputeSlice* Fabric::compute_slice(std::uint64_t slice_id) const {
    auto it = compute_slices_.find(slice_id);
    return it == compute_slices_.end() ? nullptr : &it->second;
}

const NetworkSlice* Fabric::network_slice(std::uint64_t slice_id) const {
    auto it = network_slices_.find(slice_id);
    return it == network_slices_.end() ? nullptr : &it->second;
}

void Fabric::set_external_traffic(LinkId id, double mbps) {
    auto it = links_.find(id);
    if (it == links_.end())
        throw UnknownTarget("no such link: " + to_string(id));
    it->second.external_mbps = mbps;
    log(FabricEventKind::ExternalTraffic, 0, to_string(id), mbps, 0);
}

void Fabric::set_cpu_burn(Tier t, std::int64_t millicpu) {
    auto it = tiers_.find(t);
    if (it == tiers_.end())
        throw UnknownTarget(std::string("no such tier: ") + to_string(t));
    it->second.burn_millicpu = millicpu;
    log(FabricEventKind::CpuBurn, 0, to_string(t), static_cast<double>(millicpu), 0);
}

void Fabric::advance_to(double time_s) {
    while (schedule_cursor_ < schedule_.size() &&
           schedule_[schedule_cursor_].time_s <= time_s) {
        const LoadEvent& e = schedule_[schedule_cursor_];
        clock_s_ = e.time_s;
        if (e.kind == LoadKind::TrafficMbps)
            set_external_traffic(std::get<LinkId>(e.target), e.value);
        else
            set_cpu_burn(std::get<Tier>(e.target),
                         static_cast<std::int64_t>(std::llround(e.value)));
        ++schedule_cursor_;
    }
    clock_s_ = std::max(clock_s_, time_s);
}

std::vector<double> Fabric::link_delivery(LinkId id,
                                          const std::vector<FlowDemand>& flows) const {
    auto it = links_.find(id);
    if (it == links_.end())
        throw UnknownTarget("no such link: " + to_string(id));
    const LinkLedger& ledger = it->second;
    double residual = ledger.cfg.capacity_mbps - ledger.granted_gbr -
                      ledger.external_mbps;
    if (residual < 0) residual = 0;

    std::vector<double> guaranteed(flows.size(), 0.0);
    std::vector<double> extra(flows.size(), 0.0);
    for (std::size_t i = 0; i < flows.size(); ++i) {
        const FlowDemand& f = flows[i];
        if (f.slice_id) {
            const NetworkSlice* s = network_slice(*f.slice_id);
            if (!s || s->link != id)
                throw UnknownSlice("flow names a slice not on link " + to_string(id));
            double want = std::min(f.demand_mbps, s->mbr_mbps);
            guaranteed[i] = std::min(want, s->gbr_mbps);
            extra[i] = want - guaranteed[i];
        } else {
            extra[i] = f.demand_mbps;
        }
    }
    std::vector<double> shares = maxmin_shares(extra, residual);
    std::vector<double> delivered(flows.size(), 0.0);
    for (std::size_t i = 0; i < flows.size(); ++i)
        delivered[i] = guaranteed[i] + shares[i];
    return delivered;
}

std::vector<double> Fabric::compute_delivery(Tier t,
                                             const std::vector<PodDemand>& pods) const {
    auto it = tiers_.find(t);
    if (it == tiers_.end())
        throw UnknownTarget(std::string("no such tier: ") + to_string(t));
    const TierLedger& ledger = it->second;
    double pool = static_cast<double>(ledger.cap.total_millicpu -
                                      ledger.granted_millicpu - ledger.burn_millicpu);
    if (pool < 0) pool = 0;

    std::vector<double> best_effort_demand;
    std::vector<std::size_t> best_effort_index;
    std::vector<double> delivered(pods.size(), 0.0);
    for (std::size_t i = 0; i < pods.size(); ++i) {
        const PodDemand& p = pods[i];
        if (p.slice_id) {
            const ComputeSlice* s = compute_slice(*p.slice_id);
            if (!s || s->tier != t)
                throw UnknownSlice(std::string("pod names a slice not on tier ") +
                                   to_string(t));
            delivered[i] = static_cast<double>(s->granted_millicpu);
        } else {
            best_effort_demand.push_back(static_cast<double>(p.demand_millicpu));
            best_effort_index.push_back(i);
        }
    }
    std::vector<double> shares = maxmin_shares(best_effort_demand, pool);
    for (std::size_t k = 0; k < best_effort_index.size(); ++k)
        delivered[best_effort_index[k]] = shares[k];
    return delivered;
}

std::string Fabric::events_jsonl() const {
    std::ostringstream out;
    for (const auto& e : events_) out << e.to_json().dump() << "\n";
    return out.str();
}

void Fabric::check_conservation() const {
    for (const auto& [t, ledger] : tiers_) {
        if (ledger.granted_millicpu > ledger.cap.total_millicpu ||
            ledger.granted_memory > ledger.cap.total_memory_bytes)
            throw std::logic_error(std::string("tier overcommitted: ") + to_string(t));
        std::int64_t cpu = 0;
        std::int64_t mem = 0;
        for (const auto& [id, s] : compute_slices_) {
            (void)id;
            if (s.tier == t) {
                cpu += s.granted_millicpu;
                mem += s.granted_memory_bytes;
            }
        }
        if (cpu != ledger.granted_millicpu || mem != ledger.granted_memory)
            throw std::logic_error(std::string("tier ledger out of sync: ") +
                                   to_string(t));
    }
    for (const auto& [id, ledger] : links_) {
        if (ledger.granted_gbr > ledger.cfg.capacity_mbps + 1e-9)
            throw std::logic_error("link overcommitted: " + to_string(id));
        double gbr = 0;
        for (const auto& [sid, s] : network_slices_) {
            (void)sid;
            if (s.link == id) gbr += s.gbr_mbps;
        }
        if (gbr != ledger.granted_gbr)
            throw std::logic_error("link ledger out of sync: " + to_string(id));
    }
}

FabricConfig default_fabric_config() {
    constexpr std::int64_t gi = std::int64_t(1024) * 1024 * 1024;
    FabricConfig cfg;
    cfg.tiers = {
        {Tier::Device, 4000, 4 * gi, 1.0},
        {Tier::Edge, 72000, 64 * gi, 2.0},
        {Tier::Cloud, 64000, 256 * gi, 4.0},
    };
    cfg.links = {
        {{Tier::Device, Tier::Edge}, 5.0, 10.0, 1e-3},
        {{Tier::Edge, Tier::Cloud}, 100.0, 40.0, 1e-4},
    };
    return cfg;
}

}  // namespace appslice
