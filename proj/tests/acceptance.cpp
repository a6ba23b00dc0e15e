// Acceptance gate: one line per criterion, nonzero exit if any fails.
// Each check recomputes its expectation independently of the library
// internals it exercises (exhaustive search, replayed ledgers, fresh runs).
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "appslice/commands.hpp"
#include "appslice/scenario.hpp"

using namespace appslice;

namespace {

struct Checker {
    bool ok = true;
    std::string first;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            if (ok) first = what;
            ok = false;
        }
    }
};

std::string read_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) return "<unreadable:" + file.string() + ">";
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// ---------------------------------------------------------------- criterion 1

void check_net_sweep(Checker& c) {
    const Scenario base = make_preset("fig5_net");
    std::vector<SweepInput> inputs;
    for (double v : {5.0, 3.0, 0.5, 0.25}) inputs.push_back({v, std::nullopt});
    const auto points = run_sweep(base, inputs);
    c.expect(points.size() == 4, "expected 4 sweep points");
    const int expected[] = {10, 9, 4, 1};
    for (std::size_t i = 0; i < points.size() && i < 4; ++i)
        c.expect(points[i].alerts == expected[i],
                 "net point " + std::to_string(i) + ": alerts " +
                     std::to_string(points[i].alerts) + " != " +
                     std::to_string(expected[i]));
}

// ---------------------------------------------------------------- criterion 2

void check_cpu_sweep(Checker& c) {
    const Scenario base = make_preset("fig5_cpu");
    std::vector<SweepInput> inputs;
    for (double v : {2.0, 1.0, 0.5, 0.1}) inputs.push_back({std::nullopt, v});
    const auto points = run_sweep(base, inputs);
    c.expect(points.size() == 4, "expected 4 sweep points");
    const int expected[] = {10, 8, 5, 1};
    for (std::size_t i = 0; i < points.size() && i < 4; ++i)
        c.expect(points[i].alerts == expected[i],
                 "cpu point " + std::to_string(i) + ": alerts " +
                     std::to_string(points[i].alerts) + " != " +
                     std::to_string(expected[i]));
}

// ---------------------------------------------------------------- criterion 3

void check_joint_grid(Checker& c) {
    const Scenario base = make_preset("fig5_net");
    const std::vector<double> nets = {5.0, 3.0, 0.5, 0.25};
    const std::vector<double> cpus = {2.0, 1.0, 0.5, 0.1};
    std::vector<SweepInput> inputs;
    for (double b : nets)
        for (double cores : cpus) inputs.push_back({b, cores});
    const auto points = run_sweep(base, inputs);
    c.expect(points.size() == 16, "expected 16 grid points");

    for (const SweepPoint& p : points) {
        const int a_net = base.profile.net_alerts(p.net_mbps);
        const int a_cpu = base.profile.cpu_alerts(p.cpu_cores);
        c.expect(p.alerts == std::min(a_net, a_cpu),
                 "grid (" + std::to_string(p.net_mbps) + "," +
                     std::to_string(p.cpu_cores) + "): alerts " +
                     std::to_string(p.alerts) + " != min(" + std::to_string(a_net) +
                     "," + std::to_string(a_cpu) + ")");
        if (p.net_mbps == 5.0 && p.cpu_cores == 2.0)
            c.expect(p.alerts == 10 && p.bottleneck == "none", "full-service corner");
        if (p.net_mbps == 0.25 && p.cpu_cores == 0.1)
            c.expect(p.alerts == 1, "starved corner");
        if (p.net_mbps == 0.5 && p.cpu_cores == 0.5)
            c.expect(p.alerts == 4 && p.bottleneck == "network",
                     "(0.5,0.5) should be network bound at 4");
        if (p.net_mbps == 3.0 && p.cpu_cores == 1.0)
            c.expect(p.alerts == 8 && p.bottleneck == "compute",
                     "(3,1) should be compute bound at 8");
    }
}

// ---------------------------------------------------------------- criterion 4

void check_contended_pair(Checker& c) {
    const RunReport loose = run_scenario(make_preset("fig7a_besteffort"));
    c.expect(loose.alerts == 1,
             "best effort under contention: " + std::to_string(loose.alerts) + " != 1");
    const RunReport sliced = run_scenario(make_preset("fig7a_appslice"));
    c.expect(sliced.alerts == 10,
             "sliced under contention: " + std::to_string(sliced.alerts) + " != 10");
}

// ---------------------------------------------------------------- criterion 5

void check_adjustment_pair(Checker& c) {
    const RunReport fixed = run_scenario(make_preset("fig7b_static"));
    c.expect(fixed.alerts == 4,
             "static undersized guarantee: " + std::to_string(fixed.alerts) + " != 4");

    const RunReport adaptive = run_scenario(make_preset("fig7b_dynamic"));
    c.expect(adaptive.alerts == 10,
             "adaptive run: " + std::to_string(adaptive.alerts) + " != 10");
    c.expect(adaptive.adjustments.size() == 1,
             "expected exactly one adjustment, saw " +
                 std::to_string(adaptive.adjustments.size()));
    int network_grows = 0, compute_changes = 0;
    for (const Adjustment& a : adaptive.adjustments) {
        if (a.resource == Resource::Network && a.action == AdjustAction::Grow) {
            ++network_grows;
            c.expect(a.time_s == 0.0, "grow landed after the first tick");
            c.expect(a.from_value == 0.5 && a.to_value == 5.0,
                     "grow should take the grant from 0.5 to 5");
        }
        if (a.resource == Resource::Compute) ++compute_changes;
    }
    c.expect(network_grows == 1, "expected one network grow");
    c.expect(compute_changes == 0, "compute grants should not move");
}

// ---------------------------------------------------------------- criterion 6

ResourceRequest bare_request(const std::string& name, std::int64_t min_cpu,
                             std::int64_t max_cpu, double gbr) {
    ResourceRequest req;
    req.function = name;
    req.compute.min_millicpu = min_cpu;
    req.compute.max_millicpu = max_cpu;
    req.compute.min_memory_bytes = 1;
    req.compute.max_memory_bytes = 1;
    req.network.latency_ms = 1000;
    req.network.throughput_gbr_mbps = gbr;
    req.network.throughput_mbr_mbps = gbr;
    req.network.packet_error_rate = 1;
    return req;
}

void check_placement(Checker& c) {
    // Cheapest-tier property over randomized fabrics, one free function.
    std::mt19937_64 rng(90210);
    const std::vector<Tier> tiers = {Tier::Device, Tier::Edge, Tier::Cloud};
    int infeasible_seen = 0;
    for (int i = 0; i < 1000; ++i) {
        FabricConfig cfg;
        for (Tier t : tiers)
            cfg.tiers.push_back({t, 1 + std::int64_t(rng() % 4000), 1 << 20,
                                 double(1 + rng() % 5)});
        ResourceRequest req = bare_request("solo", 1 + std::int64_t(rng() % 3000), 0, 0.001);
        req.compute.max_millicpu = req.compute.min_millicpu + std::int64_t(rng() % 1000);
        if (rng() % 5 == 0) {
            req.compute.tier = tiers[rng() % 3];
            req.pinned_tier = req.compute.tier;
        }

        std::optional<Tier> expected;
        double expected_cost = 0;
        for (const TierCapacity& tc : cfg.tiers) {
            if (req.pinned_tier && *req.pinned_tier != tc.id) continue;
            if (tc.total_millicpu < req.compute.min_millicpu) continue;
            if (!expected || tc.cost_per_millicpu_s < expected_cost) {
                expected = tc.id;
                expected_cost = tc.cost_per_millicpu_s;
            }
        }

        Fabric fabric(cfg);
        auto result = allocate({req}, fabric);
        if (!expected) {
            ++infeasible_seen;
            c.expect(std::holds_alternative<FailureReport>(result),
                     "fabric " + std::to_string(i) + ": expected failure");
        } else if (std::holds_alternative<Allocation>(result)) {
            c.expect(std::get<Allocation>(result).functions.at("solo").tier == *expected,
                     "fabric " + std::to_string(i) + ": not the cheapest tier");
        } else {
            c.expect(false, "fabric " + std::to_string(i) + ": unexpected failure");
        }
    }
    c.expect(infeasible_seen > 20, "generator never produced infeasible fabrics");

    // Rollback: a failing allocation must leave no trace.
    {
        Fabric fabric(default_fabric_config());
        fabric.grant_compute(bare_request("early", 500, 500, 0).compute, Tier::Edge,
                             "early");
        std::map<Tier, std::int64_t> cpu_before, mem_before;
        std::map<LinkId, double> headroom_before;
        for (Tier t : fabric.tiers()) {
            cpu_before[t] = fabric.free_millicpu(t);
            mem_before[t] = fabric.free_memory(t);
        }
        for (LinkId l : fabric.links()) headroom_before[l] = fabric.gbr_headroom(l);

        std::vector<ResourceRequest> requests;
        requests.push_back(bare_request("fits", 1000, 1000, 0.001));
        requests.push_back(bare_request("huge", 500000, 500000, 0.001));
        auto result = allocate(requests, fabric);
        c.expect(std::holds_alternative<FailureReport>(result),
                 "oversized request should fail");
        for (Tier t : fabric.tiers()) {
            c.expect(fabric.free_millicpu(t) == cpu_before[t], "cpu ledger moved");
            c.expect(fabric.free_memory(t) == mem_before[t], "memory ledger moved");
        }
        for (LinkId l : fabric.links())
            c.expect(fabric.gbr_headroom(l) == headroom_before[l],
                     "bandwidth ledger moved");
    }

    // The pipeline's placement equals the exhaustive minimum, uniquely.
    {
        ParsedSpec spec = canonical_rtm_spec();
        auto requests = build_requests(spec.app, spec.app_slice);
        Fabric reference(default_fabric_config());
        auto chosen = allocate(requests, reference);
        c.expect(std::holds_alternative<Allocation>(chosen), "pipeline should place");
        if (!std::holds_alternative<Allocation>(chosen)) return;
        const Allocation& picked = std::get<Allocation>(chosen);

        double best_cost = -1;
        int best_count = 0;
        std::map<std::string, Tier> best_assignment;
        for (int code = 0; code < 729; ++code) {
            std::map<std::string, Tier> assignment;
            int rest = code;
            for (const auto& req : requests) {
                assignment[req.function] = tiers[rest % 3];
                rest /= 3;
            }
            Fabric fabric(default_fabric_config());
            double cost = 0;
            bool feasible = true;
            for (const auto& req : requests) {
                Tier t = assignment[req.function];
                if (req.pinned_tier && *req.pinned_tier != t) {
                    feasible = false;
                    break;
                }
                std::vector<std::vector<LinkId>> paths;
                for (const auto& up : req.upstreams) {
                    Tier from = assignment[up];
                    if (from == t) continue;
                    auto path = fabric.find_path(from, t);
                    if (!path) {
                        feasible = false;
                        break;
                    }
                    double latency = 0, success = 1;
                    for (const LinkId& l : *path) {
                        latency += fabric.link(l).base_latency_ms;
                        success *= 1 - fabric.link(l).base_per;
                    }
                    if (latency > req.network.latency_ms ||
                        1 - success > req.network.packet_error_rate) {
                        feasible = false;
                        break;
                    }
                    paths.push_back(*path);
                }
                if (!feasible) break;
                try {
                    ComputeSlice cs = fabric.grant_compute(req.compute, t, req.function);
                    cost += static_cast<double>(cs.granted_millicpu) *
                            fabric.tier(t).cost_per_millicpu_s;
                    for (const auto& path : paths)
                        for (const LinkId& l : path)
                            fabric.grant_network(req.network, l, req.function);
                } catch (const FabricError&) {
                    feasible = false;
                    break;
                }
            }
            if (!feasible) continue;
            if (best_cost < 0 || cost < best_cost) {
                best_cost = cost;
                best_count = 1;
                best_assignment = assignment;
            } else if (cost == best_cost) {
                ++best_count;
            }
        }
        c.expect(best_cost >= 0, "exhaustive search found nothing feasible");
        c.expect(best_count == 1, "minimum-cost assignment is not unique");
        c.expect(best_cost == picked.total_cost_rate,
                 "cost rate differs from the exhaustive minimum");
        for (const auto& [fn, tier] : best_assignment)
            c.expect(picked.functions.at(fn).tier == tier, fn + " placed elsewhere");
    }
}

// ---------------------------------------------------------------- criterion 7

struct ControllerRig {
    std::vector<ResourceRequest> requests;
    Fabric fabric;
    Allocation alloc;
    std::uint64_t net_id = 0;
    std::uint64_t cpu_id = 0;

    ControllerRig(double gbr, double mbr, std::int64_t min_cpu, std::int64_t max_cpu,
                  double link_capacity)
        : fabric(make_config(link_capacity)) {
        ResourceRequest src = bare_request("src", 1, 1, 0.01);
        src.compute.tier = Tier::Device;
        src.pinned_tier = Tier::Device;
        ResourceRequest work = bare_request("work", min_cpu, max_cpu, gbr);
        work.network.throughput_mbr_mbps = mbr;
        work.compute.tier = Tier::Edge;
        work.pinned_tier = Tier::Edge;
        work.upstreams = {"src"};
        requests = {src, work};
        alloc = std::get<Allocation>(allocate(requests, fabric));
        net_id = alloc.functions.at("work").network.at(0).slice_id;
        cpu_id = alloc.functions.at("work").compute->slice_id;
    }

    static FabricConfig make_config(double link_capacity) {
        FabricConfig cfg;
        cfg.tiers.push_back({Tier::Device, 1000, 1 << 20, 1.0});
        cfg.tiers.push_back({Tier::Edge, 24000, 1ll << 33, 2.0});
        cfg.links.push_back({{Tier::Device, Tier::Edge}, link_capacity, 10.0, 1e-3});
        return cfg;
    }

    MetricsSample sample(double t, double delivered, double demand, double used,
                         double backlog = 0) const {
        MetricsSample s;
        s.time_s = t;
        s.per_function["src"] = FunctionMetrics{};
        FunctionMetrics m;
        m.delivered_mbps = delivered;
        m.demand_mbps = demand;
        m.used_millicpu = used;
        m.backlog_frames = backlog;
        s.per_function["work"] = m;
        return s;
    }

    double gbr() const { return fabric.network_slice(net_id)->gbr_mbps; }
    std::int64_t granted() const {
        return fabric.compute_slice(cpu_id)->granted_millicpu;
    }
};

void check_controller(Checker& c) {
    // Grants never leave their declared bounds, however hard they are pushed.
    {
        ControllerRig rig(0.5, 5, 1000, 4000, 50);
        Controller controller(RuntimeConfig{});
        for (int k = 0; k < 12; ++k) {
            controller.tick(rig.sample(2.0 * k, rig.gbr(), 40,
                                       double(rig.granted()), 10.0 * (k + 1)),
                            rig.requests, rig.alloc, rig.fabric);
            c.expect(rig.gbr() >= 0.5 && rig.gbr() <= 5.0, "gbr out of bounds");
            c.expect(rig.granted() >= 1000 && rig.granted() <= 4000,
                     "cpu grant out of bounds");
        }
        c.expect(rig.gbr() == 5.0, "network never reached its cap");
        c.expect(rig.granted() == 4000, "compute never reached its cap");
    }

    // Usage at 0.3x the grant shrinks on the third quiet tick, not before.
    {
        ControllerRig rig(0.5, 5, 1000, 4000, 50);
        Controller controller(RuntimeConfig{});
        c.expect(rig.granted() == 4000, "initial grant should stretch to the max");
        auto a0 = controller.tick(rig.sample(0, 0.4, 0.4, 1200), rig.requests,
                                  rig.alloc, rig.fabric);
        auto a1 = controller.tick(rig.sample(2, 0.4, 0.4, 1200), rig.requests,
                                  rig.alloc, rig.fabric);
        c.expect(a0.empty() && a1.empty(), "shrink fired early");
        auto a2 = controller.tick(rig.sample(4, 0.4, 0.4, 1200), rig.requests,
                                  rig.alloc, rig.fabric);
        bool shrank = a2.size() == 1 && a2[0].resource == Resource::Compute &&
                      a2[0].action == AdjustAction::Shrink && a2[0].to_value == 1200.0;
        c.expect(shrank, "expected a single compute shrink to 1200 on tick 3");
        c.expect(rig.granted() == 1200, "grant did not follow the shrink");
    }

    // Doubling growth reaches the cap in the logarithmic number of steps.
    {
        ControllerRig rig(0.5, 5, 2000, 2000, 50);
        RuntimeConfig cfg;
        cfg.growth_policy = GrowthPolicy::Doubling;
        Controller controller(cfg);
        const int bound = int(std::ceil(std::log2(5.0 / 0.5)));
        int grows = 0;
        for (int k = 0; k < 10 && rig.gbr() < 5.0; ++k) {
            auto adj = controller.tick(rig.sample(2.0 * k, rig.gbr(), 5, 1900),
                                       rig.requests, rig.alloc, rig.fabric);
            for (const Adjustment& a : adj)
                if (a.action == AdjustAction::Grow) ++grows;
        }
        c.expect(rig.gbr() == 5.0, "doubling never reached the cap");
        c.expect(grows <= bound, "doubling used more than ceil(log2) steps");
        c.expect(grows == 4, "0.5 -> 5 should take exactly 4 doublings");
    }

    // Constant demand settles: no adjustments after the tenth tick.
    {
        std::mt19937_64 rng(5150);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (int trial = 0; trial < 60; ++trial) {
            const double gbr = 0.25 + unit(rng) * 2;
            const double mbr = gbr * (1 + unit(rng) * 15);
            const std::int64_t min_cpu = 500 + std::int64_t(rng() % 1500);
            const std::int64_t max_cpu = min_cpu + std::int64_t(rng() % 2000);
            ControllerRig rig(gbr, mbr, min_cpu, max_cpu, mbr + 1);
            RuntimeConfig cfg;
            cfg.growth_policy =
                trial % 2 ? GrowthPolicy::Doubling : GrowthPolicy::ToMbrCap;
            Controller controller(cfg);

            const double net_demand = unit(rng) * mbr;
            const double cpu_demand = unit(rng) * double(max_cpu) * 1.2;
            double backlog = 0;
            int late = 0;
            for (int k = 0; k < 20; ++k) {
                const double delivered = std::min(net_demand, rig.gbr());
                const double f_net = net_demand > 0 ? delivered / net_demand : 0;
                const double f_cpu =
                    cpu_demand > 0 ? std::min(1.0, double(rig.granted()) / cpu_demand)
                                   : 1;
                const double f = std::min(f_net, f_cpu);
                const double used = f > 0 ? std::min(cpu_demand, double(rig.granted()))
                                          : 0.0;
                backlog += std::max(0.0, f_net - f) * 50;
                auto adj = controller.tick(
                    rig.sample(2.0 * k, delivered, net_demand, used, backlog),
                    rig.requests, rig.alloc, rig.fabric);
                if (k >= 10) late += int(adj.size());
            }
            c.expect(late == 0, "trial " + std::to_string(trial) +
                                    " still adjusting after ten ticks");
        }
    }
}

// ---------------------------------------------------------------- criterion 8

void check_fuzz(Checker& c) {
    Fabric fabric(default_fabric_config());

    // Shadow ledger, recomputed the same way the fabric recomputes its own
    // totals: slice map in ascending id order.
    std::map<std::uint64_t, ComputeSlice> live_cpu;
    std::map<std::uint64_t, NetworkSlice> live_net;
    auto shadow_free_cpu = [&](Tier t) {
        std::int64_t sum = 0;
        for (const auto& [id, s] : live_cpu)
            if (s.tier == t) sum += s.granted_millicpu;
        return fabric.tier(t).total_millicpu - sum;
    };
    auto shadow_free_mem = [&](Tier t) {
        std::int64_t sum = 0;
        for (const auto& [id, s] : live_cpu)
            if (s.tier == t) sum += s.granted_memory_bytes;
        return fabric.tier(t).total_memory_bytes - sum;
    };
    auto shadow_headroom = [&](LinkId l) {
        double sum = 0;
        for (const auto& [id, s] : live_net)
            if (s.link == l) sum += s.gbr_mbps;
        return fabric.link(l).capacity_mbps - sum;
    };

    std::mt19937_64 rng(20250823);
    const auto tiers = fabric.tiers();
    const auto links = fabric.links();
    int grants = 0, refusals = 0, releases = 0;
    std::vector<std::uint64_t> ids;

    for (int step = 0; step < 10000; ++step) {
        const int op = int(rng() % 10);
        if (op < 4) {
            Tier t = tiers[rng() % tiers.size()];
            ComputeReq req;
            req.min_millicpu = 1 + std::int64_t(rng() % 4000);
            req.max_millicpu = req.min_millicpu + std::int64_t(rng() % 2000);
            req.min_memory_bytes = 1 + std::int64_t(rng() % (1ll << 30));
            req.max_memory_bytes = req.min_memory_bytes + std::int64_t(rng() % (1ll << 28));
            const std::int64_t cpu_before = shadow_free_cpu(t);
            const std::int64_t mem_before = shadow_free_mem(t);
            const bool fits =
                cpu_before >= req.min_millicpu && mem_before >= req.min_memory_bytes;
            try {
                ComputeSlice s = fabric.grant_compute(req, t, "fuzz");
                c.expect(fits, "grant succeeded but the ledger says no room");
                c.expect(s.granted_millicpu ==
                             std::max(req.min_millicpu,
                                      std::min(req.max_millicpu, cpu_before)),
                         "granted cpu is not clamp(min, max, free)");
                c.expect(s.granted_memory_bytes ==
                             std::max(req.min_memory_bytes,
                                      std::min(req.max_memory_bytes, mem_before)),
                         "granted memory is not clamp(min, max, free)");
                live_cpu[s.slice_id] = s;
                ids.push_back(s.slice_id);
                ++grants;
            } catch (const InsufficientCompute&) {
                c.expect(!fits, "grant refused although the ledger has room");
                ++refusals;
            }
        } else if (op < 7) {
            LinkId l = links[rng() % links.size()];
            NetworkReq req;
            req.latency_ms = 1000;
            req.throughput_gbr_mbps = 0.01 + double(rng() % 300) / 100.0;
            req.throughput_mbr_mbps = req.throughput_gbr_mbps + double(rng() % 100) / 50.0;
            req.packet_error_rate = 1;
            const double before = shadow_headroom(l);
            const bool fits = before >= req.throughput_gbr_mbps;
            try {
                NetworkSlice s = fabric.grant_network(req, l, "fuzz");
                c.expect(fits, "network grant succeeded without headroom");
                c.expect(s.gbr_mbps == req.throughput_gbr_mbps,
                         "reservation differs from the requested guarantee");
                live_net[s.slice_id] = s;
                ids.push_back(s.slice_id);
                ++grants;
            } catch (const InsufficientBandwidth&) {
                c.expect(!fits, "network grant refused despite headroom");
                ++refusals;
            }
        } else if (!ids.empty()) {
            const std::size_t pick = rng() % ids.size();
            const std::uint64_t id = ids[pick];
            fabric.release(id);
            live_cpu.erase(id);
            live_net.erase(id);
            ids.erase(ids.begin() + pick);
            ++releases;
        }

        if (step % 37 == 0 || step > 9900) {
            for (Tier t : tiers) {
                c.expect(fabric.free_millicpu(t) == shadow_free_cpu(t),
                         "cpu ledger drift at step " + std::to_string(step));
                c.expect(fabric.free_memory(t) == shadow_free_mem(t),
                         "memory ledger drift at step " + std::to_string(step));
            }
            for (LinkId l : links)
                c.expect(fabric.gbr_headroom(l) == shadow_headroom(l),
                         "bandwidth ledger drift at step " + std::to_string(step));
            try {
                fabric.check_conservation();
            } catch (const Error& e) {
                c.expect(false, std::string("conservation: ") + e.what());
            }
        }
    }
    c.expect(grants > 1000, "fuzz produced too few grants");
    c.expect(refusals > 100, "fuzz produced too few refusals");
    c.expect(releases > 1000, "fuzz produced too few releases");

    for (std::uint64_t id : ids) fabric.release(id);
    for (Tier t : tiers) {
        c.expect(fabric.free_millicpu(t) == fabric.tier(t).total_millicpu,
                 "cpu did not return to full after releasing everything");
        c.expect(fabric.free_memory(t) == fabric.tier(t).total_memory_bytes,
                 "memory did not return to full after releasing everything");
    }
    for (LinkId l : links)
        c.expect(fabric.gbr_headroom(l) == fabric.link(l).capacity_mbps,
                 "headroom did not return to capacity after releasing everything");

    // Isolation: whatever else happens on the link, a sliced flow gets at
    // least min(demand, guarantee).
    std::mt19937_64 iso(313);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 400; ++trial) {
        const double cap = 1 + unit(iso) * 19;
        FabricConfig cfg;
        cfg.tiers.push_back({Tier::Device, 1000, 1 << 20, 1.0});
        cfg.tiers.push_back({Tier::Edge, 1000, 1 << 20, 2.0});
        cfg.links.push_back({{Tier::Device, Tier::Edge}, cap, 1.0, 1e-3});
        Fabric f(cfg);
        const LinkId l{Tier::Device, Tier::Edge};

        const int n = 1 + int(iso() % 4);
        std::vector<double> gbrs(n);
        double total = 0;
        for (double& g : gbrs) {
            g = unit(iso) * cap / n;
            total += g;
        }
        (void)total;
        std::vector<FlowDemand> flows;
        std::vector<double> guarantees;
        for (double g : gbrs) {
            NetworkReq req;
            req.latency_ms = 1000;
            req.throughput_gbr_mbps = g;
            req.throughput_mbr_mbps = g * (1 + unit(iso) * 3);
            req.packet_error_rate = 1;
            NetworkSlice s = f.grant_network(req, l, "iso");
            flows.push_back({s.slice_id, unit(iso) * req.throughput_mbr_mbps * 1.5});
            guarantees.push_back(g);
        }
        flows.push_back({std::nullopt, unit(iso) * cap});  // best-effort noise
        f.set_external_traffic(l, unit(iso) * cap * 1.5);

        const auto delivered = f.link_delivery(l, flows);
        for (int i = 0; i < n; ++i)
            c.expect(delivered[i] >=
                         std::min(flows[i].demand_mbps, guarantees[i]) - 1e-9,
                     "sliced flow dipped below its guarantee");
    }
}

// ---------------------------------------------------------------- criterion 9

void check_determinism(Checker& c) {
    const auto scenario_dir = std::filesystem::path(SCENARIO_DIR);
    const auto tmp = std::filesystem::temp_directory_path() /
                     ("appslice_accept_" + std::to_string(::getpid()));
    std::filesystem::remove_all(tmp);
    for (const std::string& name : preset_names()) {
        std::ostringstream out, err;
        RunOptions options;
        options.scenario_path = scenario_dir / (name + ".json");
        options.out_dir = tmp / (name + "_a");
        c.expect(cmd_run(options, out, err) == kExitOk, name + ": first run failed");
        options.out_dir = tmp / (name + "_b");
        c.expect(cmd_run(options, out, err) == kExitOk, name + ": second run failed");
        for (const char* file : {"report.json", "metrics.csv", "adjustments.jsonl"})
            c.expect(read_file(tmp / (name + "_a") / file) ==
                         read_file(tmp / (name + "_b") / file),
                     name + ": " + file + " differs between identical runs");
    }
    std::filesystem::remove_all(tmp);
}

}  // namespace

int main() {
    struct Criterion {
        const char* text;
        void (*check)(Checker&);
    };
    const Criterion criteria[] = {
        {"network sweep lands on the measured alert ladder", check_net_sweep},
        {"compute sweep lands on the measured alert ladder", check_cpu_sweep},
        {"joint grid follows the min of the two service curves", check_joint_grid},
        {"slicing rides out contention that sinks best effort", check_contended_pair},
        {"one in-band grow rescues an undersized guarantee", check_adjustment_pair},
        {"placement is the exhaustive cost minimum and rolls back cleanly",
         check_placement},
        {"controller stays bounded, shrinks on schedule and settles",
         check_controller},
        {"ten thousand grant/release events agree with a shadow ledger",
         check_fuzz},
        {"preset runs are byte-for-byte reproducible", check_determinism},
    };

    int failed = 0;
    int index = 0;
    for (const Criterion& criterion : criteria) {
        ++index;
        Checker checker;
        try {
            criterion.check(checker);
        } catch (const std::exception& e) {
            checker.expect(false, std::string("exception: ") + e.what());
        }
        std::printf("[%s] %d. %s%s%s\n", checker.ok ? "PASS" : "FAIL", index,
                    criterion.text, checker.ok ? "" : " :: ",
                    checker.ok ? "" : checker.first.c_str());
        if (!checker.ok) ++failed;
    }
    std::printf("%d/9 criteria passed\n", 9 - failed);
    return failed == 0 ? 0 : 1;
}
