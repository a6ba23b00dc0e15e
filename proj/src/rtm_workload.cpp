#include "appslice/rtm_workload.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

namespace appslice {

std::int64_t FrameTrace::frame_count() const {
    return static_cast<std::int64_t>(std::llround(fps * duration_s));
}

bool FrameTrace::is_registered(const std::string& person_id) const {
    return std::find(registered.begin(), registered.end(), person_id) !=
           registered.end();
}

namespace {

int anchor_lookup(const std::vector<std::pair<double, int>>& anchors, double value,
                  bool clamp_floor, bool* clamped, const char* what) {
    if (clamped) *clamped = false;
    if (anchors.empty())
        throw ProfileDomainError(std::string(what) + ": profile has no anchors");
    if (value <= 0) return 0;
    if (value < anchors.front().first) {
        if (!clamp_floor)
            throw ProfileDomainError(std::string(what) + ": value below smallest anchor");
        if (clamped) *clamped = true;
        return anchors.front().second;
    }
    int alerts = anchors.front().second;
    for (const auto& [key, count] : anchors) {
        if (key <= value) alerts = count;
        else break;
    }
    return alerts;
}

}  // namespace

int CalibrationProfile::net_alerts(double mbps, bool* clamped) const {
    return anchor_lookup(net_anchors_mbps, mbps, clamp_floor, clamped, "network");
}

int CalibrationProfile::cpu_alerts(double cores, bool* clamped) const {
    return anchor_lookup(cpu_anchors_cores, cores, clamp_floor, clamped, "compute");
}

double PipelineModel::full_mbps(const FrameTrace& trace) const {
    return trace.fps * bytes_per_frame * 8.0 / 1e6;
}

double PipelineModel::full_millicpu(const FrameTrace& trace) const {
    return trace.fps * millicpu_per_fps;
}

Demand demand_at(const PipelineModel& pipeline, const FrameTrace& trace,
                 double time_s) {
    if (time_s < 0 || time_s >= trace.duration_s) return {0, 0};
    return {pipeline.full_mbps(trace), pipeline.full_millicpu(trace)};
}

double processed_fraction(double delivered_mbps, double delivered_millicpu,
                          double full_mbps, double full_millicpu) {
    double f = 1.0;
    if (full_mbps > 0) f = std::min(f, delivered_mbps / full_mbps);
    if (full_millicpu > 0) f = std::min(f, delivered_millicpu / full_millicpu);
    return std::max(0.0, f);
}

int interval_alert_ceiling(const CalibrationProfile& profile, double net_mbps,
                           double cpu_millicpu, bool* clamped) {
    bool c1 = false;
    bool c2 = false;
    int net = profile.net_alerts(net_mbps, &c1);
    int cpu = profile.cpu_alerts(cpu_millicpu / 1000.0, &c2);
    if (clamped) *clamped = c1 || c2;
    return std::min(net, cpu);
}

AlertEstimate alerts_for_series(const std::vector<ServicePoint>& series,
                                const CalibrationProfile& profile) {
    AlertEstimate est;
    for (const auto& p : series) {
        if (!p.active) continue;
        bool clamped = false;
        int ceiling = interval_alert_ceiling(profile, p.net_mbps, p.cpu_millicpu,
                                             &clamped);
        est.alerts = std::max(est.alerts, ceiling);
        est.floor_clamped = est.floor_clamped || clamped;
    }
    return est;
}

std::vector<Diagnostic> validate_profile(const CalibrationProfile& profile,
                                         double full_mbps, double full_millicpu,
                                         const std::string& path) {
    std::vector<Diagnostic> diags;
    auto check_axis = [&](const std::vector<std::pair<double, int>>& anchors,
                          const std::string& axis) {
        if (anchors.empty()) {
            diags.push_back({Severity::Error, path + "/" + axis, "needs anchors"});
            return;
        }
        for (std::size_t i = 0; i < anchors.size(); ++i) {
            if (anchors[i].first <= 0 || anchors[i].second < 0)
                diags.push_back({Severity::Error,
                                 path + "/" + axis + "/" + std::to_string(i),
                                 "anchor out of range"});
            if (i > 0) {
                if (anchors[i].first <= anchors[i - 1].first ||
                    anchors[i].second < anchors[i - 1].second)
                    diags.push_back(
                        {Severity::Error,
                         path + "/" + axis + "/" + std::to_string(i),
                         "anchors must rise with service (previous key " +
                             std::to_string(anchors[i - 1].first) + ")"});
            }
        }
    };
    check_axis(profile.net_anchors_mbps, "netAnchorsMbps");
    check_axis(profile.cpu_anchors_cores, "cpuAnchorsCores");
    if (has_errors(diags)) return diags;

    // Both axes express alerts as a function of the processed fraction; where
    // the fractions coincide the counts must agree, and the merged map must
    // be monotone.
    std::map<double, std::pair<int, std::string>> merged;
    auto merge_axis = [&](const std::vector<std::pair<double, int>>& anchors,
                          double full, const std::string& axis) {
        if (full <= 0) return;
        for (std::size_t i = 0; i < anchors.size(); ++i) {
            double fraction = anchors[i].first / full;
            std::string where = path + "/" + axis + "/" + std::to_string(i);
            auto it = merged.find(fraction);
            if (it == merged.end()) {
                merged[fraction] = {anchors[i].second, where};
            } else if (it->second.first != anchors[i].second) {
                diags.push_back({Severity::Error, where,
                                 "conflicts with " + it->second.second +
                                     " at the same processed fraction"});
            }
        }
    };
    merge_axis(profile.net_anchors_mbps, full_mbps, "netAnchorsMbps");
    merge_axis(profile.cpu_anchors_cores, full_millicpu / 1000.0, "cpuAnchorsCores");

    int prev = -1;
    for (const auto& [fraction, entry] : merged) {
        (void)fraction;
        if (entry.first < prev)
            diags.push_back({Severity::Error, entry.second,
                             "merged fraction map must be monotone"});
        prev = std::max(prev, entry.first);
    }
    return diags;
}

std::vector<Diagnostic> validate_trace(const FrameTrace& trace,
                                       const std::string& path) {
    std::vector<Diagnostic> diags;
    if (trace.fps <= 0)
        diags.push_back({Severity::Error, path + "/fps", "must be > 0"});
    if (trace.duration_s <= 0)
        diags.push_back({Severity::Error, path + "/durationS", "must be > 0"});
    std::set<std::string> people;
    for (std::size_t i = 0; i < trace.appearances.size(); ++i) {
        const Appearance& a = trace.appearances[i];
        const std::string apath = path + "/appearances/" + std::to_string(i);
        people.insert(a.person_id);
        if (a.first_frame < 0 || a.last_frame < a.first_frame ||
            (trace.fps > 0 && trace.duration_s > 0 &&
             a.last_frame >= trace.frame_count()))
            diags.push_back({Severity::Error, apath, "frame span outside the trace"});
    }
    std::set<std::string> reg(trace.registered.begin(), trace.registered.end());
    if (reg.size() != trace.registered.size())
        diags.push_back({Severity::Error, path + "/registered", "duplicate entries"});
    for (const auto& r : reg) {
        if (!people.count(r))
            diags.push_back({Severity::Error, path + "/registered",
                             "person " + r + " never appears"});
    }
    if (people.size() != 22)
        diags.push_back({Severity::Error, path + "/appearances",
                         "expected 22 distinct people, found " +
                             std::to_string(people.size())});
    if (reg.size() != 10)
        diags.push_back({Severity::Error, path + "/registered",
                         "expected 10 registered people, found " +
                             std::to_string(reg.size())});
    return diags;
}

std::vector<bool> processed_frames(std::int64_t frame_count, double fraction) {
    std::vector<bool> out(static_cast<std::size_t>(std::max<std::int64_t>(0, frame_count)),
                          false);
    if (fraction <= 0) return out;
    if (fraction >= 1) {
        std::fill(out.begin(), out.end(), true);
        return out;
    }
    // Integer thinning keeps the pattern exact for fractions like 0.6 that
    // have no clean binary representation.
    constexpr std::int64_t scale = 1'000'000'000;
    const std::int64_t p = std::llround(fraction * static_cast<double>(scale));
    for (std::int64_t i = 0; i < frame_count; ++i) {
        std::int64_t before = i * p / scale;
        std::int64_t after = (i + 1) * p / scale;
        if (after > before) out[static_cast<std::size_t>(i)] = true;
    }
    return out;
}

int trace_alert_count(const FrameTrace& trace, double fraction) {
    const std::vector<bool> processed = processed_frames(trace.frame_count(), fraction);
    // Prefix sums make interval hit tests O(1).
    std::vector<std::int64_t> prefix(processed.size() + 1, 0);
    for (std::size_t i = 0; i < processed.size(); ++i)
        prefix[i + 1] = prefix[i] + (processed[i] ? 1 : 0);

    std::set<std::string> alerted;
    for (const auto& a : trace.appearances) {
        if (!trace.is_registered(a.person_id)) continue;
        std::int64_t lo = std::max<std::int64_t>(0, a.first_frame);
        std::int64_t hi = std::min<std::int64_t>(
            static_cast<std::int64_t>(processed.size()) - 1, a.last_frame);
        if (lo > hi) continue;
        if (prefix[hi + 1] - prefix[lo] > 0) alerted.insert(a.person_id);
    }
    return static_cast<int>(alerted.size());
}

FrameTrace canonical_frame_trace() {
    FrameTrace trace;
    trace.fps = 25;
    trace.duration_s = 60;
    trace.registered = {"p01", "p02", "p03", "p04", "p05",
                        "p06", "p07", "p08", "p09", "p10"};
    // Registered visitors, staged so sparser sampling loses the brief ones
    // first: a long dwell, three medium passes, one short pass, three brief
    // ones and two single-frame glimpses.
    trace.appearances = {
        {"p01", 40, 79},    {"p02", 100, 114}, {"p03", 200, 214},
        {"p04", 300, 314},  {"p05", 400, 407}, {"p06", 500, 502},
        {"p07", 600, 602},  {"p08", 700, 702}, {"p09", 804, 804},
        {"p10", 900, 900},
    };
    // Twelve unknown passers-by.
    for (int i = 0; i < 12; ++i) {
        char id[8];
        std::snprintf(id, sizeof id, "u%02d", 11 + i);
        std::int64_t start = 950 + 40 * i;
        trace.appearances.push_back({id, start, start + 24});
    }
    return trace;
}

CalibrationProfile canonical_profile() {
    CalibrationProfile p;
    p.net_anchors_mbps = {{0.25, 1}, {0.5, 4}, {3.0, 9}, {5.0, 10}};
    p.cpu_anchors_cores = {{0.1, 1}, {0.5, 5}, {1.0, 8}, {2.0, 10}};
    p.clamp_floor = true;
    return p;
}

PipelineModel canonical_pipeline() {
    PipelineModel p;
    p.target_function = "faceDetection";
    p.bytes_per_frame = 25000;  // 25 fps * 25000 B * 8 = 5 Mbps
    p.millicpu_per_fps = 80;    // 25 fps * 80 = 2000 millicpu
    return p;
}

}  // namespace appslice
