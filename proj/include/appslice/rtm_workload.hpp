#ifndef APPSLICE_RTM_WORKLOAD_HPP
#define APPSLICE_RTM_WORKLOAD_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "appslice/spec_model.hpp"

namespace appslice {

/// One person's contiguous presence in the camera feed, in frame indices.
struct Appearance {
    std::string person_id;
    std::int64_t first_frame = 0;
    std::int64_t last_frame = 0;

    bool operator==(const Appearance&) const = default;
};

struct FrameTrace {
    double fps = 0;
    double duration_s = 0;
    std::vector<Appearance> appearances;
    std::vector<std::string> registered;

    std::int64_t frame_count() const;
    bool is_registered(const std::string& person_id) const;

    bool operator==(const FrameTrace&) const = default;
};

/// Alert counts measured at a handful of service levels. Lookups use the
/// largest anchor at or below the value (a step floor). Below the smallest
/// anchor the count clamps to the lowest measured value when `clamp_floor`
/// is set, otherwise the lookup throws ProfileDomainError. A value of zero
/// service always yields zero alerts.
struct CalibrationProfile {
    std::vector<std::pair<double, int>> net_anchors_mbps;   // ascending keys
    std::vector<std::pair<double, int>> cpu_anchors_cores;  // ascending keys
    bool clamp_floor = true;

    int net_alerts(double mbps, bool* clamped = nullptr) const;
    int cpu_alerts(double cores, bool* clamped = nullptr) const;

    bool operator==(const CalibrationProfile&) const = default;
};

/// Couples the stream to the fabric: the target function receives the whole
/// video flow over its inbound path and burns cpu per processed frame.
/// Every other function is a fixed, non-bottleneck cost.
struct PipelineModel {
    std::string target_function;
    double bytes_per_frame = 0;
    double millicpu_per_fps = 0;

    double full_mbps(const FrameTrace& trace) const;
    double full_millicpu(const FrameTrace& trace) const;

    bool operator==(const PipelineModel&) const = default;
};

struct Demand {
    double mbps = 0;
    double millicpu = 0;
};

/// Offered load at `time_s`: the full stream while the trace runs, nothing
/// after it ends.
Demand demand_at(const PipelineModel& pipeline, const FrameTrace& trace,
                 double time_s);

/// Fraction of frames the pipeline keeps up with given the service levels,
/// relative to the full-rate stream.
double processed_fraction(double delivered_mbps, double delivered_millicpu,
                          double full_mbps, double full_millicpu);

struct ServicePoint {
    double net_mbps = 0;
    double cpu_millicpu = 0;
    bool active = true;
};

struct AlertEstimate {
    int alerts = 0;
    bool floor_clamped = false;
};

/// Alert ceiling for one steady interval: the weaker of what the network and
/// the compute service would each let through.
int interval_alert_ceiling(const CalibrationProfile& profile, double net_mbps,
                           double cpu_millicpu, bool* clamped = nullptr);

/// Distinct-person alerts over a run: the best steady interval wins, since
/// alerts accumulate across the run.
AlertEstimate alerts_for_series(const std::vector<ServicePoint>& series,
                                const CalibrationProfile& profile);

/// Merged fraction -> alerts map consistency plus anchor monotonicity.
std::vector<Diagnostic> validate_profile(const CalibrationProfile& profile,
                                         double full_mbps, double full_millicpu,
                                         const std::string& path);

std::vector<Diagnostic> validate_trace(const FrameTrace& trace,
                                       const std::string& path);

// Frame-level counting path, independent of the anchor tables. Thinning
// keeps frame i when floor((i+1)*f) > floor(i*f), evaluated in integers.
std::vector<bool> processed_frames(std::int64_t frame_count, double fraction);
int trace_alert_count(const FrameTrace& trace, double fraction);

FrameTrace canonical_frame_trace();
CalibrationProfile canonical_profile();
PipelineModel canonical_pipeline();

}  // namespace appslice

#endif  // APPSLICE_RTM_WORKLOAD_HPP
