#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "roam/inference.hpp"
#include "roam/landmarks.hpp"
#include "roam/state.hpp"
#include "roam/topology.hpp"
#include "roam/warp.hpp"

namespace roam {

enum class Preset { baseline, lean, medium, full };

struct RunConfig {
    Preset preset = Preset::full;
    Weights weights;
    ModelParams models;
    LandmarkParams landmarks;
    TopologyParams topology;
    WarpMode warp = WarpMode::rigid_ransac;
    bool topology_enabled = true;
    int move_radius = 2;            // r; the move window is (2r+1)^2
    int max_iters = 10;
    double rel_tol = 1e-3;          // alternation stops when the gain drops below rel_tol * |E0|
    double resample_ratio = 4.0;    // max/min edge length that triggers resampling
    double vertex_spacing = 10.0;   // resampling target
    bool adapt_before_cull = true;
    double ransac_tol = 3.0;
    int ransac_trials = 200;
    std::uint64_t seed = 1;
    Exec exec = Exec::parallel;
};

RunConfig preset_config(Preset preset);
/// Names of the terms and stages a configuration turns on.
std::set<std::string> enabled_terms(const RunConfig& cfg);
const char* preset_name(Preset p);
Preset parse_preset(const std::string& name);
const char* warp_name(WarpMode m);
WarpMode parse_warp(const std::string& name);

struct Metrics {
    double accuracy = 0.0;
    double iou = 0.0;
};
/// iou is 1 when both masks are empty. Throws InputError on a size mismatch.
Metrics compute_metrics(const RegionMask& pred, const RegionMask& gt);

struct FrameResult {
    int frame_index = 0;
    RotoCurve curve;
    RegionMask mask;
    EnergyBreakdown energy;
    std::optional<double> iou;
    std::optional<double> accuracy;
    double ms = 0.0;
    int iterations = 0;
    bool converged = true;
    std::vector<double> trace;  // alternation energy trace
    StateFlags flags;
    bool topology_accepted = false;
    bool resampled = false;
};

/// Fits every model on the keyframe and detects the landmark pool. Throws GeometryError for an
/// invalid curve and InputError when the region is too small to fit models.
TrackerState init_from_keyframe(const Frame& frame, const RotoCurve& curve, const RunConfig& cfg,
                                int frame_index = 0);

/// Result describing the keyframe itself.
FrameResult keyframe_result(const TrackerState& state, const Frame& frame, const RunConfig& cfg);

/// Tracks state into `frame` (frame_index + 1).
FrameResult step(TrackerState& state, const Frame& frame, const RunConfig& cfg);

struct TrackOptions {
    int start_frame = 0;
    const std::vector<RegionMask>* ground_truth = nullptr;  // indexed like frames; empty masks are skipped
    std::function<void(const FrameResult&, const TrackerState&)> on_frame;
    const std::atomic<bool>* cancel = nullptr;
};

/// Initializes on frames[start_frame] and steps through the rest. Throws InputError for fewer
/// than two frames.
std::vector<FrameResult> track_sequence(const std::vector<Frame>& frames, const RotoCurve& init_curve,
                                        const RunConfig& cfg, const TrackOptions& opts = {});

}  // namespace roam
