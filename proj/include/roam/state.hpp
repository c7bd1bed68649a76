#pragma once

#include <cstdint>
#include <vector>

#include "roam/appearance.hpp"
#include "roam/geometry.hpp"
#include "roam/imagery.hpp"
#include "roam/landmarks.hpp"

namespace roam {

struct Weights {
    double mu = 0.05;       // stretch
    double lambda = 1.0;    // gradient
    double w_loc = 1.0;
    double w_glob = 1.0;
    double w_land = 1.0;
    double w_joint = 1.0;
    int support_w = 10;     // half-width of the edge support rectangles
    bool pure_l2 = false;   // stretch = mu * L^2 instead of chain length * mu * L^2

    bool landmarks_active() const { return w_land > 0.0 || w_joint > 0.0; }
    friend bool operator==(const Weights&, const Weights&) = default;
};

struct StateFlags {
    bool lost = false;            // curve could not be kept valid
    bool no_landmarks = false;    // landmark pool empty
    bool dp_fallback = false;     // every DP branch was rejected, previous curve kept
    bool warp_failed = false;
    friend bool operator==(const StateFlags&, const StateFlags&) = default;
};

struct TrackerState {
    RotoCurve curve;
    RotoCurve prev_curve;
    LandmarkPool pool;
    FgBgModel global_model;
    std::vector<FgBgModel> local_models;  // one per edge
    Weights weights;
    int frame_index = 0;
    StateFlags flags;

    friend bool operator==(const TrackerState&, const TrackerState&) = default;
};

struct ModelParams {
    int k_global = 5;
    int k_local = 3;
    std::size_t max_global_samples = 4000;  // per side, for fitting and adaptation
    double alpha = 0.1;                     // per-frame adaptation rate
    bool adapt_local = true;
    bool spare_slot = true;
    std::uint64_t seed = 1;
};

/// Colors of mask (inside = true) or complement pixels, subsampled with a fixed stride to at most
/// max_samples.
std::vector<Color> mask_samples(const Frame& frame, const RegionMask& mask, bool inside, std::size_t max_samples);

FgBgModel fit_global_model(const Frame& frame, const RegionMask& mask, const ModelParams& params);

/// Fits on the edge support split by the mask; a side with no pixels takes the fallback side.
FgBgModel fit_local_model(const Frame& frame, const RotoCurve& curve, std::size_t n, const RegionMask& mask,
                          int support_w, const ModelParams& params, const FgBgModel& fallback);
std::vector<FgBgModel> fit_local_models(const Frame& frame, const RotoCurve& curve, const RegionMask& mask,
                                        int support_w, const ModelParams& params, const FgBgModel& fallback);

/// Stauffer-Grimson adaptation of the global and local models on the newly delineated regions.
void adapt_models(TrackerState& state, const Frame& frame, const RegionMask& mask, const ModelParams& params);

/// For every edge of new_curve, the index of the old edge with the nearest midpoint.
std::vector<std::size_t> nearest_old_edges(const RotoCurve& old_curve, const RotoCurve& new_curve);

/// Moves every pairing to the new vertex nearest its old vertex, shifting mu by the vertex motion.
void remap_pairings(LandmarkPool& pool, const RotoCurve& old_curve, const RotoCurve& new_curve);

/// Installs a reparametrized curve: local models follow nearest_old_edges, pairings are remapped.
void replace_curve(TrackerState& state, RotoCurve new_curve);

/// max / min edge length.
double edge_length_ratio(const RotoCurve& curve);
double mean_edge_length(const RotoCurve& curve);

}  // namespace roam
