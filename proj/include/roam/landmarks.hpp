#pragma once

#include <cstdint>
#include <vector>

#include "roam/geometry.hpp"
#include "roam/imagery.hpp"

namespace roam {

enum class Detector { mser, harris };

struct LandmarkParams {
    int patch = 31;              // F, odd
    double reg = 1e-2;
    double sigma_resp = 2.0;
    double psr_threshold = 4.0;
    int capacity = 16;           // M_max
    int min_separation = 15;
    int search_side = 61;        // S_side, odd
    int k_pair = 2;
    double gain = 20.0;          // phi = -gain * response
    Detector detector = Detector::mser;
    int mser_delta = 5;
    int mser_min_area = 16;
    double mser_max_area_fraction = 0.3;
    double mser_max_variation = 0.5;
};

/// Linear correlation filter in the spatial domain. score(y) = sum_u kernel(u) * z_y(u) where z_y
/// is the zero-mean unit-std F x F gray patch centered at y.
struct CorrelationFilter {
    int size = 0;
    Plane<double> h;       // circular correlation filter, zero shift at index 0
    Plane<double> kernel;  // h shifted to the patch center, times the cosine window
    double kernel_sum = 0.0;
    friend bool operator==(const CorrelationFilter&, const CorrelationFilter&) = default;
};

struct Pairing {
    int vertex = 0;
    Point mu;  // x_n - y_m at pairing time
    friend bool operator==(const Pairing&, const Pairing&) = default;
};

struct Landmark {
    int id = 0;
    Point position;
    Point prev_position;
    CorrelationFilter filter;
    std::vector<Pairing> pairings;
    double psr = 0.0;
    bool lost = false;
    friend bool operator==(const Landmark&, const Landmark&) = default;
};

/// Star model: root y_0 = prev_root + root_shift, with prev_root the centroid of the previous
/// positions.
struct LandmarkPool {
    std::vector<Landmark> landmarks;
    Vec2 prev_root;
    Point root_shift;
    int next_id = 0;

    Vec2 root() const { return {prev_root.x + root_shift.x, prev_root.y + root_shift.y}; }
    friend bool operator==(const LandmarkPool&, const LandmarkPool&) = default;
};

/// phi over positions origin + (i, j), i < phi.width(), j < phi.height(). The window is clipped
/// to the image, so every stored value is finite.
struct CostMap {
    Point origin;
    Plane<double> phi;
    double psr = 0.0;
    Point peak;

    bool contains(Point y) const { return phi.contains(y.x - origin.x, y.y - origin.y); }
    double at(Point y) const { return phi(y.x - origin.x, y.y - origin.y); }
};

Vec2 centroid(const std::vector<Landmark>& landmarks);

/// Zero-mean, unit-std gray patch of side F centered at `center`. Constant patches become zero.
Plane<double> normalized_patch(const Frame& frame, Point center, int F);
bool patch_in_bounds(int width, int height, Point center, int F);

/// Throws GeometryError when the patch is not inside the frame.
CorrelationFilter train_filter(const Frame& frame, Point center, int F, double reg, double sigma_resp);
/// Circular correlation of the windowed, normalized patch; index (F/2, F/2) is zero displacement.
Plane<double> circular_response(const CorrelationFilter& filter, const Plane<double>& normalized);
/// Sliding linear score over positions origin + (i, j) (borders replicated for patch pixels).
Plane<double> sliding_response(const CorrelationFilter& filter, const Frame& frame, Point origin, int cols,
                               int rows);

/// (peak - mean) / std of the response outside an 11 x 11 block around the peak.
double peak_to_sidelobe(const Plane<double>& response, Point peak);

CostMap match_cost_map(const CorrelationFilter& filter, const Frame& frame, Point search_center, int search_side,
                       double gain);

std::vector<Point> detect_candidates(const Frame& frame, const RegionMask& mask, int count,
                                     const LandmarkParams& params, const std::vector<Point>& avoid = {});

struct ExtremalRegion {
    Vec2 centroid;
    int area = 0;
    double variation = 0.0;
    bool bright = false;
};
/// Stable extremal regions of the gray image restricted to the mask, both polarities.
std::vector<ExtremalRegion> detect_mser(const Frame& frame, const RegionMask& mask, const LandmarkParams& params);

/// Pairs a landmark with its k nearest vertices, recording mu = x_n - y_m.
void pair_landmark(Landmark& landmark, const RotoCurve& curve, int k);

/// Drops lost or out-of-region landmarks and detects new ones up to capacity. Positions become the
/// new previous positions; prev_root is recentered and root_shift cleared.
LandmarkPool cull_and_repopulate(const LandmarkPool& pool, const Frame& frame, const RegionMask& mask,
                                 const RotoCurve& curve, const LandmarkParams& params);

}  // namespace roam
