#pragma once

#include <cstdint>
#include <vector>

#include "roam/geometry.hpp"
#include "roam/landmarks.hpp"

namespace roam {

enum class WarpMode { rigid_ransac, node_projection, none };

/// z -> s R(theta) z + t
struct SimilarityTransform {
    double scale = 1.0;
    double rotation = 0.0;
    Vec2 translation;

    Vec2 apply(Vec2 p) const;
    SimilarityTransform inverse() const;
};

struct RansacResult {
    SimilarityTransform transform;
    std::vector<bool> inliers;
};

/// Closed-form least-squares similarity (complex Umeyama). Throws InputError if fewer than 2
/// points or all source points coincide.
SimilarityTransform fit_similarity(const std::vector<Vec2>& src, const std::vector<Vec2>& dst);

RansacResult estimate_similarity_ransac(const std::vector<Vec2>& prev_pts, const std::vector<Vec2>& curr_pts,
                                        std::uint64_t seed, double inlier_tol = 3.0, int max_trials = 200);

/// Maps, rounds and clamps every vertex. Throws GeometryError if the result is not a valid curve.
RotoCurve warp_curve(const RotoCurve& curve, const SimilarityTransform& t, int width, int height);

/// Moves each vertex by the mean displacement (position - prev_position) of the landmarks paired
/// with it, or by the mean over all usable landmarks when it has none. Lost landmarks are ignored.
/// Returns the input unchanged when no landmark is usable.
RotoCurve warp_by_node_projection(const RotoCurve& curve, const LandmarkPool& pool, int width, int height);

}  // namespace roam
