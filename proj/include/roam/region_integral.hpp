#pragma once

#include "roam/appearance.hpp"
#include "roam/geometry.hpp"
#include "roam/imagery.hpp"

namespace roam {

/// Row prefix of the per-pixel global log ratio ln(p0_bg / p0_fg).
struct GreenField {
    RowPrefixPlane q;

    int width() const { return q.width(); }
    int height() const { return q.height(); }
};

/// Per-pixel ln p_bg(I_p) - ln p_fg(I_p).
Plane<double> log_ratio_plane(const Frame& frame, const FgBgModel& model);

GreenField build_green_field(const Frame& frame, const FgBgModel& model);
GreenField green_field_from_ratio(const Plane<double>& ratio);

/// Signed sum of Q over the scanline crossings of segment a-b: +Q(k-1, j) for every row j
/// crossed downward, -Q(k-1, j) upward, with k the crossing column and Q(-1, j) = 0.
/// Summed over a clockwise simple curve this equals the region sum of the ratio exactly.
double global_edge_cost(const GreenField& field, Point a, Point b);
double global_edge_cost(const GreenField& field, const RotoCurve& curve, std::size_t n);

}  // namespace roam
