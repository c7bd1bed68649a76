#pragma once

#include "roam/appearance.hpp"
#include "roam/types.hpp"

namespace roam::kernels {

struct Roi {
    int x0 = 0, y0 = 0, width = 0, height = 0;
};

/// out(x - roi.x0, y - roi.y0) = -ln p(I(x, y)) over the ROI. `out` is resized to the ROI.
void neg_log_plane_serial(const Plane<Color>& rgb, const GmmEvaluator& model, Roi roi, Plane<double>& out);
void neg_log_plane_omp(const Plane<Color>& rgb, const GmmEvaluator& model, Roi roi, Plane<double>& out);

/// out(x, y) = ln p_bg - ln p_fg for rows [y0, y1); `out` must have the frame size.
void log_ratio_rows(const Plane<Color>& rgb, const GmmEvaluator& fg, const GmmEvaluator& bg, int y0, int y1,
                    Plane<double>& out);
void log_ratio_plane_serial(const Plane<Color>& rgb, const GmmEvaluator& fg, const GmmEvaluator& bg,
                            Plane<double>& out);
void log_ratio_plane_omp(const Plane<Color>& rgb, const GmmEvaluator& fg, const GmmEvaluator& bg,
                         Plane<double>& out);

}  // namespace roam::kernels
