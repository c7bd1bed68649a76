#include "roam/kernels/likelihood.hpp"

namespace roam::kernels {

void neg_log_plane_serial(const Plane<Color>& rgb, const GmmEvaluator& model, Roi roi, Plane<double>& out)
{
    if (out.width() != roi.width || out.height() != roi.height)
        out = Plane<double>(roi.width, roi.height);
    for (int y = 0; y < roi.height; ++y) {
        const Color* in = rgb.row(roi.y0 + y) + roi.x0;
        double* o = out.row(y);
        for (int x = 0; x < roi.width; ++x)
            o[x] = -model.log_density(in[x]);
    }
}

void neg_log_plane_omp(const Plane<Color>& rgb, const GmmEvaluator& model, Roi roi, Plane<double>& out)
{
    if (out.width() != roi.width || out.height() != roi.height)
        out = Plane<double>(roi.width, roi.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < roi.height; ++y) {
        const Color* in = rgb.row(roi.y0 + y) + roi.x0;
        double* o = out.row(y);
        for (int x = 0; x < roi.width; ++x)
            o[x] = -model.log_density(in[x]);
    }
}

void log_ratio_rows(const Plane<Color>& rgb, const GmmEvaluator& fg, const GmmEvaluator& bg, int y0, int y1,
                    Plane<double>& out)
{
    for (int y = y0; y < y1; ++y) {
        const Color* in = rgb.row(y);
        double* o = out.row(y);
        for (int x = 0; x < rgb.width(); ++x)
            o[x] = bg.log_density(in[x]) - fg.log_density(in[x]);
    }
}

void log_ratio_plane_serial(const Plane<Color>& rgb, const GmmEvaluator& fg, const GmmEvaluator& bg,
                            Plane<double>& out)
{
    if (out.width() != rgb.width() || out.height() != rgb.height())
        out = Plane<double>(rgb.width(), rgb.height());
    log_ratio_rows(rgb, fg, bg, 0, rgb.height(), out);
}

void log_ratio_plane_omp(const Plane<Color>& rgb, const GmmEvaluator& fg, const GmmEvaluator& bg,
                         Plane<double>& out)
{
    if (out.width() != rgb.width() || out.height() != rgb.height())
        out = Plane<double>(rgb.width(), rgb.height());
    const int h = rgb.height();
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y)
        log_ratio_rows(rgb, fg, bg, y, y + 1, out);
}

}  // namespace roam::kernels
