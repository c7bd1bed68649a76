#include "roam/region_integral.hpp"

#include <algorithm>

#include "roam/kernels/likelihood.hpp"

namespace roam {

Plane<double> log_ratio_plane(const Frame& frame, const FgBgModel& model)
{
    const GmmEvaluator fg(model.fg), bg(model.bg);
    Plane<double> out(frame.width(), frame.height());
    kernels::log_ratio_plane_omp(frame.rgb(), fg, bg, out);
    return out;
}

GreenField green_field_from_ratio(const Plane<double>& ratio) { return GreenField{RowPrefixPlane(ratio)}; }

GreenField build_green_field(const Frame& frame, const FgBgModel& model)
{
    return green_field_from_ratio(log_ratio_plane(frame, model));
}

double global_edge_cost(const GreenField& field, Point a, Point b)
{
    if (a.y == b.y)
        return 0.0;
    const int y0 = std::min(a.y, b.y);
    const int y1 = std::max(a.y, b.y);
    if (y0 < 0 || y1 > field.height())
        throw GeometryError("edge outside the green field");
    const double sign = b.y > a.y ? 1.0 : -1.0;
    double acc = 0.0;
    for (int row = y0; row < y1; ++row) {
        const int k = scanline_crossing_column(a, b, row);
        if (k - 1 >= field.width())
            throw GeometryError("edge outside the green field");
        acc += field.q.at_or_zero(k - 1, row);
    }
    return sign * acc;
}

double global_edge_cost(const GreenField& field, const RotoCurve& curve, std::size_t n)
{
    const auto [a, b] = curve.edge(n);
    return global_edge_cost(field, a, b);
}

}  // namespace roam
