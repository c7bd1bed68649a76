#include "roam/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

namespace roam {

namespace {

long long floor_div(long long a, long long b)
{
    // b > 0
    return a >= 0 ? a / b : -((-a + b - 1) / b);
}

long long orient(Point a, Point b, Point c)
{
    return static_cast<long long>(b.x - a.x) * (c.y - a.y) - static_cast<long long>(b.y - a.y) * (c.x - a.x);
}

int sign(long long v) { return (v > 0) - (v < 0); }

bool on_segment(Point a, Point b, Point p)
{
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
           p.y <= std::max(a.y, b.y);
}

RegionMask fill_rows(const RotoCurve& curve, int width, int height)
{
    RegionMask mask(width, height, 0);
    std::vector<std::vector<int>> crossings(static_cast<std::size_t>(std::max(height, 0)));
    const std::size_t N = curve.size();
    for (std::size_t n = 0; n < N; ++n) {
        const auto [a, b] = curve.edge(n);
        if (a.y == b.y)
            continue;
        const int y0 = std::max(std::min(a.y, b.y), 0);
        const int y1 = std::min(std::max(a.y, b.y), height);
        for (int row = y0; row < y1; ++row)
            crossings[static_cast<std::size_t>(row)].push_back(scanline_crossing_column(a, b, row));
    }
    for (int row = 0; row < height; ++row) {
        auto& ks = crossings[static_cast<std::size_t>(row)];
        std::sort(ks.begin(), ks.end());
        std::uint8_t* out = mask.row(row);
        for (std::size_t i = 0; i + 1 < ks.size(); i += 2) {
            const int lo = std::max(ks[i], 0);
            const int hi = std::min(ks[i + 1], width);
            for (int x = lo; x < hi; ++x)
                out[x] = 1;
        }
    }
    return mask;
}

}  // namespace

std::size_t mask_area(const RegionMask& mask)
{
    return static_cast<std::size_t>(std::count_if(mask.data().begin(), mask.data().end(), [](auto v) { return v != 0; }));
}

long long signed_area2(const RotoCurve& curve)
{
    long long acc = 0;
    for (std::size_t n = 0; n < curve.size(); ++n) {
        const auto [a, b] = curve.edge(n);
        acc += static_cast<long long>(a.x) * b.y - static_cast<long long>(b.x) * a.y;
    }
    return acc;
}

bool is_clockwise(const RotoCurve& curve) { return signed_area2(curve) > 0; }

RotoCurve make_clockwise(RotoCurve curve)
{
    if (signed_area2(curve) < 0) {
        auto& v = curve.vertices();
        std::reverse(v.begin() + 1, v.end());
    }
    return curve;
}

double perimeter(const RotoCurve& curve)
{
    double p = 0.0;
    for (std::size_t n = 0; n < curve.size(); ++n) {
        const auto [a, b] = curve.edge(n);
        p += std::sqrt(static_cast<double>(squared_norm(b - a)));
    }
    return p;
}

bool segments_intersect(Point a, Point b, Point c, Point d)
{
    const int o1 = sign(orient(a, b, c));
    const int o2 = sign(orient(a, b, d));
    const int o3 = sign(orient(c, d, a));
    const int o4 = sign(orient(c, d, b));
    if (o1 != o2 && o3 != o4)
        return true;
    if (o1 == 0 && on_segment(a, b, c))
        return true;
    if (o2 == 0 && on_segment(a, b, d))
        return true;
    if (o3 == 0 && on_segment(c, d, a))
        return true;
    if (o4 == 0 && on_segment(c, d, b))
        return true;
    return false;
}

bool is_simple(const RotoCurve& curve)
{
    const std::size_t N = curve.size();
    if (N < 3)
        return false;
    for (std::size_t n = 0; n < N; ++n) {
        const auto [a, b] = curve.edge(n);
        if (a == b)
            return false;
    }
    if (signed_area2(curve) == 0)
        return false;
    for (std::size_t i = 0; i < N; ++i) {
        const auto [a, b] = curve.edge(i);
        for (std::size_t j = i + 1; j < N; ++j) {
            const auto [c, d] = curve.edge(j);
            const bool next = (j == i + 1);
            const bool wrap = (i == 0 && j == N - 1);
            if (next || wrap) {
                // Shared vertex v; reject folding back along the same line.
                const Point v = next ? b : a;
                const Point p = next ? a : b;
                const Point q = next ? d : c;
                if (N == 3)
                    continue;
                if (orient(p, v, q) == 0) {
                    const long long dot = static_cast<long long>(p.x - v.x) * (q.x - v.x) +
                                          static_cast<long long>(p.y - v.y) * (q.y - v.y);
                    if (dot > 0)
                        return false;
                }
                continue;
            }
            if (segments_intersect(a, b, c, d))
                return false;
        }
    }
    return true;
}

bool in_bounds(const RotoCurve& curve, int width, int height)
{
    return std::all_of(curve.vertices().begin(), curve.vertices().end(),
                       [&](const Point& p) { return p.x >= 0 && p.y >= 0 && p.x < width && p.y < height; });
}

void validate_curve(const RotoCurve& curve, int width, int height)
{
    if (curve.size() < 3)
        throw GeometryError("curve needs at least 3 vertices");
    if (!in_bounds(curve, width, height))
        throw GeometryError("curve vertex outside image bounds");
    if (signed_area2(curve) == 0)
        throw GeometryError("degenerate curve (zero area)");
    if (!is_simple(curve))
        throw GeometryError("self-intersecting curve");
}

int scanline_crossing_column(Point a, Point b, int row)
{
    long long dx = b.x - a.x;
    long long dy = b.y - a.y;
    // x_c + 1/2 = ((2 a.x + 1) dy + (2 row + 1 - 2 a.y) dx) / (2 dy)
    long long num = (2LL * a.x + 1) * dy + (2LL * row + 1 - 2LL * a.y) * dx;
    long long den = 2 * dy;
    if (den < 0) {
        num = -num;
        den = -den;
    }
    return static_cast<int>(floor_div(num, den));
}

RegionMask rasterize_region(const RotoCurve& curve, int width, int height)
{
    if (curve.size() < 3 || signed_area2(curve) == 0)
        throw GeometryError("degenerate curve (zero area)");
    if (!is_simple(curve))
        throw GeometryError("self-intersecting curve");
    return fill_rows(curve, width, height);
}

RegionMask rasterize_unchecked(const RotoCurve& curve, int width, int height)
{
    return fill_rows(curve, width, height);
}

std::vector<Point> edge_pixel_chain(Point a, Point b)
{
    if (a == b)
        throw GeometryError("edge with identical endpoints");
    std::vector<Point> out;
    const int dx = std::abs(b.x - a.x);
    const int dy = -std::abs(b.y - a.y);
    const int sx = a.x < b.x ? 1 : -1;
    const int sy = a.y < b.y ? 1 : -1;
    int err = dx + dy;
    Point p = a;
    out.reserve(static_cast<std::size_t>(std::max(dx, -dy)));
    while (p != b) {
        out.push_back(p);
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            p.x += sx;
        }
        if (e2 <= dx) {
            err += dx;
            p.y += sy;
        }
    }
    return out;
}

namespace {

struct SupportGeometry {
    long long Dx, Dy;      // 2 (b - a)
    long long len_sq4;     // |D|^2 = 4 L^2
    long long cross_lim;   // 16 w^2 L^2, compared with cross^2
    double cross_bound;    // sqrt(cross_lim)
    Point a;

    SupportGeometry(Point a_, Point b, int w) : a(a_)
    {
        Dx = 2LL * (b.x - a.x);
        Dy = 2LL * (b.y - a.y);
        len_sq4 = Dx * Dx + Dy * Dy;
        cross_lim = static_cast<long long>(w) * w * 4 * len_sq4;
        cross_bound = std::sqrt(static_cast<double>(cross_lim));
    }

    long long dot(int x, int y) const { return Dx * (2LL * x + 1 - 2LL * a.x) + Dy * (2LL * y + 1 - 2LL * a.y); }
    long long cross(int x, int y) const { return Dx * (2LL * y + 1 - 2LL * a.y) - Dy * (2LL * x + 1 - 2LL * a.x); }

    SupportSide side(int x, int y) const
    {
        const long long d = dot(x, y);
        if (d < 0 || d > len_sq4)
            return SupportSide::none;
        const long long c = cross(x, y);
        if (c * c > cross_lim)
            return SupportSide::none;
        if (c > 0 || (c == 0 && Dy > 0))
            return SupportSide::inside;
        return SupportSide::outside;
    }
};

// Real-valued x interval where lo_val <= slope * x + offset <= hi_val.
void clip_linear(double slope, double offset, double lo_val, double hi_val, double& lo, double& hi)
{
    if (slope == 0.0) {
        if (offset < lo_val - 1e-9 || offset > hi_val + 1e-9) {
            lo = 1.0;
            hi = 0.0;
        }
        return;
    }
    double x0 = (lo_val - offset) / slope;
    double x1 = (hi_val - offset) / slope;
    if (x0 > x1)
        std::swap(x0, x1);
    lo = std::max(lo, x0);
    hi = std::min(hi, x1);
}

}  // namespace

SupportSide support_side(Point a, Point b, int w, Point p)
{
    return SupportGeometry(a, b, w).side(p.x, p.y);
}

std::vector<SupportRow> support_rows(Point a, Point b, int w, int width, int height)
{
    std::vector<SupportRow> rows;
    if (a == b || w <= 0)
        return rows;
    const SupportGeometry g(a, b, w);
    const double len = std::sqrt(static_cast<double>(squared_norm(b - a)));
    const double nx = -(b.y - a.y) / len * w;
    const double ny = (b.x - a.x) / len * w;
    const double ys[4] = {a.y + ny, a.y - ny, b.y + ny, b.y - ny};
    (void)nx;
    const int ylo = std::max(static_cast<int>(std::floor(*std::min_element(ys, ys + 4))) - 1, 0);
    const int yhi = std::min(static_cast<int>(std::ceil(*std::max_element(ys, ys + 4))) + 1, height - 1);

    for (int y = ylo; y <= yhi; ++y) {
        // dot(x)   = 2 Dx x + c_dot,  cross(x) = -2 Dy x + c_cross
        const double c_dot = static_cast<double>(g.dot(0, y));
        const double c_cross = static_cast<double>(g.cross(0, y));
        auto span = [&](bool inside, int& out_lo, int& out_hi) {
            double lo = -1e18, hi = 1e18;
            clip_linear(2.0 * g.Dx, c_dot, 0.0, static_cast<double>(g.len_sq4), lo, hi);
            if (inside)
                clip_linear(-2.0 * g.Dy, c_cross, 0.0, g.cross_bound, lo, hi);
            else
                clip_linear(-2.0 * g.Dy, c_cross, -g.cross_bound, 0.0, lo, hi);
            out_lo = 1;
            out_hi = 0;
            if (!(lo <= hi + 4.0))
                return;
            int xl = std::max(static_cast<int>(std::floor(lo)) - 2, 0);
            int xh = std::min(static_cast<int>(std::ceil(hi)) + 2, width - 1);
            const SupportSide want = inside ? SupportSide::inside : SupportSide::outside;
            while (xl <= xh && g.side(xl, y) != want)
                ++xl;
            while (xh >= xl && g.side(xh, y) != want)
                --xh;
            out_lo = xl;
            out_hi = xh;
        };
        SupportRow r{y, 1, 0, 1, 0};
        span(true, r.in_lo, r.in_hi);
        span(false, r.out_lo, r.out_hi);
        if (r.in_lo <= r.in_hi || r.out_lo <= r.out_hi)
            rows.push_back(r);
    }
    return rows;
}

EdgeSupport edge_support(const RotoCurve& curve, std::size_t n, int w, int width, int height, const RegionMask* mask)
{
    if (w <= 0)
        throw GeometryError("support half-width must be positive");
    const auto [a, b] = curve.edge(n);
    if (a == b)
        throw GeometryError("edge with identical endpoints");
    EdgeSupport s;
    s.edge_index = n;
    s.half_width = w;
    for (const auto& r : support_rows(a, b, w, width, height)) {
        for (int x = r.in_lo; x <= r.in_hi; ++x)
            if (!mask || (*mask)(x, r.y))
                s.inside_pixels.push_back({x, r.y});
        for (int x = r.out_lo; x <= r.out_hi; ++x)
            if (!mask || !(*mask)(x, r.y))
                s.outside_pixels.push_back({x, r.y});
    }
    return s;
}

RotoCurve resample_curve(const RotoCurve& curve, double target_spacing)
{
    const double P = perimeter(curve);
    if (!(target_spacing > 0.0) || target_spacing > P / 3.0)
        throw GeometryError("resample spacing larger than perimeter / 3");
    const std::size_t N = curve.size();
    const int count = std::max(3, static_cast<int>(std::lround(P / target_spacing)));
    const double step = P / count;

    std::vector<Point> out;
    std::size_t edge = 0;
    double edge_start = 0.0;
    double edge_len = std::sqrt(static_cast<double>(squared_norm(curve.edge(0).second - curve.edge(0).first)));
    for (int i = 0; i < count; ++i) {
        const double t = i * step;
        while (edge + 1 < N && t > edge_start + edge_len) {
            edge_start += edge_len;
            ++edge;
            const auto [a, b] = curve.edge(edge);
            edge_len = std::sqrt(static_cast<double>(squared_norm(b - a)));
        }
        const auto [a, b] = curve.edge(edge);
        const double u = edge_len > 0 ? std::clamp((t - edge_start) / edge_len, 0.0, 1.0) : 0.0;
        const Point p{static_cast<int>(std::lround(a.x + u * (b.x - a.x))),
                      static_cast<int>(std::lround(a.y + u * (b.y - a.y)))};
        if (out.empty() || out.back() != p)
            out.push_back(p);
    }
    while (out.size() > 1 && out.back() == out.front())
        out.pop_back();
    RotoCurve result(std::move(out));
    if (!is_simple(result))
        throw GeometryError("resampled curve is not simple");
    return result;
}

Plane<int> label_components(const RegionMask& mask, int* count)
{
    Plane<int> labels(mask.width(), mask.height(), 0);
    int next = 0;
    std::vector<Point> stack;
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x) {
            if (!mask(x, y) || labels(x, y))
                continue;
            ++next;
            labels(x, y) = next;
            stack.push_back({x, y});
            while (!stack.empty()) {
                const Point p = stack.back();
                stack.pop_back();
                const Point nb[4] = {{p.x + 1, p.y}, {p.x - 1, p.y}, {p.x, p.y + 1}, {p.x, p.y - 1}};
                for (const Point& q : nb)
                    if (mask.contains(q) && mask(q) && !labels(q)) {
                        labels(q) = next;
                        stack.push_back(q);
                    }
            }
        }
    if (count)
        *count = next;
    return labels;
}

RegionMask largest_component(const RegionMask& mask)
{
    int count = 0;
    const Plane<int> labels = label_components(mask, &count);
    RegionMask out(mask.width(), mask.height(), 0);
    if (count == 0)
        return out;
    std::vector<std::size_t> area(static_cast<std::size_t>(count) + 1, 0);
    for (int v : labels.data())
        ++area[static_cast<std::size_t>(v)];
    area[0] = 0;
    const auto best = static_cast<int>(std::max_element(area.begin(), area.end()) - area.begin());
    for (std::size_t i = 0; i < out.size(); ++i)
        out.data()[i] = labels.data()[i] == best ? 1 : 0;
    return out;
}

RegionMask fill_holes(const RegionMask& mask)
{
    const int w = mask.width(), h = mask.height();
    RegionMask outside(w, h, 0);
    std::deque<Point> queue;
    auto seed = [&](int x, int y) {
        if (!mask(x, y) && !outside(x, y)) {
            outside(x, y) = 1;
            queue.push_back({x, y});
        }
    };
    for (int x = 0; x < w; ++x) {
        seed(x, 0);
        seed(x, h - 1);
    }
    for (int y = 0; y < h; ++y) {
        seed(0, y);
        seed(w - 1, y);
    }
    while (!queue.empty()) {
        const Point p = queue.front();
        queue.pop_front();
        const Point nb[4] = {{p.x + 1, p.y}, {p.x - 1, p.y}, {p.x, p.y + 1}, {p.x, p.y - 1}};
        for (const Point& q : nb)
            if (mask.contains(q))
                seed(q.x, q.y);
    }
    RegionMask out(w, h, 0);
    for (std::size_t i = 0; i < out.size(); ++i)
        out.data()[i] = outside.data()[i] ? 0 : 1;
    return out;
}

RegionMask dilate(const RegionMask& mask, int r)
{
    const int w = mask.width(), h = mask.height();
    if (r <= 0)
        return mask;
    RegionMask tmp(w, h, 0), out(w, h, 0);
    std::vector<int> prefix(static_cast<std::size_t>(std::max(w, h)) + 1);
    for (int y = 0; y < h; ++y) {
        prefix[0] = 0;
        for (int x = 0; x < w; ++x)
            prefix[static_cast<std::size_t>(x) + 1] = prefix[static_cast<std::size_t>(x)] + (mask(x, y) ? 1 : 0);
        for (int x = 0; x < w; ++x) {
            const int lo = std::max(x - r, 0), hi = std::min(x + r, w - 1);
            tmp(x, y) = prefix[static_cast<std::size_t>(hi) + 1] - prefix[static_cast<std::size_t>(lo)] > 0;
        }
    }
    for (int x = 0; x < w; ++x) {
        prefix[0] = 0;
        for (int y = 0; y < h; ++y)
            prefix[static_cast<std::size_t>(y) + 1] = prefix[static_cast<std::size_t>(y)] + (tmp(x, y) ? 1 : 0);
        for (int y = 0; y < h; ++y) {
            const int lo = std::max(y - r, 0), hi = std::min(y + r, h - 1);
            out(x, y) = prefix[static_cast<std::size_t>(hi) + 1] - prefix[static_cast<std::size_t>(lo)] > 0;
        }
    }
    return out;
}

std::optional<RotoCurve> trace_boundary(const RegionMask& mask)
{
    const int w = mask.width(), h = mask.height();
    auto fg = [&](int x, int y) { return x >= 0 && y >= 0 && x < w && y < h && mask(x, y) != 0; };

    Point start{-1, -1};
    for (int y = 0; y < h && start.x < 0; ++y)
        for (int x = 0; x < w; ++x)
            if (fg(x, y)) {
                start = {x, y};
                break;
            }
    if (start.x < 0)
        return std::nullopt;

    // Outgoing crack directions per corner: bit 0 east, 1 south, 2 west, 3 north.
    const int cw = w + 1;
    std::vector<std::uint8_t> out(static_cast<std::size_t>(cw) * (h + 1), 0);
    auto corner = [&](int x, int y) -> std::uint8_t& { return out[static_cast<std::size_t>(y) * cw + x]; };
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (!fg(x, y))
                continue;
            if (!fg(x, y - 1))
                corner(x, y) |= 1;
            if (!fg(x + 1, y))
                corner(x + 1, y) |= 2;
            if (!fg(x, y + 1))
                corner(x + 1, y + 1) |= 4;
            if (!fg(x - 1, y))
                corner(x, y + 1) |= 8;
        }

    static constexpr Point step[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    std::vector<Point> pts;
    Point p = start;
    int dir = 0;
    const std::size_t limit = 4 * static_cast<std::size_t>(w) * h + 8;
    do {
        pts.push_back(p);
        p = p + step[dir];
        const std::uint8_t options = corner(p.x, p.y);
        // Prefer a right turn, then straight, then left: keeps diagonal pinches apart.
        const int order[3] = {(dir + 1) % 4, dir, (dir + 3) % 4};
        int next = -1;
        for (int d : order)
            if (options & (1 << d)) {
                next = d;
                break;
            }
        if (next < 0 || pts.size() > limit)
            return std::nullopt;
        dir = next;
    } while (!(p == start && dir == 0));

    std::vector<Point> compact;
    const std::size_t M = pts.size();
    for (std::size_t i = 0; i < M; ++i) {
        const Point prev = pts[(i + M - 1) % M];
        const Point cur = pts[i];
        const Point next = pts[(i + 1) % M];
        if (orient(prev, cur, next) != 0)
            compact.push_back(cur);
    }
    if (compact.size() < 3)
        return std::nullopt;
    return RotoCurve(std::move(compact));
}

double point_segment_distance_sq(Vec2 p, Vec2 a, Vec2 b)
{
    const Vec2 d = b - a;
    const double len2 = d.x * d.x + d.y * d.y;
    double t = len2 > 0 ? ((p.x - a.x) * d.x + (p.y - a.y) * d.y) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double ex = a.x + t * d.x - p.x;
    const double ey = a.y + t * d.y - p.y;
    return ex * ex + ey * ey;
}

}  // namespace roam
