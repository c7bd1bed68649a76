#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace oracle {

RotoCurve random_simple_polygon(std::mt19937_64& rng, int W, int H, int max_vertices)
{
    std::uniform_int_distribution<int> count(3, std::max(3, max_vertices));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (;;) {
        const int n = count(rng);
        const double cx = W * (0.3 + 0.4 * unit(rng)), cy = H * (0.3 + 0.4 * unit(rng));
        const double rmax = 0.28 * std::min(W, H);
        std::vector<double> angles(static_cast<std::size_t>(n));
        for (double& a : angles)
            a = 2.0 * std::numbers::pi * unit(rng);
        std::sort(angles.begin(), angles.end());
        std::vector<Point> v;
        for (double a : angles) {
            const double r = rmax * (0.2 + 0.8 * unit(rng));
            v.push_back({std::clamp(static_cast<int>(std::lround(cx + r * std::cos(a))), 0, W - 1),
                         std::clamp(static_cast<int>(std::lround(cy + r * std::sin(a))), 0, H - 1)});
        }
        RotoCurve c(std::move(v));
        if (!is_simple(c))
            continue;
        return make_clockwise(c);
    }
}

Plane<double> random_field(std::mt19937_64& rng, int W, int H, double lo, double hi)
{
    std::uniform_real_distribution<double> d(lo, hi);
    Plane<double> f(W, H);
    for (double& v : f.data())
        v = d(rng);
    return f;
}

bool center_inside(const RotoCurve& curve, int x, int y)
{
    const double px = x + 0.5, py = y + 0.5;
    bool inside = false;
    for (std::size_t n = 0; n < curve.size(); ++n) {
        const auto [a, b] = curve.edge(n);
        if ((a.y > py) == (b.y > py))
            continue;
        const double t = (py - a.y) / static_cast<double>(b.y - a.y);
        const double xc = a.x + t * (b.x - a.x);
        if (xc < px)
            inside = !inside;
    }
    return inside;
}

RegionMask raycast_mask(const RotoCurve& curve, int W, int H)
{
    RegionMask m(W, H, 0);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x)
            m(x, y) = center_inside(curve, x, y) ? 1 : 0;
    return m;
}

double region_sum(const Plane<double>& field, const RegionMask& mask)
{
    double s = 0.0;
    for (int y = 0; y < field.height(); ++y)
        for (int x = 0; x < field.width(); ++x)
            if (mask(x, y))
                s += field(x, y);
    return s;
}

double chain_min(const kernels::ChainTables& t)
{
    std::vector<int> labels(static_cast<std::size_t>(t.nodes), 0);
    double best = std::numeric_limits<double>::infinity();
    for (;;) {
        best = std::min(best, kernels::chain_cost(t, labels));
        int k = 0;
        while (k < t.nodes && ++labels[static_cast<std::size_t>(k)] == t.labels)
            labels[static_cast<std::size_t>(k++)] = 0;
        if (k == t.nodes)
            return best;
    }
}

Plane<double> gdt_brute(const Plane<double>& f)
{
    const int W = f.width(), H = f.height();
    Plane<double> out(W, H, std::numeric_limits<double>::infinity());
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x)
            for (int sy = 0; sy < H; ++sy)
                for (int sx = 0; sx < W; ++sx) {
                    const double dx = x - sx, dy = y - sy;
                    out(x, y) = std::min(out(x, y), f(sx, sy) + 0.5 * (dx * dx + dy * dy));
                }
    return out;
}

double star_brute(const std::vector<Plane<double>>& unaries, double spring)
{
    const int W = unaries[0].width(), H = unaries[0].height();
    double best = std::numeric_limits<double>::infinity();
    for (int ry = 0; ry < H; ++ry)
        for (int rx = 0; rx < W; ++rx) {
            double total = 0.0;
            for (const auto& u : unaries) {
                double leaf = std::numeric_limits<double>::infinity();
                for (int y = 0; y < H; ++y)
                    for (int x = 0; x < W; ++x) {
                        const double dx = x - rx, dy = y - ry;
                        leaf = std::min(leaf, u(x, y) + spring * 0.5 * (dx * dx + dy * dy));
                    }
                total += leaf;
            }
            best = std::min(best, total);
        }
    return best;
}

double cut_of(const FlowGraph& g, const std::vector<bool>& s)
{
    double c = 0.0;
    for (int u = 0; u < g.nodes(); ++u)
        c += s[static_cast<std::size_t>(u)] ? g.sink_cap(u) : g.source_cap(u);
    for (const auto& a : g.arcs()) {
        const bool su = s[static_cast<std::size_t>(a.from)], sv = s[static_cast<std::size_t>(a.to)];
        if (su && !sv)
            c += a.cap;
        if (sv && !su)
            c += a.rev_cap;
    }
    return c;
}

double min_cut_brute(const FlowGraph& g)
{
    const int n = g.nodes();
    double best = std::numeric_limits<double>::infinity();
    std::vector<bool> s(static_cast<std::size_t>(n));
    for (unsigned long long bits = 0; bits < (1ull << n); ++bits) {
        for (int u = 0; u < n; ++u)
            s[static_cast<std::size_t>(u)] = (bits >> u) & 1u;
        best = std::min(best, cut_of(g, s));
    }
    return best;
}

double naive_log_density(const Gmm& g, const Color& c)
{
    double p = 0.0;
    for (std::size_t k = 0; k < g.components(); ++k) {
        double d = g.weights[k];
        for (int ch = 0; ch < 3; ++ch) {
            const double v = g.variances[k][ch], e = c[ch] - g.means[k][ch];
            d *= std::exp(-0.5 * e * e / v) / std::sqrt(2.0 * std::numbers::pi * v);
        }
        p += d;
    }
    return std::log(p);
}

double center_segment_dist_sq(int x, int y, Point a, Point b)
{
    const double px = x + 0.5, py = y + 0.5;
    const double ax = a.x, ay = a.y, bx = b.x, by = b.y;
    const double vx = bx - ax, vy = by - ay;
    const double len2 = vx * vx + vy * vy;
    double t = len2 > 0 ? ((px - ax) * vx + (py - ay) * vy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double dx = ax + t * vx - px, dy = ay + t * vy - py;
    return dx * dx + dy * dy;
}

}  // namespace oracle
