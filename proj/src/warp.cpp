#include "roam/warp.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

namespace roam {

namespace {

using cplx = std::complex<double>;

cplx to_c(Vec2 p) { return {p.x, p.y}; }

SimilarityTransform from_complex(cplx a, cplx b)
{
    SimilarityTransform t;
    t.scale = std::abs(a);
    t.rotation = std::arg(a);
    t.translation = {b.real(), b.imag()};
    return t;
}

RotoCurve finish(std::vector<Point> v, int width, int height)
{
    RotoCurve c(std::move(v));
    validate_curve(c, width, height);
    return c;
}

}  // namespace

Vec2 SimilarityTransform::apply(Vec2 p) const
{
    const cplx a = std::polar(scale, rotation);
    const cplx z = a * to_c(p) + to_c(translation);
    return {z.real(), z.imag()};
}

SimilarityTransform SimilarityTransform::inverse() const
{
    const cplx a = std::polar(scale, rotation);
    const cplx ai = 1.0 / a;
    return from_complex(ai, -ai * to_c(translation));
}

SimilarityTransform fit_similarity(const std::vector<Vec2>& src, const std::vector<Vec2>& dst)
{
    if (src.size() < 2 || src.size() != dst.size())
        throw InputError("similarity fit needs at least 2 correspondences");
    const double n = static_cast<double>(src.size());
    cplx ps{0, 0}, qs{0, 0};
    for (std::size_t i = 0; i < src.size(); ++i) {
        ps += to_c(src[i]);
        qs += to_c(dst[i]);
    }
    const cplx pm = ps / n, qm = qs / n;
    cplx num{0, 0};
    double den = 0.0;
    for (std::size_t i = 0; i < src.size(); ++i) {
        const cplx p = to_c(src[i]) - pm, q = to_c(dst[i]) - qm;
        num += q * std::conj(p);
        den += std::norm(p);
    }
    if (den <= 1e-12)
        throw InputError("similarity fit: source points coincide");
    const cplx a = num / den;
    return from_complex(a, qm - a * pm);
}

RansacResult estimate_similarity_ransac(const std::vector<Vec2>& prev_pts, const std::vector<Vec2>& curr_pts,
                                        std::uint64_t seed, double inlier_tol, int max_trials)
{
    const std::size_t n = prev_pts.size();
    if (n < 2 || curr_pts.size() != n)
        throw InputError("RANSAC needs at least 2 correspondences");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    const double tol2 = inlier_tol * inlier_tol;

    auto residual_inliers = [&](const SimilarityTransform& t, std::vector<bool>& mask) {
        std::size_t count = 0;
        mask.assign(n, false);
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 q = t.apply(prev_pts[i]);
            const double dx = q.x - curr_pts[i].x, dy = q.y - curr_pts[i].y;
            if (dx * dx + dy * dy <= tol2) {
                mask[i] = true;
                ++count;
            }
        }
        return count;
    };

    std::vector<bool> best_mask, mask;
    std::size_t best_count = 0;
    bool any = false;
    for (int trial = 0; trial < max_trials; ++trial) {
        const std::size_t i = pick(rng);
        std::size_t j = pick(rng);
        if (n > 1)
            while (j == i)
                j = pick(rng);
        const cplx p1 = to_c(prev_pts[i]), p2 = to_c(prev_pts[j]);
        if (std::abs(p2 - p1) < 1e-9)
            continue;
        const cplx a = (to_c(curr_pts[j]) - to_c(curr_pts[i])) / (p2 - p1);
        if (std::abs(a) < 1e-9)
            continue;
        const SimilarityTransform t = from_complex(a, to_c(curr_pts[i]) - a * p1);
        const std::size_t count = residual_inliers(t, mask);
        if (!any || count > best_count) {
            best_count = count;
            best_mask = mask;
            any = true;
        }
        if (best_count == n)
            break;
    }
    if (!any)
        throw InputError("RANSAC: all samples degenerate");

    std::vector<Vec2> src, dst;
    for (std::size_t i = 0; i < n; ++i)
        if (best_mask[i]) {
            src.push_back(prev_pts[i]);
            dst.push_back(curr_pts[i]);
        }
    RansacResult r;
    r.transform = fit_similarity(src, dst);
    residual_inliers(r.transform, r.inliers);
    return r;
}

RotoCurve warp_curve(const RotoCurve& curve, const SimilarityTransform& t, int width, int height)
{
    if (!(t.scale > 0.0) || !std::isfinite(t.scale))
        throw GeometryError("invalid similarity transform");
    std::vector<Point> v;
    v.reserve(curve.size());
    for (const Point& p : curve.vertices()) {
        const Vec2 q = t.apply(to_vec(p));
        if (!std::isfinite(q.x) || !std::isfinite(q.y))
            throw GeometryError("warped vertex is not finite");
        v.push_back({static_cast<int>(std::clamp(std::lround(q.x), 0L, static_cast<long>(width - 1))),
                     static_cast<int>(std::clamp(std::lround(q.y), 0L, static_cast<long>(height - 1)))});
    }
    return finish(std::move(v), width, height);
}

RotoCurve warp_by_node_projection(const RotoCurve& curve, const LandmarkPool& pool, int width, int height)
{
    const std::size_t N = curve.size();
    std::vector<double> sx(N, 0.0), sy(N, 0.0), cnt(N, 0.0);
    double gx = 0.0, gy = 0.0, gc = 0.0;
    for (const auto& l : pool.landmarks) {
        if (l.lost)
            continue;
        const double dx = l.position.x - l.prev_position.x;
        const double dy = l.position.y - l.prev_position.y;
        gx += dx;
        gy += dy;
        gc += 1.0;
        for (const auto& p : l.pairings) {
            if (p.vertex < 0 || p.vertex >= static_cast<int>(N))
                continue;
            sx[static_cast<std::size_t>(p.vertex)] += dx;
            sy[static_cast<std::size_t>(p.vertex)] += dy;
            cnt[static_cast<std::size_t>(p.vertex)] += 1.0;
        }
    }
    if (gc == 0.0)
        return curve;
    std::vector<Point> v(N);
    for (std::size_t n = 0; n < N; ++n) {
        const double dx = cnt[n] > 0 ? sx[n] / cnt[n] : gx / gc;
        const double dy = cnt[n] > 0 ? sy[n] / cnt[n] : gy / gc;
        v[n] = {std::clamp(static_cast<int>(std::lround(curve[n].x + dx)), 0, width - 1),
                std::clamp(static_cast<int>(std::lround(curve[n].y + dy)), 0, height - 1)};
    }
    return finish(std::move(v), width, height);
}

}  // namespace roam
