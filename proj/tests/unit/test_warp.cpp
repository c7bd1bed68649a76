#include <cmath>
#include <random>

#include "doctest.h"
#include "roam/geometry.hpp"
#include "roam/warp.hpp"

using namespace roam;

namespace {

std::vector<Vec2> apply_all(const SimilarityTransform& t, const std::vector<Vec2>& p)
{
    std::vector<Vec2> out;
    for (Vec2 v : p)
        out.push_back(t.apply(v));
    return out;
}

double dist(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

Landmark moved(Point prev, Point delta, std::vector<Pairing> pairings = {})
{
    Landmark l;
    l.prev_position = prev;
    l.position = prev + delta;
    l.pairings = std::move(pairings);
    return l;
}

}  // namespace

TEST_SUITE("warp")
{
    TEST_CASE("similarity transform algebra")
    {
        const SimilarityTransform t{1.3, 0.2, {4, -7}};
        const Vec2 p{3, 5};
        const Vec2 q = t.inverse().apply(t.apply(p));
        CHECK(dist(p, q) <= 1e-12);
        CHECK(dist(SimilarityTransform{}.apply(p), p) == 0.0);
    }

    TEST_CASE("exact recovery without noise")
    {
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> u(0, 200);
        std::vector<Vec2> src;
        for (int i = 0; i < 12; ++i)
            src.push_back({u(rng), u(rng)});
        const SimilarityTransform truth{1.3, 0.2, {4, -7}};
        const RansacResult r = estimate_similarity_ransac(src, apply_all(truth, src), 3);
        CHECK(std::abs(r.transform.scale - 1.3) <= 1e-6);
        CHECK(std::abs(r.transform.rotation - 0.2) <= 1e-6);
        CHECK(std::abs(r.transform.translation.x - 4) <= 1e-6);
        CHECK(std::abs(r.transform.translation.y + 7) <= 1e-6);
        for (bool b : r.inliers)
            CHECK(b);
    }

    TEST_CASE("outliers are rejected")
    {
        std::mt19937_64 rng(2);
        std::uniform_real_distribution<double> u(0, 200);
        const SimilarityTransform truth{0.9, -0.3, {12, 5}};
        for (int it = 0; it < 20; ++it) {
            std::vector<Vec2> src, dst;
            std::vector<bool> good;
            for (int i = 0; i < 20; ++i) {
                src.push_back({u(rng), u(rng)});
                const bool outlier = i % 10 < 3;
                dst.push_back(outlier ? Vec2{u(rng), u(rng)} : truth.apply(src.back()));
                good.push_back(!outlier);
            }
            const RansacResult r = estimate_similarity_ransac(src, dst, rng());
            for (std::size_t i = 0; i < src.size(); ++i)
                if (good[i])
                    CHECK(dist(r.transform.apply(src[i]), dst[i]) <= 0.5);
        }
    }

    TEST_CASE("degenerate inputs")
    {
        CHECK_THROWS_AS(estimate_similarity_ransac({{1, 1}}, {{2, 2}}, 1), InputError);
        CHECK_THROWS_AS(fit_similarity({{1, 1}, {1, 1}}, {{0, 0}, {3, 3}}), InputError);
    }

    TEST_CASE("curve warping")
    {
        const RotoCurve sq({{20, 20}, {40, 20}, {40, 40}, {20, 40}});
        CHECK(warp_curve(sq, {}, 100, 100) == sq);
        const RotoCurve moved_sq = warp_curve(sq, {1.0, 0.0, {10, 0}}, 100, 100);
        for (std::size_t n = 0; n < sq.size(); ++n)
            CHECK(moved_sq[n] == sq[n] + Point{10, 0});
        const RotoCurve small({{3, 3}, {13, 3}, {13, 11}, {3, 11}});
        CHECK(std::abs(perimeter(warp_curve(small, {2.0, 0.0, {}}, 100, 100)) - 2 * perimeter(small)) <= 2.0);
        CHECK_THROWS_AS(warp_curve(sq, {0.01, 0.0, {}}, 100, 100), GeometryError);
    }

    TEST_CASE("node projection")
    {
        const RotoCurve sq({{20, 20}, {60, 20}, {60, 60}, {20, 60}});
        SUBCASE("uniform motion")
        {
            LandmarkPool pool;
            pool.landmarks = {moved({30, 30}, {5, 5}, {{0, {}}}), moved({50, 50}, {5, 5})};
            const RotoCurve w = warp_by_node_projection(sq, pool, 100, 100);
            for (std::size_t n = 0; n < 4; ++n)
                CHECK(w[n] == sq[n] + Point{5, 5});
        }
        SUBCASE("stationary or empty pool")
        {
            LandmarkPool pool;
            CHECK(warp_by_node_projection(sq, pool, 100, 100) == sq);
            pool.landmarks = {moved({30, 30}, {0, 0})};
            CHECK(warp_by_node_projection(sq, pool, 100, 100) == sq);
            pool.landmarks = {moved({30, 30}, {8, 0})};
            pool.landmarks[0].lost = true;
            CHECK(warp_by_node_projection(sq, pool, 100, 100) == sq);
        }
        SUBCASE("vertices follow their own cluster")
        {
            LandmarkPool pool;
            pool.landmarks = {moved({25, 25}, {4, 0}, {{0, {}}, {3, {}}}), moved({27, 28}, {4, 0}, {{0, {}}}),
                              moved({55, 25}, {0, 6}, {{1, {}}, {2, {}}}), moved({56, 30}, {0, 6}, {{1, {}}})};
            const RotoCurve w = warp_by_node_projection(sq, pool, 100, 100);
            CHECK(w[0] == sq[0] + Point{4, 0});
            CHECK(w[3] == sq[3] + Point{4, 0});
            CHECK(w[1] == sq[1] + Point{0, 6});
            CHECK(w[2] == sq[2] + Point{0, 6});
        }
    }
}
