#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "roam/geometry.hpp"

using namespace roam;

TEST_SUITE("geometry")
{
    TEST_CASE("square rasterization matches the ray-cast oracle")
    {
        const RotoCurve sq({{0, 0}, {10, 0}, {10, 10}, {0, 10}});
        CHECK(is_clockwise(sq));
        const RegionMask m = rasterize_region(sq, 16, 16);
        CHECK(m == oracle::raycast_mask(sq, 16, 16));
        CHECK(mask_area(m) == 100);
    }

    TEST_CASE("random polygons rasterize like the ray-cast oracle")
    {
        std::mt19937_64 rng(11);
        for (int i = 0; i < 200; ++i) {
            const RotoCurve c = oracle::random_simple_polygon(rng, 48, 40, 9);
            CHECK(rasterize_region(c, 48, 40) == oracle::raycast_mask(c, 48, 40));
        }
    }

    TEST_CASE("mirrored triangle keeps its area")
    {
        // Every edge direction has one even reduced component, so no pixel center lies on an edge.
        const RotoCurve t({{1, 1}, {17, 5}, {7, 13}});
        std::vector<Point> v;
        for (Point p : t.vertices())
            v.push_back({20 - p.x, p.y});
        const RotoCurve m = make_clockwise(RotoCurve(v));
        CHECK(mask_area(rasterize_region(make_clockwise(t), 21, 15)) == mask_area(rasterize_region(m, 21, 15)));
    }

    TEST_CASE("degenerate and self-intersecting curves are rejected")
    {
        CHECK_THROWS_AS(rasterize_region(RotoCurve({{0, 0}, {5, 5}, {10, 10}}), 12, 12), GeometryError);
        CHECK_THROWS_AS(rasterize_region(RotoCurve({{0, 0}, {10, 10}, {10, 0}, {0, 10}}), 12, 12), GeometryError);
        CHECK_THROWS_AS(validate_curve(RotoCurve({{0, 0}, {20, 0}, {0, 5}}), 10, 10), GeometryError);
        CHECK_FALSE(is_simple(RotoCurve({{0, 0}, {4, 0}, {4, 0}, {0, 4}})));
    }

    TEST_CASE("segment intersection")
    {
        CHECK(segments_intersect({0, 0}, {4, 4}, {0, 4}, {4, 0}));
        CHECK(segments_intersect({0, 0}, {4, 0}, {4, 0}, {4, 4}));
        CHECK(segments_intersect({0, 0}, {4, 0}, {2, 0}, {6, 0}));
        CHECK_FALSE(segments_intersect({0, 0}, {4, 0}, {0, 1}, {4, 1}));
    }

    TEST_CASE("edge pixel chains")
    {
        CHECK(edge_pixel_chain({0, 0}, {3, 0}) == std::vector<Point>{{0, 0}, {1, 0}, {2, 0}});
        CHECK(edge_pixel_chain({0, 0}, {0, 1}) == std::vector<Point>{{0, 0}});
        const auto c = edge_pixel_chain({0, 0}, {5, 3});
        REQUIRE(c.size() == 5);
        CHECK(chain_length({0, 0}, {5, 3}) == 5);
        for (std::size_t i = 1; i < c.size(); ++i) {
            CHECK(c[i].x == c[i - 1].x + 1);
            CHECK(std::abs(c[i].y - c[i - 1].y) <= 1);
        }
        CHECK_THROWS_AS(edge_pixel_chain({2, 2}, {2, 2}), GeometryError);
    }

    TEST_CASE("edge support halves")
    {
        SUBCASE("horizontal interior edge is symmetric")
        {
            const RotoCurve c({{10, 20}, {30, 20}, {30, 40}, {10, 40}});
            const auto s = edge_support(c, 0, 3, 60, 60);
            CHECK(s.inside_pixels.size() == s.outside_pixels.size());
            CHECK_FALSE(s.inside_pixels.empty());
        }
        SUBCASE("border-flush edge loses its outside half")
        {
            const RotoCurve c({{5, 0}, {25, 0}, {25, 20}, {5, 20}});
            const auto s = edge_support(c, 0, 3, 40, 40);
            CHECK(s.outside_pixels.size() < s.inside_pixels.size());
        }
        SUBCASE("random edges against the distance oracle")
        {
            std::mt19937_64 rng(5);
            const int W = 50, H = 45;
            for (int it = 0; it < 60; ++it) {
                const RotoCurve c = oracle::random_simple_polygon(rng, W, H, 7);
                const std::size_t n = rng() % c.size();
                const int w = 1 + static_cast<int>(rng() % 6);
                const auto [a, b] = c.edge(n);
                std::set<Point> in, out;
                for (int y = 0; y < H; ++y)
                    for (int x = 0; x < W; ++x) {
                        const double px = x + 0.5 - a.x, py = y + 0.5 - a.y;
                        const double vx = b.x - a.x, vy = b.y - a.y, L2 = vx * vx + vy * vy;
                        const double t = px * vx + py * vy;
                        const double cr = vx * py - vy * px;
                        if (t < 0 || t > L2 || cr * cr > w * w * L2)
                            continue;
                        (cr > 0 || (cr == 0 && vy > 0) ? in : out).insert({x, y});
                    }
                const auto s = edge_support(c, n, w, W, H);
                CHECK(std::set<Point>(s.inside_pixels.begin(), s.inside_pixels.end()) == in);
                CHECK(std::set<Point>(s.outside_pixels.begin(), s.outside_pixels.end()) == out);
            }
        }
        SUBCASE("interior half faces the region of a clockwise curve")
        {
            const RotoCurve c({{10, 10}, {30, 10}, {30, 30}, {10, 30}});
            const RegionMask m = rasterize_region(c, 40, 40);
            for (std::size_t n = 0; n < c.size(); ++n) {
                const auto s = edge_support(c, n, 2, 40, 40);
                for (Point p : s.inside_pixels)
                    CHECK(m(p) == 1);
                for (Point p : s.outside_pixels)
                    CHECK(m(p) == 0);
            }
        }
    }

    TEST_CASE("resampling")
    {
        const RotoCurve sq({{0, 0}, {40, 0}, {40, 40}, {0, 40}});
        CHECK(resample_curve(sq, 10.0).size() == 16);
        const RotoCurve u = resample_curve(sq, 10.0);
        const auto again = resample_curve(u, 10.0);
        CHECK(std::abs(static_cast<int>(again.size()) - static_cast<int>(u.size())) <= 1);
        CHECK_THROWS_AS(resample_curve(sq, 100.0), GeometryError);

        std::mt19937_64 rng(9);
        int checked = 0;
        for (int it = 0; it < 50; ++it) {
            const RotoCurve c = oracle::random_simple_polygon(rng, 120, 100, 10);
            if (perimeter(c) < 60)
                continue;
            RotoCurve r;
            try {
                r = resample_curve(c, 6.0);
            } catch (const GeometryError&) {
                continue;  // rounding can fold very thin spikes
            }
            ++checked;
            for (std::size_t n = 0; n < r.size(); ++n) {
                const auto [a, b] = r.edge(n);
                CHECK(std::sqrt(static_cast<double>(squared_norm(b - a))) <= 1.5 * 6.0);
            }
        }
        CHECK(checked > 30);
    }

    TEST_CASE("mask utilities")
    {
        RegionMask m(10, 10, 0);
        for (int y = 2; y < 8; ++y)
            for (int x = 2; x < 8; ++x)
                m(x, y) = 1;
        m(4, 4) = 0;
        m(0, 9) = 1;
        int count = 0;
        label_components(m, &count);
        CHECK(count == 2);
        const RegionMask big = largest_component(m);
        CHECK(big(0, 9) == 0);
        CHECK(fill_holes(big)(4, 4) == 1);
        const RegionMask d = dilate(big, 1);
        CHECK(d(1, 1) == 1);
        CHECK(d(0, 0) == 0);

        const RegionMask filled = fill_holes(big);
        const auto outline = trace_boundary(filled);
        REQUIRE(outline.has_value());
        CHECK(is_clockwise(*outline));
        CHECK(rasterize_region(*outline, 10, 10) == filled);
        CHECK_FALSE(trace_boundary(RegionMask(4, 4, 0)).has_value());
    }

    TEST_CASE("traced outlines reproduce rasterized polygons")
    {
        std::mt19937_64 rng(21);
        for (int it = 0; it < 40; ++it) {
            const RotoCurve c = oracle::random_simple_polygon(rng, 60, 50, 8);
            const RegionMask m = fill_holes(largest_component(rasterize_region(c, 60, 50)));
            if (mask_area(m) == 0)
                continue;
            const auto t = trace_boundary(m);
            REQUIRE(t.has_value());
            CHECK(rasterize_region(*t, 60, 50) == m);
        }
    }
}
