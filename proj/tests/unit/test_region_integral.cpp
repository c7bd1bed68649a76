#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "roam/region_integral.hpp"

using namespace roam;

namespace {

Frame noise_frame(std::mt19937_64& rng, int W, int H)
{
    std::uniform_real_distribution<double> u(0, 1);
    Plane<Color> rgb(W, H);
    for (Color& c : rgb.data())
        c = {u(rng), u(rng), u(rng)};
    return Frame(std::move(rgb));
}

double curve_sum(const GreenField& f, const RotoCurve& c)
{
    double s = 0.0;
    for (std::size_t n = 0; n < c.size(); ++n)
        s += global_edge_cost(f, c, n);
    return s;
}

}  // namespace

TEST_SUITE("region_integral")
{
    TEST_CASE("equal models give a zero field")
    {
        std::mt19937_64 rng(1);
        const Frame f = noise_frame(rng, 12, 8);
        const Gmm g{{1.0}, {{0.5, 0.5, 0.5}}, {{0.05, 0.05, 0.05}}};
        const GreenField field = build_green_field(f, {g, g});
        for (double v : field.q.values().data())
            CHECK(v == 0.0);
    }

    TEST_CASE("unit log ratio gives column + 1")
    {
        Plane<double> ratio(9, 4, 1.0);
        const GreenField f = green_field_from_ratio(ratio);
        for (int y = 0; y < 4; ++y)
            for (int x = 0; x < 9; ++x)
                CHECK(f.q(x, y) == x + 1);
    }

    TEST_CASE("field is the row prefix of the per-pixel log ratio")
    {
        std::mt19937_64 rng(2);
        const Frame f = noise_frame(rng, 10, 6);
        const FgBgModel m{{{0.4, 0.6}, {{0.2, 0.3, 0.4}, {0.7, 0.7, 0.2}}, {{0.02, 0.03, 0.04}, {0.05, 0.01, 0.02}}},
                          {{1.0}, {{0.5, 0.5, 0.5}}, {{0.08, 0.08, 0.08}}}};
        const GreenField g = build_green_field(f, m);
        for (int y = 0; y < 6; ++y) {
            double acc = 0.0;
            for (int x = 0; x < 10; ++x) {
                acc += log_density(m.bg, f.rgb()(x, y)) - log_density(m.fg, f.rgb()(x, y));
                CHECK(g.q(x, y) == doctest::Approx(acc).epsilon(1e-12));
            }
        }
    }

    TEST_CASE("horizontal edges cost nothing")
    {
        const GreenField f = green_field_from_ratio(Plane<double>(20, 20, 3.0));
        CHECK(global_edge_cost(f, {2, 5}, {15, 5}) == 0.0);
        CHECK(global_edge_cost(f, {15, 9}, {2, 9}) == 0.0);
    }

    TEST_CASE("uniform field over a square sums to c times the area")
    {
        const GreenField f = green_field_from_ratio(Plane<double>(30, 30, 0.75));
        const RotoCurve sq({{4, 4}, {20, 4}, {20, 20}, {4, 20}});
        CHECK(curve_sum(f, sq) == doctest::Approx(0.75 * 256).epsilon(1e-12));
    }

    TEST_CASE("random polygons match the direct region sum")
    {
        std::mt19937_64 rng(31);
        for (int it = 0; it < 150; ++it) {
            const int W = 16 + static_cast<int>(rng() % 80), H = 16 + static_cast<int>(rng() % 80);
            const Plane<double> field = oracle::random_field(rng, W, H, -5, 5);
            const RotoCurve c = oracle::random_simple_polygon(rng, W, H, 12);
            const double direct = oracle::region_sum(field, oracle::raycast_mask(c, W, H));
            CHECK(std::abs(curve_sum(green_field_from_ratio(field), c) - direct) <= 1e-9);
        }
    }

    TEST_CASE("edge cost flips sign with the edge direction")
    {
        std::mt19937_64 rng(6);
        const GreenField f = green_field_from_ratio(oracle::random_field(rng, 40, 40, -1, 1));
        CHECK(global_edge_cost(f, {3, 2}, {30, 37}) == -global_edge_cost(f, {30, 37}, {3, 2}));
    }
}
