#include <random>

#include "doctest.h"
#include "roam/pipeline.hpp"
#include "roam/state.hpp"

using namespace roam;

namespace {

Frame two_tone(int W, int H, int lo, int hi, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-0.04, 0.04);
    Plane<Color> rgb(W, H);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            const bool in = x >= lo && x < hi && y >= lo && y < hi;
            rgb(x, y) = in ? Color{0.85 + u(rng), 0.3 + u(rng), 0.2 + u(rng)} : Color{0.15 + u(rng), 0.35 + u(rng), 0.7 + u(rng)};
        }
    return Frame(std::move(rgb));
}

}  // namespace

TEST_SUITE("state")
{
    TEST_CASE("mask sampling")
    {
        const Frame f = two_tone(80, 80, 20, 60, 1);
        const RegionMask m = rasterize_region(RotoCurve({{20, 20}, {60, 20}, {60, 60}, {20, 60}}), 80, 80);
        const auto in = mask_samples(f, m, true, 100000);
        CHECK(in.size() == 1600);
        for (const Color& c : in)
            CHECK(c[0] > 0.7);
        const auto out = mask_samples(f, m, false, 500);
        CHECK(out.size() <= 500);
        CHECK(out.size() >= 400);
        for (const Color& c : out)
            CHECK(c[2] > 0.6);
    }

    TEST_CASE("model fitting")
    {
        const Frame f = two_tone(80, 80, 20, 60, 2);
        const RotoCurve c({{20, 20}, {40, 20}, {60, 20}, {60, 60}, {20, 60}});
        const RegionMask m = rasterize_region(c, 80, 80);
        ModelParams p;
        const FgBgModel g = fit_global_model(f, m, p);
        CHECK(log_density(g.fg, {0.85, 0.3, 0.2}) > log_density(g.bg, {0.85, 0.3, 0.2}));
        const auto local = fit_local_models(f, c, m, 5, p, g);
        REQUIRE(local.size() == c.size());
        for (const auto& l : local) {
            CHECK(is_valid(l.fg));
            CHECK(is_valid(l.bg));
        }
        // The outside half of an edge flush with the border is empty, so it borrows the fallback.
        const RotoCurve flush({{0, 0}, {40, 0}, {40, 40}, {0, 40}});
        const FgBgModel fb = fit_local_model(f, flush, 0, rasterize_region(flush, 80, 80), 5, p, g);
        CHECK(fb.bg == g.bg);
    }

    TEST_CASE("edge correspondence after reparametrization")
    {
        const RotoCurve a({{0, 0}, {40, 0}, {40, 40}, {0, 40}});
        const std::vector<std::size_t> same = nearest_old_edges(a, a);
        CHECK(same == std::vector<std::size_t>{0, 1, 2, 3});
        const RotoCurve b({{0, 0}, {20, 0}, {40, 0}, {40, 40}, {0, 40}});
        CHECK(nearest_old_edges(a, b) == std::vector<std::size_t>{0, 0, 1, 2, 3});
        CHECK(edge_length_ratio(a) == 1.0);
        CHECK(edge_length_ratio(b) == 2.0);
        CHECK(mean_edge_length(a) == 40.0);
    }

    TEST_CASE("pairings follow the nearest new vertex")
    {
        const RotoCurve a({{0, 0}, {40, 0}, {40, 40}, {0, 40}});
        const RotoCurve b({{1, 0}, {20, 0}, {41, 2}, {40, 40}, {0, 40}});
        LandmarkPool pool;
        Landmark l;
        l.position = {10, 10};
        l.pairings = {{1, {30, -10}}};
        pool.landmarks.push_back(l);
        remap_pairings(pool, a, b);
        REQUIRE(pool.landmarks[0].pairings.size() == 1);
        CHECK(pool.landmarks[0].pairings[0].vertex == 2);
        CHECK(pool.landmarks[0].pairings[0].mu == Point{31, -8});
    }

    TEST_CASE("adaptation keeps the models valid and adds one spare slot")
    {
        const Frame f = two_tone(80, 80, 20, 60, 3);
        const RotoCurve c({{20, 20}, {60, 20}, {60, 60}, {20, 60}});
        RunConfig cfg = preset_config(Preset::lean);
        TrackerState st = init_from_keyframe(f, c, cfg, 0);
        const std::size_t k = st.global_model.fg.components();
        const Frame g = two_tone(80, 80, 20, 60, 4);
        adapt_models(st, g, rasterize_region(c, 80, 80), cfg.models);
        CHECK(st.global_model.fg.components() == k + 1);
        CHECK(is_valid(st.global_model.fg));
        CHECK(is_valid(st.global_model.bg));
        for (const auto& m : st.local_models) {
            CHECK(is_valid(m.fg));
            CHECK(is_valid(m.bg));
        }
        adapt_models(st, g, rasterize_region(c, 80, 80), cfg.models);
        CHECK(st.global_model.fg.components() == k + 1);

        TrackerState plain = init_from_keyframe(f, c, cfg, 0);
        cfg.models.spare_slot = false;
        adapt_models(plain, g, rasterize_region(c, 80, 80), cfg.models);
        CHECK(plain.global_model.fg.components() == k);
    }

    TEST_CASE("replacing the curve keeps one model per edge")
    {
        const Frame f = two_tone(80, 80, 20, 60, 5);
        TrackerState st = init_from_keyframe(f, RotoCurve({{20, 20}, {60, 20}, {60, 60}, {20, 60}}), preset_config(Preset::lean), 0);
        const FgBgModel first = st.local_models[0];
        replace_curve(st, RotoCurve({{20, 20}, {40, 20}, {60, 20}, {60, 60}, {20, 60}}));
        REQUIRE(st.local_models.size() == 5);
        CHECK(st.local_models[0] == first);
        CHECK(st.local_models[1] == first);
    }
}
