#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "roam/appearance.hpp"

using namespace roam;

namespace {

Gmm random_gmm(std::mt19937_64& rng, int K)
{
    std::uniform_real_distribution<double> u(0, 1), v(0.002, 0.05);
    Gmm g;
    double sum = 0.0;
    for (int k = 0; k < K; ++k) {
        g.weights.push_back(0.1 + u(rng));
        sum += g.weights.back();
        g.means.push_back({u(rng), u(rng), u(rng)});
        g.variances.push_back({v(rng), v(rng), v(rng)});
    }
    for (double& w : g.weights)
        w /= sum;
    return g;
}

std::vector<Color> cluster(std::mt19937_64& rng, Color c, double sd, int n)
{
    std::normal_distribution<double> d(0, sd);
    std::vector<Color> out;
    for (int i = 0; i < n; ++i)
        out.push_back({c[0] + d(rng), c[1] + d(rng), c[2] + d(rng)});
    return out;
}

}  // namespace

TEST_SUITE("appearance")
{
    TEST_CASE("single-color data collapses to the variance floor")
    {
        const std::vector<Color> s(200, Color{0.3, 0.6, 0.9});
        const Gmm g = fit_gmm(s, 2, 1);
        CHECK(is_valid(g));
        for (std::size_t k = 0; k < g.components(); ++k)
            for (int c = 0; c < 3; ++c) {
                CHECK(g.means[k][c] == doctest::Approx(s[0][c]).epsilon(1e-12));
                CHECK(g.variances[k][c] == kVarianceFloor);
            }
    }

    TEST_CASE("two separated clusters are recovered")
    {
        std::mt19937_64 rng(4);
        auto s = cluster(rng, {0.2, 0.2, 0.8}, 0.03, 100);
        const auto b = cluster(rng, {0.8, 0.7, 0.1}, 0.03, 100);
        s.insert(s.end(), b.begin(), b.end());
        const Gmm g = fit_gmm(s, 2, 9);
        REQUIRE(g.components() == 2);
        const std::size_t first = g.means[0][2] > 0.5 ? 0 : 1;
        CHECK(std::abs(g.weights[first] - 0.5) <= 0.05);
        const Color ca{0.2, 0.2, 0.8}, cb{0.8, 0.7, 0.1};
        for (int c = 0; c < 3; ++c) {
            CHECK(std::abs(g.means[first][c] - ca[c]) <= 0.02);
            CHECK(std::abs(g.means[1 - first][c] - cb[c]) <= 0.02);
        }
    }

    TEST_CASE("fit errors and small sample sets")
    {
        CHECK_THROWS_AS(fit_gmm({}, 2, 1), InputError);
        const std::vector<Color> two{{0, 0, 0}, {1, 1, 1}};
        CHECK(fit_gmm(two, 5, 1).components() == 2);
    }

    TEST_CASE("EM log-likelihood never decreases")
    {
        std::mt19937_64 rng(12);
        for (int it = 0; it < 20; ++it) {
            const Gmm truth = random_gmm(rng, 3);
            std::vector<Color> s;
            for (std::size_t k = 0; k < 3; ++k)
                for (const Color& c : cluster(rng, truth.means[k], 0.08, 80))
                    s.push_back(c);
            EmTrace trace;
            fit_gmm(s, 4, rng(), {}, &trace);
            REQUIRE(trace.size() >= 2);
            for (std::size_t i = 1; i < trace.size(); ++i)
                CHECK(trace[i] >= trace[i - 1] - 1e-9);
        }
    }

    TEST_CASE("log density")
    {
        SUBCASE("value at the mean of a unit-variance Gaussian")
        {
            const Gmm g{{1.0}, {{0.5, 0.5, 0.5}}, {{1.0, 1.0, 1.0}}};
            CHECK(log_density(g, {0.5, 0.5, 0.5}) == doctest::Approx(-1.5 * std::log(2 * M_PI)).epsilon(1e-14));
        }
        SUBCASE("floor")
        {
            const Gmm g{{1.0}, {{0, 0, 0}}, {{1e-4, 1e-4, 1e-4}}};
            CHECK(log_density(g, {1, 1, 1}) == kLnFloor);
            CHECK(GmmEvaluator(g).log_density({1, 1, 1}) == kLnFloor);
        }
        SUBCASE("random models against the unlogged sum")
        {
            std::mt19937_64 rng(8);
            std::uniform_real_distribution<double> u(0, 1);
            for (int m = 0; m < 10; ++m) {
                const Gmm g = random_gmm(rng, 3);
                const GmmEvaluator ev(g);
                for (int i = 0; i < 50; ++i) {
                    const std::size_t k = rng() % 3;
                    const Color c{g.means[k][0] + 0.1 * (u(rng) - 0.5), g.means[k][1] + 0.1 * (u(rng) - 0.5),
                                  g.means[k][2] + 0.1 * (u(rng) - 0.5)};
                    const double naive = std::max(oracle::naive_log_density(g, c), kLnFloor);
                    CHECK(log_density(g, c) == doctest::Approx(naive).epsilon(1e-9));
                    CHECK(ev.log_density(c) == doctest::Approx(naive).epsilon(1e-9));
                }
            }
        }
        SUBCASE("an empty slot leaves the density unchanged")
        {
            std::mt19937_64 rng(2);
            const Gmm g = random_gmm(rng, 2);
            Gmm h = g;
            add_empty_component(h);
            CHECK(h.components() == 3);
            CHECK(is_valid(h));
            CHECK(log_density(h, g.means[0]) == log_density(g, g.means[0]));
        }
    }

    TEST_CASE("online adaptation")
    {
        std::mt19937_64 rng(17);
        const Gmm g = random_gmm(rng, 3);

        SUBCASE("vanishing rate is a fixed point")
        {
            const auto s = cluster(rng, g.means[1], 0.02, 100);
            const Gmm a = adapt_gmm(g, s, 1e-12);
            for (std::size_t k = 0; k < 3; ++k) {
                CHECK(std::abs(a.weights[k] - g.weights[k]) <= 1e-9);
                for (int c = 0; c < 3; ++c) {
                    CHECK(std::abs(a.means[k][c] - g.means[k][c]) <= 1e-9);
                    CHECK(std::abs(a.variances[k][c] - g.variances[k][c]) <= 1e-9);
                }
            }
        }
        SUBCASE("a new color is learned")
        {
            const Gmm base{{0.5, 0.5}, {{0.1, 0.1, 0.1}, {0.2, 0.1, 0.1}}, {{0.002, 0.002, 0.002}, {0.002, 0.002, 0.002}}};
            const Color fresh{0.9, 0.2, 0.6};
            const Gmm a = adapt_gmm(base, cluster(rng, fresh, 0.01, 500), per_sample_rate(0.1, 500));
            CHECK(is_valid(a));
            double best = 1e9;
            for (const Color& m : a.means)
                best = std::min(best, std::sqrt((m[0] - fresh[0]) * (m[0] - fresh[0]) + (m[1] - fresh[1]) * (m[1] - fresh[1]) +
                                                (m[2] - fresh[2]) * (m[2] - fresh[2])));
            CHECK(best <= 0.05);
        }
        SUBCASE("weights stay normalized")
        {
            std::uniform_real_distribution<double> u(0, 1);
            std::vector<Color> s;
            for (int i = 0; i < 300; ++i)
                s.push_back({u(rng), u(rng), u(rng)});
            CHECK(is_valid(adapt_gmm(g, s, 0.05)));
        }
        SUBCASE("rate outside (0, 1) is rejected")
        {
            CHECK_THROWS_AS(adapt_gmm(g, {}, 0.0), InputError);
            CHECK_THROWS_AS(adapt_gmm(g, {}, 1.0), InputError);
        }
        SUBCASE("per-sample rate compounds to the frame rate")
        {
            const double a = per_sample_rate(0.1, 250);
            CHECK(std::pow(1.0 - a, 250) == doctest::Approx(0.9).epsilon(1e-12));
        }
    }
}
