#include "roam/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "roam/io.hpp"

namespace roam {

namespace {

constexpr double kPi = std::numbers::pi;

struct Grating {
    double kx, ky, phase, amp;
    Color tint;
};

struct Spot {
    Vec2 c;
    double radius;
    Color color;
};

struct Scene {
    Color bg_base, fg_base;
    std::vector<Grating> bg_gratings, fg_gratings;
    std::vector<Spot> bg_spots, fg_spots;  // fg spots live in object coordinates
    double r0 = 30.0;
    double a1 = 0.0, a2 = 0.0, p1 = 0.0, p2 = 0.0, omega = 0.0;
    Vec2 pos, vel;
    double theta = 0.0, spin = 0.0;
    double bar_x = 0.0, bar_speed = 0.0, bar_width = 0.0;
    bool occluder = false;

    double radius(double phi, int t) const
    {
        return r0 * (1.0 + a1 * std::sin(3.0 * phi + p1) + a2 * std::sin(5.0 * phi + p2 + omega * t));
    }
};

double uniform(std::mt19937_64& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Color random_color(std::mt19937_64& rng, double lo, double hi)
{
    return {uniform(rng, lo, hi), uniform(rng, lo, hi), uniform(rng, lo, hi)};
}

Color texture(const Color& base, const std::vector<Grating>& gr, const std::vector<Spot>& spots, Vec2 p)
{
    Color c = base;
    for (const auto& g : gr) {
        const double s = g.amp * std::sin(g.kx * p.x + g.ky * p.y + g.phase);
        for (int k = 0; k < 3; ++k)
            c[static_cast<std::size_t>(k)] += s * g.tint[static_cast<std::size_t>(k)];
    }
    for (const auto& s : spots) {
        const Vec2 d = p - s.c;
        const double a = std::exp(-(d.x * d.x + d.y * d.y) / (2.0 * s.radius * s.radius));
        for (int k = 0; k < 3; ++k)
            c[static_cast<std::size_t>(k)] += a * (s.color[static_cast<std::size_t>(k)] - c[static_cast<std::size_t>(k)]);
    }
    return c;
}

std::vector<Grating> gratings(std::mt19937_64& rng, int n, double amp, double freq_lo, double freq_hi)
{
    std::vector<Grating> out;
    for (int i = 0; i < n; ++i) {
        const double f = uniform(rng, freq_lo, freq_hi), a = uniform(rng, 0.0, kPi);
        out.push_back({f * std::cos(a), f * std::sin(a), uniform(rng, 0.0, 2 * kPi), amp,
                       random_color(rng, 0.5, 1.0)});
    }
    return out;
}

Scene make_scene(const SceneSpec& spec, std::mt19937_64& rng)
{
    Scene s;
    // Object and background colors are kept apart in hue but overlap in texture range.
    s.bg_base = random_color(rng, 0.25, 0.55);
    s.fg_base = s.bg_base;
    const int ch = static_cast<int>(rng() % 3);
    s.fg_base[static_cast<std::size_t>(ch)] = std::min(1.0, s.fg_base[static_cast<std::size_t>(ch)] + uniform(rng, 0.25, 0.35));
    s.fg_base[static_cast<std::size_t>((ch + 1) % 3)] -= uniform(rng, 0.05, 0.15);
    s.bg_gratings = gratings(rng, 3, 0.07, 0.05, 0.25);
    s.fg_gratings = gratings(rng, 2, 0.03, 0.15, 0.35);
    for (int i = 0; i < 5; ++i)
        s.bg_spots.push_back({{uniform(rng, 0, spec.width), uniform(rng, 0, spec.height)}, uniform(rng, 5, 10),
                              random_color(rng, 0.1, 0.9)});

    const bool fast = spec.kind == SceneKind::large_displacement;
    s.r0 = fast ? uniform(rng, 42, 46) : uniform(rng, 44, 50);
    // Dark and bright interior spots give the landmark detector stable extremal regions.
    for (int i = 0; i < 30; ++i) {
        const double a = uniform(rng, 0, 2 * kPi), d = uniform(rng, 0, 0.6 * s.r0);
        const bool dark = i % 2 == 0;
        s.fg_spots.push_back({{d * std::cos(a), d * std::sin(a)}, uniform(rng, 2.5, 4.5),
                              dark ? random_color(rng, 0.0, 0.2) : random_color(rng, 0.8, 1.0)});
    }
    s.a1 = uniform(rng, 0.08, 0.18);
    s.p1 = uniform(rng, 0, 2 * kPi);
    s.p2 = uniform(rng, 0, 2 * kPi);
    s.a2 = spec.kind == SceneKind::deforming ? uniform(rng, 0.05, 0.1) : 0.03;
    s.omega = uniform(rng, 0.15, 0.3);
    const double margin = 1.4 * s.r0;
    s.pos = {uniform(rng, margin, spec.width - margin), uniform(rng, margin, spec.height - margin)};
    const double speed = fast ? uniform(rng, 9.0, 12.0) : uniform(rng, 2.0, 3.5);
    const double heading = uniform(rng, 0, 2 * kPi);
    s.vel = {speed * std::cos(heading), speed * std::sin(heading)};
    s.theta = uniform(rng, 0, 2 * kPi);
    s.spin = uniform(rng, -0.03, 0.03);
    if (spec.kind == SceneKind::occluder) {
        s.occluder = true;
        s.vel = s.vel * 0.5;
        s.bar_width = uniform(rng, 10, 14);
        s.bar_speed = uniform(rng, 5.0, 7.0);
        s.bar_x = s.pos.x - s.bar_speed * 8.0 - s.r0;
    }
    return s;
}

// Moves the object one frame, bouncing off the borders.
void advance(Scene& s, const SceneSpec& spec)
{
    s.pos = s.pos + s.vel;
    const double m = 1.3 * s.r0;
    if (s.pos.x < m || s.pos.x > spec.width - m) {
        s.vel.x = -s.vel.x;
        s.pos.x = std::clamp(s.pos.x, m, spec.width - m);
    }
    if (s.pos.y < m || s.pos.y > spec.height - m) {
        s.vel.y = -s.vel.y;
        s.pos.y = std::clamp(s.pos.y, m, spec.height - m);
    }
    s.theta += s.spin;
    s.bar_x += s.bar_speed;
}

Vec2 to_object(const Scene& s, Vec2 p)
{
    const Vec2 d = p - s.pos;
    const double c = std::cos(-s.theta), sn = std::sin(-s.theta);
    return {c * d.x - sn * d.y, sn * d.x + c * d.y};
}

}  // namespace

const char* scene_kind_name(SceneKind k)
{
    switch (k) {
    case SceneKind::deforming: return "deforming";
    case SceneKind::large_displacement: return "large_displacement";
    case SceneKind::occluder: return "occluder";
    }
    return "deforming";
}

SyntheticSequence make_sequence(const SceneSpec& spec)
{
    if (spec.width < 32 || spec.height < 32 || spec.frames < 1)
        throw InputError("synthetic scene too small");
    std::mt19937_64 rng(spec.seed);
    Scene s = make_scene(spec, rng);
    std::normal_distribution<double> noise(0.0, 0.015);

    SyntheticSequence seq;
    seq.kind = spec.kind;
    char name[64];
    std::snprintf(name, sizeof name, "%s_%llu", scene_kind_name(spec.kind), static_cast<unsigned long long>(spec.seed));
    seq.name = name;

    const int W = spec.width, H = spec.height;
    for (int t = 0; t < spec.frames; ++t) {
        if (t > 0)
            advance(s, spec);
        std::vector<std::uint8_t> rgb(static_cast<std::size_t>(W) * H * 3);
        RegionMask gt(W, H, 0);
        for (int y = 0; y < H; ++y)
            for (int x = 0; x < W; ++x) {
                const Vec2 p{x + 0.5, y + 0.5};
                const Vec2 q = to_object(s, p);
                const double rho = std::hypot(q.x, q.y);
                const double phi = std::atan2(q.y, q.x);
                const bool in_obj = rho < s.radius(phi, t);
                const bool in_bar = s.occluder && std::abs(p.x - s.bar_x) < 0.5 * s.bar_width;
                Color c = in_obj && !in_bar ? texture(s.fg_base, s.fg_gratings, s.fg_spots, q)
                                            : texture(s.bg_base, s.bg_gratings, s.bg_spots, p);
                gt(x, y) = in_obj && !in_bar;
                const std::size_t i = (static_cast<std::size_t>(y) * W + x) * 3;
                for (int k = 0; k < 3; ++k) {
                    const double v = std::clamp(c[static_cast<std::size_t>(k)] + noise(rng), 0.0, 1.0);
                    rgb[i + static_cast<std::size_t>(k)] = static_cast<std::uint8_t>(std::lround(v * 255.0));
                }
            }
        seq.frames.push_back(Frame::from_rgb8(W, H, rgb));
        seq.ground_truth.push_back(std::move(gt));

        if (t == 0) {
            double perim = 0.0;
            const int fine = 256;
            auto outline = [&](double phi) {
                const double r = s.radius(phi, 0);
                const double c = std::cos(s.theta), sn = std::sin(s.theta);
                const Vec2 o{r * std::cos(phi), r * std::sin(phi)};
                return Vec2{s.pos.x + c * o.x - sn * o.y, s.pos.y + sn * o.x + c * o.y};
            };
            for (int k = 0; k < fine; ++k) {
                const Vec2 d = outline(2 * kPi * (k + 1) / fine) - outline(2 * kPi * k / fine);
                perim += std::hypot(d.x, d.y);
            }
            const int n = std::max(8, static_cast<int>(std::lround(perim / 10.0)));
            std::vector<Point> v;
            for (int k = 0; k < n; ++k) {
                const Vec2 p = outline(2 * kPi * k / n);
                v.push_back({std::clamp(static_cast<int>(std::lround(p.x)), 0, W - 1),
                             std::clamp(static_cast<int>(std::lround(p.y)), 0, H - 1)});
            }
            seq.init_curve = make_clockwise(RotoCurve(std::move(v)));
        }
    }
    return seq;
}

std::vector<SceneSpec> benchmark_suite(std::uint64_t seed)
{
    std::vector<SceneSpec> out;
    for (int i = 0; i < 4; ++i)
        out.push_back({SceneKind::deforming, seed + static_cast<std::uint64_t>(i)});
    for (int i = 0; i < 3; ++i)
        out.push_back({SceneKind::large_displacement, seed + 100 + static_cast<std::uint64_t>(i)});
    for (int i = 0; i < 3; ++i)
        out.push_back({SceneKind::occluder, seed + 200 + static_cast<std::uint64_t>(i)});
    return out;
}

void write_sequence(const std::filesystem::path& dir, const SyntheticSequence& seq)
{
    std::filesystem::create_directories(dir / "frames");
    std::filesystem::create_directories(dir / "gt");
    for (std::size_t t = 0; t < seq.frames.size(); ++t) {
        char name[32];
        std::snprintf(name, sizeof name, "%05zu.png", t);
        save_frame_png(dir / "frames" / name, seq.frames[t]);
        save_mask_png(dir / "gt" / name, seq.ground_truth[t]);
    }
    write_curve_doc(dir / "init_curve.json", {0, seq.init_curve});
}

}  // namespace roam
