#include "roam/state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace roam {

namespace {

std::vector<Color> stride_subsample(std::vector<Color> v, std::size_t max_samples)
{
    if (max_samples == 0 || v.size() <= max_samples)
        return v;
    const std::size_t stride = (v.size() + max_samples - 1) / max_samples;
    std::vector<Color> out;
    out.reserve(v.size() / stride + 1);
    for (std::size_t i = 0; i < v.size(); i += stride)
        out.push_back(v[i]);
    return out;
}

std::vector<Color> colors_of(const Frame& frame, const std::vector<Point>& pixels)
{
    std::vector<Color> out;
    out.reserve(pixels.size());
    for (Point p : pixels)
        out.push_back(frame.rgb()(p));
    return out;
}

constexpr std::size_t kMaxLocalSamples = 1500;

// Keeps the samples the current pair already assigns to the requested side. Adapting on
// everything lets a slightly misplaced boundary teach each side the other side's colors.
std::vector<Color> confident(const std::vector<Color>& samples, const FgBgModel& m, bool fg)
{
    const GmmEvaluator f(m.fg), b(m.bg);
    std::vector<Color> out;
    out.reserve(samples.size());
    for (const Color& c : samples) {
        const double d = f.log_density(c) - b.log_density(c);
        if (fg ? d > 0.0 : d < 0.0)
            out.push_back(c);
    }
    return out;
}

Vec2 edge_midpoint(const RotoCurve& c, std::size_t n)
{
    const auto [a, b] = c.edge(n);
    return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
}

}  // namespace

std::vector<Color> mask_samples(const Frame& frame, const RegionMask& mask, bool inside, std::size_t max_samples)
{
    if (mask.width() != frame.width() || mask.height() != frame.height())
        throw InputError("mask_samples: mask and frame sizes differ");
    std::vector<Color> all;
    for (int y = 0; y < frame.height(); ++y)
        for (int x = 0; x < frame.width(); ++x)
            if ((mask(x, y) != 0) == inside)
                all.push_back(frame.rgb()(x, y));
    return stride_subsample(std::move(all), max_samples);
}

FgBgModel fit_global_model(const Frame& frame, const RegionMask& mask, const ModelParams& params)
{
    const auto fg = mask_samples(frame, mask, true, params.max_global_samples);
    const auto bg = mask_samples(frame, mask, false, params.max_global_samples);
    if (fg.empty() || bg.empty())
        throw InputError("region too small to fit appearance models");
    return {fit_gmm(fg, params.k_global, params.seed), fit_gmm(bg, params.k_global, params.seed + 1)};
}

FgBgModel fit_local_model(const Frame& frame, const RotoCurve& curve, std::size_t n, const RegionMask& mask,
                          int support_w, const ModelParams& params, const FgBgModel& fallback)
{
    const EdgeSupport s = edge_support(curve, n, support_w, frame.width(), frame.height(), &mask);
    const auto in = stride_subsample(colors_of(frame, s.inside_pixels), kMaxLocalSamples);
    const auto out = stride_subsample(colors_of(frame, s.outside_pixels), kMaxLocalSamples);
    const std::uint64_t seed = params.seed + 1000 + 2 * static_cast<std::uint64_t>(n);
    FgBgModel m;
    m.fg = in.empty() ? fallback.fg : fit_gmm(in, params.k_local, seed);
    m.bg = out.empty() ? fallback.bg : fit_gmm(out, params.k_local, seed + 1);
    return m;
}

std::vector<FgBgModel> fit_local_models(const Frame& frame, const RotoCurve& curve, const RegionMask& mask,
                                        int support_w, const ModelParams& params, const FgBgModel& fallback)
{
    std::vector<FgBgModel> out(curve.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t n = 0; n < static_cast<std::ptrdiff_t>(curve.size()); ++n)
        out[static_cast<std::size_t>(n)] =
            fit_local_model(frame, curve, static_cast<std::size_t>(n), mask, support_w, params, fallback);
    return out;
}

void adapt_models(TrackerState& state, const Frame& frame, const RegionMask& mask, const ModelParams& params)
{
    auto adapt = [&](Gmm& g, const std::vector<Color>& samples, int k) {
        if (samples.empty())
            return;
        // A fitted mixture gets one extra empty slot, so unmatched samples land there instead of
        // evicting the weakest fitted mode on their first appearance.
        if (params.spare_slot && g.components() == static_cast<std::size_t>(k))
            add_empty_component(g);
        g = adapt_gmm(g, samples, per_sample_rate(params.alpha, samples.size()));
    };
    const FgBgModel global = state.global_model;
    adapt(state.global_model.fg, confident(mask_samples(frame, mask, true, params.max_global_samples), global, true),
          params.k_global);
    adapt(state.global_model.bg, confident(mask_samples(frame, mask, false, params.max_global_samples), global, false),
          params.k_global);
    if (!params.adapt_local)
        return;
    const RotoCurve& curve = state.curve;
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t n = 0; n < static_cast<std::ptrdiff_t>(curve.size()); ++n) {
        const auto i = static_cast<std::size_t>(n);
        const EdgeSupport s =
            edge_support(curve, i, state.weights.support_w, frame.width(), frame.height(), &mask);
        const FgBgModel local = state.local_models[i];
        adapt(state.local_models[i].fg,
              confident(stride_subsample(colors_of(frame, s.inside_pixels), kMaxLocalSamples), local, true),
              params.k_local);
        adapt(state.local_models[i].bg,
              confident(stride_subsample(colors_of(frame, s.outside_pixels), kMaxLocalSamples), local, false),
              params.k_local);
    }
}

std::vector<std::size_t> nearest_old_edges(const RotoCurve& old_curve, const RotoCurve& new_curve)
{
    std::vector<Vec2> old_mid(old_curve.size());
    for (std::size_t n = 0; n < old_curve.size(); ++n)
        old_mid[n] = edge_midpoint(old_curve, n);
    std::vector<std::size_t> out(new_curve.size(), 0);
    for (std::size_t n = 0; n < new_curve.size(); ++n) {
        const Vec2 m = edge_midpoint(new_curve, n);
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < old_mid.size(); ++k) {
            const Vec2 d = old_mid[k] - m;
            const double dd = d.x * d.x + d.y * d.y;
            if (dd < best) {
                best = dd;
                out[n] = k;
            }
        }
    }
    return out;
}

void remap_pairings(LandmarkPool& pool, const RotoCurve& old_curve, const RotoCurve& new_curve)
{
    for (Landmark& lm : pool.landmarks) {
        std::vector<Pairing> remapped;
        for (const Pairing& p : lm.pairings) {
            if (p.vertex < 0 || static_cast<std::size_t>(p.vertex) >= old_curve.size())
                continue;
            const Point x_old = old_curve[static_cast<std::size_t>(p.vertex)];
            int best = 0;
            long long best_d = std::numeric_limits<long long>::max();
            for (std::size_t k = 0; k < new_curve.size(); ++k) {
                const long long d = squared_norm(new_curve[k] - x_old);
                if (d < best_d) {
                    best_d = d;
                    best = static_cast<int>(k);
                }
            }
            const bool dup = std::any_of(remapped.begin(), remapped.end(),
                                         [&](const Pairing& q) { return q.vertex == best; });
            if (dup)
                continue;
            const Point x_new = new_curve[static_cast<std::size_t>(best)];
            remapped.push_back({best, p.mu + (x_new - x_old)});
        }
        lm.pairings = std::move(remapped);
    }
}

void replace_curve(TrackerState& state, RotoCurve new_curve)
{
    const auto map = nearest_old_edges(state.curve, new_curve);
    std::vector<FgBgModel> models(new_curve.size());
    for (std::size_t n = 0; n < map.size(); ++n)
        models[n] = state.local_models[map[n]];
    remap_pairings(state.pool, state.curve, new_curve);
    state.local_models = std::move(models);
    state.curve = std::move(new_curve);
}

double edge_length_ratio(const RotoCurve& curve)
{
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t n = 0; n < curve.size(); ++n) {
        const auto [a, b] = curve.edge(n);
        const double l = std::sqrt(static_cast<double>(squared_norm(b - a)));
        lo = std::min(lo, l);
        hi = std::max(hi, l);
    }
    return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

double mean_edge_length(const RotoCurve& curve)
{
    return curve.size() == 0 ? 0.0 : perimeter(curve) / static_cast<double>(curve.size());
}

}  // namespace roam
