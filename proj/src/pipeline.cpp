#include "roam/pipeline.hpp"

#include <chrono>
#include <cmath>

namespace roam {

namespace {

constexpr std::size_t kMinRegionArea = 16;

std::vector<CostMap> match_landmarks(LandmarkPool& pool, const Frame& frame, const LandmarkParams& lp)
{
    std::vector<CostMap> maps;
    maps.reserve(pool.landmarks.size());
    for (auto& l : pool.landmarks) {
        maps.push_back(match_cost_map(l.filter, frame, l.prev_position, lp.search_side, lp.gain));
        l.psr = maps.back().psr;
        l.lost = !(l.psr >= lp.psr_threshold);
    }
    return maps;
}

// Best single-displacement hypothesis, refit as the mean over its inliers.
std::pair<Vec2, int> translation_consensus(const std::vector<Vec2>& prev, const std::vector<Vec2>& curr, double tol)
{
    Vec2 best{0.0, 0.0};
    int best_count = 0;
    for (std::size_t i = 0; i < prev.size(); ++i) {
        const Vec2 t = curr[i] - prev[i];
        Vec2 sum{0.0, 0.0};
        int count = 0;
        for (std::size_t j = 0; j < prev.size(); ++j) {
            const Vec2 r = curr[j] - prev[j] - t;
            if (r.x * r.x + r.y * r.y <= tol * tol) {
                sum = sum + (curr[j] - prev[j]);
                ++count;
            }
        }
        if (count > best_count) {
            best_count = count;
            best = sum * (1.0 / count);
        }
    }
    return {best, best_count};
}

void prewarp(TrackerState& state, const Frame& frame, const RunConfig& cfg)
{
    const int W = frame.width(), H = frame.height();
    if (cfg.warp == WarpMode::none || !state.weights.landmarks_active())
        return;
    if (cfg.warp == WarpMode::node_projection) {
        state.curve = warp_by_node_projection(state.curve, state.pool, W, H);
        return;
    }
    // RANSAC does its own outlier rejection, so low-PSR matches still get a vote here.
    std::vector<Vec2> prev, curr;
    for (const auto& l : state.pool.landmarks) {
        prev.push_back(to_vec(l.prev_position));
        curr.push_back(to_vec(l.position));
    }
    if (prev.size() < 2) {
        state.flags.warp_failed = true;
        return;
    }
    try {
        auto fit = estimate_similarity_ransac(prev, curr, cfg.seed + static_cast<std::uint64_t>(state.frame_index),
                                              cfg.ransac_tol, cfg.ransac_trials);
        // The similarity has to earn its extra freedom. Two inliers fit it exactly and check
        // nothing, and if a pure translation explains as many landmarks, scale and rotation are
        // noise. Either way only a translation is applied.
        int support = 0;
        Vec2 mean_shift{0.0, 0.0};
        for (std::size_t i = 0; i < prev.size(); ++i)
            if (fit.inliers[i]) {
                ++support;
                mean_shift = mean_shift + (curr[i] - prev[i]);
            }
        const auto [shift, shift_support] = translation_consensus(prev, curr, cfg.ransac_tol);
        if (support < 3 || shift_support >= support) {
            fit.transform = SimilarityTransform{};
            fit.transform.translation = support < 3 ? mean_shift * (1.0 / support) : shift;
        }
        state.curve = warp_curve(state.curve, fit.transform, W, H);
    } catch (const Error&) {
        state.flags.warp_failed = true;
    }
}

bool maybe_resample(TrackerState& state, const RunConfig& cfg, bool force)
{
    if (!force && !(edge_length_ratio(state.curve) > cfg.resample_ratio))
        return false;
    try {
        RotoCurve r = resample_curve(state.curve, cfg.vertex_spacing);
        if (r == state.curve || !is_clockwise(r))
            return false;
        replace_curve(state, std::move(r));
        return true;
    } catch (const GeometryError&) {
        return false;
    }
}

}  // namespace

RunConfig preset_config(Preset preset)
{
    RunConfig c;
    c.preset = preset;
    c.weights.mu = 0.01;
    c.weights.lambda = 60.0;
    c.weights.w_loc = 0.0;
    c.weights.w_glob = 0.0;
    c.weights.w_land = 0.0;
    c.weights.w_joint = 0.0;
    c.warp = WarpMode::none;
    c.topology_enabled = false;
    if (preset == Preset::baseline)
        return c;
    c.weights.w_loc = 1.0;
    if (preset == Preset::lean)
        return c;
    c.weights.w_land = 1.0;
    c.weights.w_joint = 1.0;
    c.warp = WarpMode::rigid_ransac;
    if (preset == Preset::medium)
        return c;
    c.weights.w_glob = 1.0;
    c.topology_enabled = true;
    return c;
}

std::set<std::string> enabled_terms(const RunConfig& cfg)
{
    std::set<std::string> t;
    if (cfg.weights.mu != 0.0)
        t.insert("stretch");
    if (cfg.weights.lambda != 0.0)
        t.insert("gradient");
    if (cfg.weights.w_loc != 0.0)
        t.insert("local_color");
    if (cfg.weights.w_glob != 0.0)
        t.insert("global_color");
    if (cfg.weights.w_land != 0.0)
        t.insert("landmarks");
    if (cfg.weights.w_joint != 0.0)
        t.insert("coupling");
    if (cfg.warp != WarpMode::none)
        t.insert("prewarp");
    if (cfg.topology_enabled)
        t.insert("topology");
    return t;
}

const char* preset_name(Preset p)
{
    switch (p) {
    case Preset::baseline: return "baseline";
    case Preset::lean: return "lean";
    case Preset::medium: return "medium";
    case Preset::full: return "full";
    }
    return "full";
}

Preset parse_preset(const std::string& name)
{
    for (Preset p : {Preset::baseline, Preset::lean, Preset::medium, Preset::full})
        if (name == preset_name(p))
            return p;
    throw InputError("unknown preset: " + name);
}

const char* warp_name(WarpMode m)
{
    switch (m) {
    case WarpMode::rigid_ransac: return "rigid";
    case WarpMode::node_projection: return "projection";
    case WarpMode::none: return "none";
    }
    return "none";
}

WarpMode parse_warp(const std::string& name)
{
    for (WarpMode m : {WarpMode::rigid_ransac, WarpMode::node_projection, WarpMode::none})
        if (name == warp_name(m))
            return m;
    throw InputError("unknown warp mode: " + name);
}

Metrics compute_metrics(const RegionMask& pred, const RegionMask& gt)
{
    if (pred.width() != gt.width() || pred.height() != gt.height())
        throw InputError("metric masks differ in size");
    std::size_t inter = 0, uni = 0, correct = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const bool p = pred.data()[i] != 0, g = gt.data()[i] != 0;
        inter += p && g;
        uni += p || g;
        correct += p == g;
    }
    Metrics m;
    m.accuracy = pred.size() ? static_cast<double>(correct) / static_cast<double>(pred.size()) : 1.0;
    m.iou = uni ? static_cast<double>(inter) / static_cast<double>(uni) : 1.0;
    return m;
}

TrackerState init_from_keyframe(const Frame& frame, const RotoCurve& curve, const RunConfig& cfg, int frame_index)
{
    const int W = frame.width(), H = frame.height();
    validate_curve(curve, W, H);
    if (!is_clockwise(curve))
        throw GeometryError("curve must be clockwise");
    TrackerState s;
    s.curve = curve;
    s.prev_curve = curve;
    s.weights = cfg.weights;
    s.frame_index = frame_index;
    const RegionMask mask = rasterize_region(curve, W, H);
    if (mask_area(mask) < kMinRegionArea)
        throw InputError("region too small to fit appearance models");
    s.global_model = fit_global_model(frame, mask, cfg.models);
    s.local_models = fit_local_models(frame, curve, mask, cfg.weights.support_w, cfg.models, s.global_model);
    if (cfg.weights.landmarks_active())
        s.pool = cull_and_repopulate(LandmarkPool{}, frame, mask, curve, cfg.landmarks);
    s.flags.no_landmarks = cfg.weights.landmarks_active() && s.pool.landmarks.empty();
    return s;
}

FrameResult keyframe_result(const TrackerState& state, const Frame& frame, const RunConfig& cfg)
{
    FrameResult r;
    r.frame_index = state.frame_index;
    r.curve = state.curve;
    r.mask = rasterize_region(state.curve, frame.width(), frame.height());
    TrackerState copy = state;
    std::vector<CostMap> maps;
    if (copy.weights.landmarks_active())
        maps = match_landmarks(copy.pool, frame, cfg.landmarks);
    const FrameContext ctx = make_context(frame, copy, std::move(maps), cfg.landmarks.search_side, cfg.exec);
    r.energy = total_energy(copy, ctx);
    r.trace = {r.energy.total};
    r.flags = state.flags;
    return r;
}

FrameResult step(TrackerState& state, const Frame& frame, const RunConfig& cfg)
{
    const auto t0 = std::chrono::steady_clock::now();
    const int W = frame.width(), H = frame.height();
    const TrackerState before = state;
    FrameResult r;
    r.frame_index = state.frame_index + 1;
    state.flags = StateFlags{};

    try {
        std::vector<CostMap> maps;
        if (state.weights.landmarks_active())
            maps = match_landmarks(state.pool, frame, cfg.landmarks);
        FrameContext ctx = make_context(frame, state, std::move(maps), cfg.landmarks.search_side, cfg.exec);

        if (state.weights.landmarks_active()) {
            infer_landmarks(state, ctx, false);
            prewarp(state, frame, cfg);
        }

        const MoveWindow window = make_move_window(cfg.move_radius);
        const double e0 = total_energy(state, ctx).total;
        const AlternateResult alt = alternate(state, ctx, window, cfg.max_iters, cfg.rel_tol * std::abs(e0));
        r.trace = alt.trace;
        r.iterations = alt.iterations;
        r.converged = alt.converged;

        bool force_resample = false;
        if (cfg.topology_enabled) {
            const TopologyResult topo = propose_and_accept(state, ctx, cfg.topology);
            r.topology_accepted = topo.accepted;
            force_resample = topo.accepted;
        }
        r.resampled = maybe_resample(state, cfg, force_resample);
        if (r.resampled)
            refresh_local_models(ctx, state);
        r.energy = total_energy(state, ctx);

        validate_curve(state.curve, W, H);
        RegionMask mask = rasterize_region(state.curve, W, H);
        if (mask_area(mask) < kMinRegionArea)
            throw GeometryError("region collapsed");

        auto adapt = [&] { adapt_models(state, frame, mask, cfg.models); };
        auto cull = [&] {
            if (state.weights.landmarks_active())
                state.pool = cull_and_repopulate(state.pool, frame, mask, state.curve, cfg.landmarks);
        };
        if (cfg.adapt_before_cull) {
            adapt();
            cull();
        } else {
            cull();
            adapt();
        }
        state.flags.no_landmarks = state.weights.landmarks_active() && state.pool.landmarks.empty();
        r.mask = std::move(mask);
    } catch (const GeometryError&) {
        const StateFlags flags = state.flags;
        state = before;
        state.flags = flags;
        state.flags.lost = true;
        r.mask = rasterize_unchecked(state.curve, W, H);
        r.energy = {};
    }

    state.prev_curve = before.curve;
    state.frame_index = r.frame_index;
    r.curve = state.curve;
    r.flags = state.flags;
    r.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

std::vector<FrameResult> track_sequence(const std::vector<Frame>& frames, const RotoCurve& init_curve,
                                        const RunConfig& cfg, const TrackOptions& opts)
{
    if (frames.size() < 2)
        throw InputError("tracking needs at least two frames");
    if (opts.start_frame < 0 || static_cast<std::size_t>(opts.start_frame) >= frames.size())
        throw InputError("start frame out of range");
    auto score = [&](FrameResult& r) {
        if (!opts.ground_truth || static_cast<std::size_t>(r.frame_index) >= opts.ground_truth->size())
            return;
        const RegionMask& gt = (*opts.ground_truth)[static_cast<std::size_t>(r.frame_index)];
        if (gt.empty())
            return;
        const Metrics m = compute_metrics(r.mask, gt);
        r.iou = m.iou;
        r.accuracy = m.accuracy;
    };

    std::vector<FrameResult> out;
    const auto k = static_cast<std::size_t>(opts.start_frame);
    TrackerState state = init_from_keyframe(frames[k], init_curve, cfg, opts.start_frame);
    out.push_back(keyframe_result(state, frames[k], cfg));
    score(out.back());
    if (opts.on_frame)
        opts.on_frame(out.back(), state);
    for (std::size_t i = k + 1; i < frames.size(); ++i) {
        if (opts.cancel && opts.cancel->load())
            break;
        out.push_back(step(state, frames[i], cfg));
        score(out.back());
        if (opts.on_frame)
            opts.on_frame(out.back(), state);
    }
    return out;
}

}  // namespace roam
