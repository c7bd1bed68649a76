#include "roam/topology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/boykov_kolmogorov_max_flow.hpp>

namespace roam {

namespace {

using Traits = boost::adjacency_list_traits<boost::vecS, boost::vecS, boost::directedS>;
struct ArcProps {
    double cap = 0.0;
    double residual = 0.0;
    Traits::edge_descriptor reverse;
};
using BkGraph = boost::adjacency_list<boost::vecS, boost::vecS, boost::directedS, boost::no_property, ArcProps>;

void add_pair(BkGraph& g, std::size_t u, std::size_t v, double cap, double rev_cap)
{
    const auto e = boost::add_edge(u, v, g).first;
    const auto r = boost::add_edge(v, u, g).first;
    g[e].cap = cap;
    g[r].cap = rev_cap;
    g[e].reverse = r;
    g[r].reverse = e;
}

double sq_color_diff(const Color& a, const Color& b)
{
    const double d0 = a[0] - b[0], d1 = a[1] - b[1], d2 = a[2] - b[2];
    return d0 * d0 + d1 * d1 + d2 * d2;
}

// Corners of a crack outline expanded into unit steps.
std::vector<Point> unit_steps(const RotoCurve& c)
{
    std::vector<Point> out;
    for (std::size_t n = 0; n < c.size(); ++n) {
        const auto [a, b] = c.edge(n);
        const int len = std::max(std::abs(b.x - a.x), std::abs(b.y - a.y));
        const Point d{(b.x > a.x) - (b.x < a.x), (b.y > a.y) - (b.y < a.y)};
        for (int k = 0; k < len; ++k)
            out.push_back({a.x + k * d.x, a.y + k * d.y});
    }
    return out;
}

std::size_t nearest_index(const std::vector<Point>& pts, Point q)
{
    std::size_t best = 0;
    long long best_d = std::numeric_limits<long long>::max();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const long long d = squared_norm(pts[i] - q);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

std::optional<RotoCurve> finalize(std::vector<Point> v, int W, int H)
{
    for (Point& p : v) {
        p.x = std::clamp(p.x, 0, W - 1);
        p.y = std::clamp(p.y, 0, H - 1);
    }
    std::vector<Point> dedup;
    for (Point p : v)
        if (dedup.empty() || dedup.back() != p)
            dedup.push_back(p);
    while (dedup.size() > 1 && dedup.back() == dedup.front())
        dedup.pop_back();
    RotoCurve c(std::move(dedup));
    if (c.size() < 3 || !is_simple(c) || !is_clockwise(c))
        return std::nullopt;
    return c;
}

// Whole-outline re-trace at the current vertex spacing.
std::optional<RotoCurve> global_retrace(const RotoCurve& outline, double spacing, int W, int H)
{
    try {
        const RotoCurve r = resample_curve(outline, std::max(spacing, 1.0));
        return finalize(r.vertices(), W, H);
    } catch (const GeometryError&) {
        return std::nullopt;
    }
}

// Replaces the vertices near the edited component by a stretch of the new outline, keeping the
// rest of the curve (and its vertex indices' models) intact.
std::optional<RotoCurve> local_retrace(const RotoCurve& curve, const RotoCurve& outline, const RegionMask& component,
                                       double spacing, int W, int H)
{
    const std::size_t N = curve.size();
    const RegionMask near = dilate(component, 2);
    auto touches = [&](Point v) {
        for (int dy = -1; dy <= 0; ++dy)
            for (int dx = -1; dx <= 0; ++dx)
                if (near.contains(v.x + dx, v.y + dy) && near(v.x + dx, v.y + dy))
                    return true;
        return false;
    };
    std::vector<bool> affected(N);
    std::size_t count = 0;
    for (std::size_t n = 0; n < N; ++n)
        if ((affected[n] = touches(curve[n])))
            ++count;

    std::size_t a = 0, b = 0;  // kept anchors; the replaced stretch lies strictly between them
    if (count == 0) {
        // Edit between two vertices: splice into the edge nearest the component.
        double best = std::numeric_limits<double>::infinity();
        for (int y = 0; y < component.height(); ++y)
            for (int x = 0; x < component.width(); ++x) {
                if (!component(x, y))
                    continue;
                for (std::size_t n = 0; n < N; ++n) {
                    const auto [p, q] = curve.edge(n);
                    const double d = point_segment_distance_sq({x + 0.5, y + 0.5}, to_vec(p), to_vec(q));
                    if (d < best) {
                        best = d;
                        a = n;
                    }
                }
            }
        b = (a + 1) % N;
    } else {
        if (N - count < 2)
            return std::nullopt;
        // Longest cyclic run of unaffected vertices; the affected arc is its complement.
        std::size_t best_len = 0, best_start = 0;
        for (std::size_t s = 0; s < N; ++s) {
            if (affected[s] || !affected[(s + N - 1) % N])
                continue;
            std::size_t len = 0;
            while (len < N && !affected[(s + len) % N])
                ++len;
            if (len > best_len) {
                best_len = len;
                best_start = s;
            }
        }
        if (best_len < 2)
            return std::nullopt;
        b = best_start;
        a = (best_start + best_len - 1) % N;
    }

    const std::vector<Point> steps = unit_steps(outline);
    if (steps.empty())
        return std::nullopt;
    const std::size_t ia = nearest_index(steps, curve[a]);
    const std::size_t ib = nearest_index(steps, curve[b]);
    const std::size_t S = steps.size();
    const std::size_t path = (ib + S - ia) % S;
    if (path == 0)
        return std::nullopt;

    std::vector<Point> v;
    // kept arc: b, b+1, ..., a
    for (std::size_t k = b;; k = (k + 1) % N) {
        v.push_back(curve[k]);
        if (k == a)
            break;
    }
    const int inserted = std::max(0, static_cast<int>(std::lround(path / spacing)) - 1);
    for (int j = 1; j <= inserted; ++j) {
        const std::size_t off = static_cast<std::size_t>(std::lround(static_cast<double>(j) * path / (inserted + 1)));
        v.push_back(steps[(ia + off) % S]);
    }
    return finalize(std::move(v), W, H);
}

}  // namespace

int FlowGraph::add_node()
{
    source_.push_back(0.0);
    sink_.push_back(0.0);
    return nodes() - 1;
}

void FlowGraph::add_edge(int u, int v, double cap, double rev_cap)
{
    if (u < 0 || v < 0 || u >= nodes() || v >= nodes() || u == v)
        throw InputError("FlowGraph: invalid arc endpoints");
    if (!(cap >= 0.0) || !(rev_cap >= 0.0) || !std::isfinite(cap) || !std::isfinite(rev_cap))
        throw InputError("FlowGraph: capacities must be finite and non-negative");
    arcs_.push_back({u, v, cap, rev_cap});
}

void FlowGraph::add_terminal(int u, double source_cap, double sink_cap)
{
    if (u < 0 || u >= nodes())
        throw InputError("FlowGraph: invalid node");
    if (!(source_cap >= 0.0) || !(sink_cap >= 0.0) || !std::isfinite(source_cap) || !std::isfinite(sink_cap))
        throw InputError("FlowGraph: capacities must be finite and non-negative");
    source_[static_cast<std::size_t>(u)] += source_cap;
    sink_[static_cast<std::size_t>(u)] += sink_cap;
}

double cut_capacity(const FlowGraph& graph, const std::vector<bool>& source_side)
{
    double c = 0.0;
    for (int u = 0; u < graph.nodes(); ++u)
        c += source_side[static_cast<std::size_t>(u)] ? graph.sink_cap(u) : graph.source_cap(u);
    for (const auto& a : graph.arcs()) {
        const bool su = source_side[static_cast<std::size_t>(a.from)];
        const bool sv = source_side[static_cast<std::size_t>(a.to)];
        if (su && !sv)
            c += a.cap;
        else if (sv && !su)
            c += a.rev_cap;
    }
    return c;
}

MinCut max_flow_min_cut(const FlowGraph& graph)
{
    const std::size_t n = static_cast<std::size_t>(graph.nodes());
    const std::size_t s = n, t = n + 1;
    BkGraph g(n + 2);
    for (const auto& a : graph.arcs())
        add_pair(g, static_cast<std::size_t>(a.from), static_cast<std::size_t>(a.to), a.cap, a.rev_cap);
    for (std::size_t u = 0; u < n; ++u) {
        const double cs = graph.source_cap(static_cast<int>(u));
        const double ct = graph.sink_cap(static_cast<int>(u));
        if (cs > 0.0)
            add_pair(g, s, u, cs, 0.0);
        if (ct > 0.0)
            add_pair(g, u, t, ct, 0.0);
    }

    std::vector<boost::default_color_type> color(n + 2);
    std::vector<Traits::edge_descriptor> pred(n + 2);
    std::vector<long> dist(n + 2);
    const auto idx = boost::get(boost::vertex_index, g);
    MinCut out;
    out.flow = boost::boykov_kolmogorov_max_flow(
        g, boost::get(&ArcProps::cap, g), boost::get(&ArcProps::residual, g), boost::get(&ArcProps::reverse, g),
        boost::make_iterator_property_map(pred.begin(), idx), boost::make_iterator_property_map(color.begin(), idx),
        boost::make_iterator_property_map(dist.begin(), idx), idx, s, t);
    out.source_side.resize(n);
    for (std::size_t u = 0; u < n; ++u)
        out.source_side[u] = color[u] == boost::black_color;
    out.cut_value = cut_capacity(graph, out.source_side);
    return out;
}

InstrumentalGraph instrumental_energy_graph(const Frame& frame, const TrackerState& state, const RegionMask& band_in,
                                            const TopologyParams& params)
{
    const int W = frame.width(), H = frame.height();
    InstrumentalGraph ig;
    ig.band = band_in.empty() ? RegionMask(W, H, 1) : band_in;
    const RegionMask& band = ig.band;
    if (band.width() != W || band.height() != H)
        throw InputError("band and frame sizes differ");

    Plane<int> node(W, H, -1);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x)
            if (band(x, y)) {
                node(x, y) = static_cast<int>(ig.pixels.size());
                ig.pixels.push_back({x, y});
            }
    const std::size_t P = ig.pixels.size();
    ig.graph = FlowGraph(static_cast<int>(P));

    const auto& rgb = frame.rgb();
    double sum = 0.0;
    std::size_t pairs = 0;
    for (Point p : ig.pixels) {
        if (p.x + 1 < W && band(p.x + 1, p.y)) {
            sum += sq_color_diff(rgb(p), rgb(p.x + 1, p.y));
            ++pairs;
        }
        if (p.y + 1 < H && band(p.x, p.y + 1)) {
            sum += sq_color_diff(rgb(p), rgb(p.x, p.y + 1));
            ++pairs;
        }
    }
    ig.beta = pairs > 0 && sum > 0.0 ? static_cast<double>(pairs) / sum : 0.0;

    // Unaries: nearest edge's local model near the curve, global model elsewhere.
    const GmmEvaluator gfg(state.global_model.fg), gbg(state.global_model.bg);
    std::vector<GmmEvaluator> lfg, lbg;
    for (const auto& m : state.local_models) {
        lfg.emplace_back(m.fg);
        lbg.emplace_back(m.bg);
    }
    const double reach = static_cast<double>(params.local_factor) * state.weights.support_w;
    const double reach_sq = reach * reach;
    const RotoCurve& curve = state.curve;
    std::vector<double> to_src(P), to_snk(P);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(P); ++i) {
        const Point p = ig.pixels[static_cast<std::size_t>(i)];
        const Vec2 c{p.x + 0.5, p.y + 0.5};
        double best = std::numeric_limits<double>::infinity();
        std::size_t edge = 0;
        for (std::size_t n = 0; n < curve.size() && !lfg.empty(); ++n) {
            const auto [a, b] = curve.edge(n);
            const double d = point_segment_distance_sq(c, to_vec(a), to_vec(b));
            if (d < best) {
                best = d;
                edge = n;
            }
        }
        const bool local = best <= reach_sq;
        const double dfg = -(local ? lfg[edge] : gfg).log_density(rgb(p));
        const double dbg = -(local ? lbg[edge] : gbg).log_density(rgb(p));
        // Source side is foreground: s->p is cut for background, p->t for foreground.
        to_src[static_cast<std::size_t>(i)] = std::max(0.0, dbg - dfg);
        to_snk[static_cast<std::size_t>(i)] = std::max(0.0, dfg - dbg);
    }

    for (std::size_t i = 0; i < P; ++i) {
        const Point p = ig.pixels[i];
        double snk = to_snk[i];
        const Point nb[4] = {{p.x + 1, p.y}, {p.x, p.y + 1}, {p.x - 1, p.y}, {p.x, p.y - 1}};
        for (int k = 0; k < 4; ++k) {
            const Point q = nb[k];
            if (!node.contains(q))
                continue;
            const double wt = params.gamma * std::exp(-ig.beta * sq_color_diff(rgb(p), rgb(q)));
            if (node(q) < 0)
                snk += wt;  // neighbor fixed to background
            else if (k < 2 && wt > 0.0)
                ig.graph.add_edge(static_cast<int>(i), node(q), wt, wt);
        }
        ig.graph.add_terminal(static_cast<int>(i), to_src[i], snk);
    }
    return ig;
}

RegionMask propose_mask(const Frame& frame, const TrackerState& state, const TopologyParams& params)
{
    const int W = frame.width(), H = frame.height();
    const RegionMask region = rasterize_unchecked(state.curve, W, H);
    const RegionMask band = dilate(region, params.band_factor * state.weights.support_w);
    const InstrumentalGraph ig = instrumental_energy_graph(frame, state, band, params);
    const MinCut cut = max_flow_min_cut(ig.graph);
    RegionMask out(W, H, 0);
    for (std::size_t i = 0; i < ig.pixels.size(); ++i)
        if (cut.source_side[i])
            out(ig.pixels[i]) = 1;
    return out;
}

TopologyResult apply_proposal(TrackerState& state, FrameContext& ctx, const RegionMask& proposed,
                              const TopologyParams& params)
{
    const Frame& frame = *ctx.frame;
    const int W = frame.width(), H = frame.height();
    TopologyResult res;
    res.energy_before = res.energy_after = total_energy(state, ctx).total;

    const RegionMask region = rasterize_unchecked(state.curve, W, H);
    RegionMask diff(W, H, 0);
    for (std::size_t i = 0; i < diff.size(); ++i)
        diff.data()[i] = region.data()[i] != proposed.data()[i];
    int ncomp = 0;
    const Plane<int> labels = label_components(diff, &ncomp);
    std::vector<std::size_t> area(static_cast<std::size_t>(ncomp) + 1, 0);
    for (int l : labels.data())
        ++area[static_cast<std::size_t>(l)];
    const double min_area = params.area_fraction * static_cast<double>(mask_area(region));
    std::vector<int> order;
    for (int l = 1; l <= ncomp; ++l)
        if (static_cast<double>(area[static_cast<std::size_t>(l)]) >= min_area)
            order.push_back(l);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return area[static_cast<std::size_t>(a)] > area[static_cast<std::size_t>(b)];
    });

    for (int l : order) {
        ++res.edits_tried;
        RegionMask comp(W, H, 0);
        for (std::size_t i = 0; i < comp.size(); ++i)
            comp.data()[i] = labels.data()[i] == l;
        RegionMask edited = rasterize_unchecked(state.curve, W, H);
        for (std::size_t i = 0; i < edited.size(); ++i)
            if (comp.data()[i])
                edited.data()[i] = proposed.data()[i];
        edited = fill_holes(largest_component(edited));
        if (mask_area(edited) == 0)
            continue;
        const auto outline = trace_boundary(edited);
        if (!outline || outline->size() < 3)
            continue;

        const double spacing = mean_edge_length(state.curve);
        std::vector<RotoCurve> candidates;
        if (auto c = local_retrace(state.curve, *outline, comp, spacing, W, H))
            candidates.push_back(std::move(*c));
        if (auto c = global_retrace(*outline, spacing, W, H))
            candidates.push_back(std::move(*c));

        std::map<std::pair<Point, Point>, std::size_t> old_edges;
        for (std::size_t n = 0; n < state.curve.size(); ++n)
            old_edges.emplace(state.curve.edge(n), n);

        const auto saved_fg = ctx.local_fg, saved_bg = ctx.local_bg;
        std::optional<TrackerState> best;
        double best_e = res.energy_after;
        for (RotoCurve& cand : candidates) {
            if (cand == state.curve)
                continue;
            TrackerState trial = state;
            // Unchanged edges keep their models, new ones inherit from the nearest old edge.
            trial.local_models.assign(cand.size(), FgBgModel{});
            const auto nearest = nearest_old_edges(state.curve, cand);
            for (std::size_t n = 0; n < cand.size(); ++n) {
                const auto it = old_edges.find(cand.edge(n));
                trial.local_models[n] = state.local_models[it != old_edges.end() ? it->second : nearest[n]];
            }
            remap_pairings(trial.pool, state.curve, cand);
            trial.curve = std::move(cand);
            refresh_local_models(ctx, trial);
            const double e = total_energy(trial, ctx).total;
            if (e < best_e) {
                best_e = e;
                best = std::move(trial);
            }
        }
        if (best) {
            state = std::move(*best);
            res.energy_after = best_e;
            ++res.edits_accepted;
            res.accepted = true;
            refresh_local_models(ctx, state);
        } else {
            ctx.local_fg = saved_fg;
            ctx.local_bg = saved_bg;
        }
    }
    return res;
}

TopologyResult propose_and_accept(TrackerState& state, FrameContext& ctx, const TopologyParams& params)
{
    const RegionMask proposed = propose_mask(*ctx.frame, state, params);
    return apply_proposal(state, ctx, proposed, params);
}

}  // namespace roam
