#include "roam/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "roam/kernels/likelihood.hpp"

namespace roam {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double bresenham_grad_sum(const Plane<double>& grad_sq, Point a, Point b)
{
    const int dx = std::abs(b.x - a.x);
    const int dy = -std::abs(b.y - a.y);
    const int sx = a.x < b.x ? 1 : -1;
    const int sy = a.y < b.y ? 1 : -1;
    int err = dx + dy;
    Point p = a;
    double acc = 0.0;
    while (p != b) {
        acc += grad_sq(p);
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            p.x += sx;
        }
        if (e2 <= dx) {
            err += dx;
            p.y += sy;
        }
    }
    return acc;
}

template <class NlF, class NlB>
double edge_energy(const Frame& frame, Point a, Point b, const Weights& w, NlF&& nlf, NlB&& nlb)
{
    if (a == b)
        return kInf;
    double color = 0.0;
    if (w.w_loc != 0.0) {
        double in = 0.0, out = 0.0;
        for (const SupportRow& r : support_rows(a, b, w.support_w, frame.width(), frame.height())) {
            for (int x = r.in_lo; x <= r.in_hi; ++x)
                in += nlf(x, r.y);
            for (int x = r.out_lo; x <= r.out_hi; ++x)
                out += nlb(x, r.y);
        }
        color = w.w_loc * (in + out);
    }
    const double len_sq = static_cast<double>(squared_norm(b - a));
    const double stretch = w.pure_l2 ? w.mu * len_sq : chain_length(a, b) * w.mu * len_sq;
    const double grad = w.lambda != 0.0 ? w.lambda * bresenham_grad_sum(frame.grad_sq(), a, b) : 0.0;
    return color + stretch - grad;
}

bool inside(const Frame& f, Point p) { return p.x >= 0 && p.y >= 0 && p.x < f.width() && p.y < f.height(); }

double xi(Point x, Point y, Point mu)
{
    const double dx = x.x - y.x - mu.x;
    const double dy = x.y - y.y - mu.y;
    return 0.5 * (dx * dx + dy * dy);
}

// (landmark position, mu) for every pairing that references vertex n.
std::vector<std::vector<std::pair<Point, Point>>> anchors_by_vertex(const TrackerState& state)
{
    std::vector<std::vector<std::pair<Point, Point>>> out(state.curve.size());
    for (const auto& l : state.pool.landmarks)
        for (const auto& p : l.pairings) {
            if (p.vertex < 0 || p.vertex >= static_cast<int>(state.curve.size()))
                throw InputError("landmark pairing references an invalid vertex");
            out[static_cast<std::size_t>(p.vertex)].push_back({l.position, p.mu});
        }
    return out;
}

void gdt_1d(const double* f, int n, double* out, int* arg, std::vector<int>& v, std::vector<double>& z)
{
    v.resize(static_cast<std::size_t>(n));
    z.resize(static_cast<std::size_t>(n) + 1);
    int k = -1;
    for (int q = 0; q < n; ++q) {
        if (!std::isfinite(f[q]))
            continue;
        if (k < 0) {
            k = 0;
            v[0] = q;
            z[0] = -kInf;
            z[1] = kInf;
            continue;
        }
        const double fq = f[q] + 0.5 * q * q;
        double s = 0.0;
        while (true) {
            const int vk = v[static_cast<std::size_t>(k)];
            s = (fq - (f[vk] + 0.5 * vk * vk)) / (q - vk);
            if (s <= z[static_cast<std::size_t>(k)] && k > 0)
                --k;
            else
                break;
        }
        ++k;
        v[static_cast<std::size_t>(k)] = q;
        z[static_cast<std::size_t>(k)] = s;
        z[static_cast<std::size_t>(k) + 1] = kInf;
    }
    if (k < 0) {
        for (int p = 0; p < n; ++p) {
            out[p] = kInf;
            arg[p] = -1;
        }
        return;
    }
    int j = 0;
    for (int p = 0; p < n; ++p) {
        while (z[static_cast<std::size_t>(j) + 1] < p)
            ++j;
        const int q = v[static_cast<std::size_t>(j)];
        arg[p] = q;
        out[p] = f[q] + 0.5 * (p - q) * (p - q);
    }
}

}  // namespace

MoveWindow make_move_window(int radius)
{
    if (radius < 0)
        throw InputError("move window radius must be non-negative");
    MoveWindow w;
    w.radius = radius;
    for (int dx = -radius; dx <= radius; ++dx)
        for (int dy = -radius; dy <= radius; ++dy)
            w.moves.push_back({dx, dy});
    return w;
}

FrameContext make_context(const Frame& frame, const TrackerState& state, std::vector<CostMap> cost_maps,
                          int search_side, Exec exec)
{
    FrameContext ctx;
    ctx.frame = &frame;
    ctx.cost_maps = std::move(cost_maps);
    ctx.search_side = search_side;
    ctx.exec = exec;
    refresh_green(ctx, state);
    refresh_local_models(ctx, state);
    return ctx;
}

void refresh_local_models(FrameContext& ctx, const TrackerState& state)
{
    ctx.local_fg.clear();
    ctx.local_bg.clear();
    for (const auto& m : state.local_models) {
        ctx.local_fg.emplace_back(m.fg);
        ctx.local_bg.emplace_back(m.bg);
    }
}

void refresh_green(FrameContext& ctx, const TrackerState& state)
{
    ctx.has_green = state.weights.w_glob != 0.0;
    if (!ctx.has_green)
        return;
    const GmmEvaluator fg(state.global_model.fg), bg(state.global_model.bg);
    Plane<double> ratio;
    if (ctx.exec == Exec::parallel)
        kernels::log_ratio_plane_omp(ctx.frame->rgb(), fg, bg, ratio);
    else
        kernels::log_ratio_plane_serial(ctx.frame->rgb(), fg, bg, ratio);
    ctx.green = green_field_from_ratio(ratio);
}

double local_edge_energy(const Frame& frame, Point a, Point b, const GmmEvaluator& fg, const GmmEvaluator& bg,
                         const Weights& weights)
{
    if (!inside(frame, a) || !inside(frame, b))
        throw GeometryError("edge outside the frame");
    if (a == b)
        throw GeometryError("edge with identical endpoints");
    const auto& rgb = frame.rgb();
    return edge_energy(
        frame, a, b, weights, [&](int x, int y) { return -fg.log_density(rgb(x, y)); },
        [&](int x, int y) { return -bg.log_density(rgb(x, y)); });
}

double local_edge_energy(const Frame& frame, const RotoCurve& curve, std::size_t n, const FgBgModel& model,
                         const Weights& weights)
{
    const auto [a, b] = curve.edge(n);
    return local_edge_energy(frame, a, b, GmmEvaluator(model.fg), GmmEvaluator(model.bg), weights);
}

EnergyBreakdown total_energy(const TrackerState& state, const FrameContext& ctx)
{
    const Frame& frame = *ctx.frame;
    const Weights& w = state.weights;
    const std::size_t N = state.curve.size();
    if (ctx.local_fg.size() != N || state.local_models.size() != N)
        throw InputError("local model count does not match the curve");

    EnergyBreakdown e;
    e.per_edge_loc.resize(N);
    e.per_edge_glob.assign(N, 0.0);
    for (std::size_t n = 0; n < N; ++n) {
        const auto [a, b] = state.curve.edge(n);
        e.per_edge_loc[n] = local_edge_energy(frame, a, b, ctx.local_fg[n], ctx.local_bg[n], w);
        if (w.w_glob != 0.0 && ctx.has_green)
            e.per_edge_glob[n] = w.w_glob * global_edge_cost(ctx.green, a, b);
        e.e_curve += e.per_edge_loc[n] + e.per_edge_glob[n];
    }

    const auto& lms = state.pool.landmarks;
    if (w.w_land != 0.0) {
        if (ctx.cost_maps.size() != lms.size())
            throw InputError("cost maps do not match the landmark pool");
        const Point d0 = state.pool.root_shift;
        for (std::size_t m = 0; m < lms.size(); ++m) {
            const Point y = lms[m].position;
            const double phi = ctx.cost_maps[m].contains(y) ? ctx.cost_maps[m].at(y) : kInf;
            const double dx = y.x - lms[m].prev_position.x - d0.x;
            const double dy = y.y - lms[m].prev_position.y - d0.y;
            e.e_land += w.w_land * (phi + 0.5 * (dx * dx + dy * dy));
        }
    }
    if (w.w_joint != 0.0) {
        for (const auto& l : lms)
            for (const auto& p : l.pairings) {
                if (p.vertex < 0 || p.vertex >= static_cast<int>(N))
                    throw InputError("landmark pairing references an invalid vertex");
                e.e_joint += w.w_joint * xi(state.curve[static_cast<std::size_t>(p.vertex)], l.position, p.mu);
            }
    }
    e.total = e.e_curve + e.e_land + e.e_joint;
    return e;
}

Plane<double> gdt_quadratic(const Plane<double>& f, Plane<Point>* argmin)
{
    const int W = f.width(), H = f.height();
    Plane<double> pass(W, H), out(W, H);
    Plane<int> arg_x(W, H), arg_y(W, H);
    std::vector<int> v;
    std::vector<double> z;
    for (int y = 0; y < H; ++y)
        gdt_1d(f.row(y), W, pass.row(y), arg_x.row(y), v, z);
    std::vector<double> col(static_cast<std::size_t>(H)), col_out(static_cast<std::size_t>(H));
    std::vector<int> col_arg(static_cast<std::size_t>(H));
    for (int x = 0; x < W; ++x) {
        for (int y = 0; y < H; ++y)
            col[static_cast<std::size_t>(y)] = pass(x, y);
        gdt_1d(col.data(), H, col_out.data(), col_arg.data(), v, z);
        for (int y = 0; y < H; ++y)
            arg_y(x, y) = col_arg[static_cast<std::size_t>(y)];
    }
    if (argmin)
        *argmin = Plane<Point>(W, H);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            const int sy = arg_y(x, y);
            if (sy < 0) {
                out(x, y) = kInf;
                if (argmin)
                    (*argmin)(x, y) = {-1, -1};
                continue;
            }
            const int sx = arg_x(x, sy);
            const double dx = x - sx, dy = y - sy;
            out(x, y) = f(sx, sy) + 0.5 * (dx * dx + dy * dy);
            if (argmin)
                (*argmin)(x, y) = {sx, sy};
        }
    return out;
}

double star_energy(const std::vector<Plane<double>>& unaries, double spring, Point root,
                   const std::vector<Point>& leaves)
{
    double e = 0.0;
    for (std::size_t m = 0; m < unaries.size(); ++m) {
        const Point d = leaves[m];
        const double dx = d.x - root.x, dy = d.y - root.y;
        e += unaries[m](d) + spring * 0.5 * (dx * dx + dy * dy);
    }
    return e;
}

StarSolution solve_star(const std::vector<Plane<double>>& unaries, double spring)
{
    StarSolution sol;
    if (unaries.empty())
        return sol;
    const int W = unaries[0].width(), H = unaries[0].height();
    for (const auto& u : unaries)
        if (u.width() != W || u.height() != H)
            throw InputError("solve_star: unary grids differ in size");
    sol.root = {W / 2, H / 2};

    if (spring == 0.0) {
        for (const auto& u : unaries) {
            Point best{0, 0};
            double bv = kInf;
            for (int x = 0; x < W; ++x)
                for (int y = 0; y < H; ++y)
                    if (u(x, y) < bv) {
                        bv = u(x, y);
                        best = {x, y};
                    }
            sol.leaves.push_back(best);
        }
        sol.energy = star_energy(unaries, spring, sol.root, sol.leaves);
        return sol;
    }

    Plane<double> root_cost(W, H, 0.0);
    std::vector<Plane<Point>> args(unaries.size());
    for (std::size_t m = 0; m < unaries.size(); ++m) {
        Plane<double> scaled = unaries[m];
        for (double& v : scaled.data())
            v /= spring;
        const Plane<double> g = gdt_quadratic(scaled, &args[m]);
        for (std::size_t i = 0; i < g.size(); ++i)
            root_cost.data()[i] += spring * g.data()[i];
    }
    double bv = kInf;
    for (int x = 0; x < W; ++x)
        for (int y = 0; y < H; ++y)
            if (root_cost(x, y) < bv) {
                bv = root_cost(x, y);
                sol.root = {x, y};
            }
    if (!std::isfinite(bv)) {
        sol.energy = kInf;
        return sol;
    }
    for (std::size_t m = 0; m < unaries.size(); ++m)
        sol.leaves.push_back(args[m](sol.root));
    sol.energy = star_energy(unaries, spring, sol.root, sol.leaves);
    return sol;
}

bool infer_landmarks(TrackerState& state, const FrameContext& ctx, bool include_joint)
{
    auto& lms = state.pool.landmarks;
    const Weights& w = state.weights;
    if (lms.empty()) {
        state.flags.no_landmarks = true;
        return false;
    }
    const bool joint = include_joint && w.w_joint != 0.0;
    if (w.w_land == 0.0 && !joint)
        return false;
    if (ctx.cost_maps.size() != lms.size())
        throw InputError("cost maps do not match the landmark pool");

    const int S = ctx.search_side, R = S / 2;
    const Frame& frame = *ctx.frame;
    std::vector<Plane<double>> unaries;
    unaries.reserve(lms.size());
    for (std::size_t m = 0; m < lms.size(); ++m) {
        Plane<double> u(S, S, kInf);
        const Landmark& l = lms[m];
        const CostMap& map = ctx.cost_maps[m];
        for (int j = 0; j < S; ++j)
            for (int i = 0; i < S; ++i) {
                const Point y{l.prev_position.x + i - R, l.prev_position.y + j - R};
                if (!inside(frame, y) || !map.contains(y))
                    continue;
                double v = w.w_land != 0.0 ? w.w_land * map.at(y) : 0.0;
                if (joint)
                    for (const auto& p : l.pairings) {
                        if (p.vertex < 0 || p.vertex >= static_cast<int>(state.curve.size()))
                            throw InputError("landmark pairing references an invalid vertex");
                        v += w.w_joint * xi(state.curve[static_cast<std::size_t>(p.vertex)], y, p.mu);
                    }
                u(i, j) = v;
            }
        unaries.push_back(std::move(u));
    }
    const StarSolution sol = solve_star(unaries, w.w_land);
    if (!std::isfinite(sol.energy))
        return false;
    state.pool.root_shift = {sol.root.x - R, sol.root.y - R};
    for (std::size_t m = 0; m < lms.size(); ++m)
        lms[m].position = {lms[m].prev_position.x + sol.leaves[m].x - R, lms[m].prev_position.y + sol.leaves[m].y - R};
    return true;
}

kernels::ChainTables build_contour_tables(const TrackerState& state, const FrameContext& ctx,
                                          const MoveWindow& window)
{
    const Frame& frame = *ctx.frame;
    const Weights& w = state.weights;
    const RotoCurve& curve = state.curve;
    const int N = static_cast<int>(curve.size());
    const int D = static_cast<int>(window.moves.size());
    if (static_cast<int>(ctx.local_fg.size()) != N)
        throw InputError("local model count does not match the curve");
    kernels::ChainTables t(N, D);

    const auto anchors = w.w_joint != 0.0 ? anchors_by_vertex(state)
                                          : std::vector<std::vector<std::pair<Point, Point>>>(curve.size());
    for (int n = 0; n < N; ++n)
        for (int i = 0; i < D; ++i) {
            const Point x = curve[static_cast<std::size_t>(n)] + window.moves[static_cast<std::size_t>(i)];
            if (!inside(frame, x)) {
                t.unary(n, i) = kInf;
                continue;
            }
            double u = 0.0;
            for (const auto& [y, mu] : anchors[static_cast<std::size_t>(n)])
                u += w.w_joint * xi(x, y, mu);
            t.unary(n, i) = u;
        }

    const int r = window.radius;
    const int margin = r + w.support_w + 2;
    const bool parallel = ctx.exec == Exec::parallel;
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int n = 0; n < N; ++n) {
        const auto [a0, b0] = curve.edge(static_cast<std::size_t>(n));
        kernels::Roi roi;
        roi.x0 = std::max(std::min(a0.x, b0.x) - margin, 0);
        roi.y0 = std::max(std::min(a0.y, b0.y) - margin, 0);
        roi.width = std::min(std::max(a0.x, b0.x) + margin, frame.width() - 1) - roi.x0 + 1;
        roi.height = std::min(std::max(a0.y, b0.y) + margin, frame.height() - 1) - roi.y0 + 1;
        Plane<double> nlf, nlb;
        if (w.w_loc != 0.0) {
            kernels::neg_log_plane_serial(frame.rgb(), ctx.local_fg[static_cast<std::size_t>(n)], roi, nlf);
            kernels::neg_log_plane_serial(frame.rgb(), ctx.local_bg[static_cast<std::size_t>(n)], roi, nlb);
        }
        auto f = [&](int x, int y) { return nlf(x - roi.x0, y - roi.y0); };
        auto b = [&](int x, int y) { return nlb(x - roi.x0, y - roi.y0); };
        for (int i = 0; i < D; ++i) {
            const Point a = a0 + window.moves[static_cast<std::size_t>(i)];
            for (int j = 0; j < D; ++j) {
                const Point bb = b0 + window.moves[static_cast<std::size_t>(j)];
                if (!inside(frame, a) || !inside(frame, bb) || a == bb) {
                    t.pairwise(n, i, j) = kInf;
                    continue;
                }
                double c = edge_energy(frame, a, bb, w, f, b);
                if (w.w_glob != 0.0 && ctx.has_green)
                    c += w.w_glob * global_edge_cost(ctx.green, a, bb);
                t.pairwise(n, i, j) = c;
            }
        }
    }
    return t;
}

ContourResult infer_contour(TrackerState& state, const FrameContext& ctx, const MoveWindow& window)
{
    ContourResult res;
    const int N = static_cast<int>(state.curve.size());
    const int D = static_cast<int>(window.moves.size());
    const auto zero_it = std::find(window.moves.begin(), window.moves.end(), Point{0, 0});
    if (zero_it == window.moves.end())
        throw InputError("move window lacks the zero move");
    const int zero = static_cast<int>(zero_it - window.moves.begin());

    const kernels::ChainTables t = build_contour_tables(state, ctx, window);
    const double current = kernels::chain_cost(t, std::vector<int>(static_cast<std::size_t>(N), zero));
    res.energy_before = res.energy_after = current;
    res.dp_optimum = state.curve;
    res.dp_optimum_cost = current;

    const auto branches = ctx.exec == Exec::parallel ? kernels::chain_dp_omp(t) : kernels::chain_dp_serial(t);
    std::vector<int> order(static_cast<std::size_t>(D));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return branches[static_cast<std::size_t>(a)].cost < branches[static_cast<std::size_t>(b)].cost;
    });

    auto apply = [&](const kernels::Branch& br) {
        std::vector<Point> v(static_cast<std::size_t>(N));
        for (int n = 0; n < N; ++n)
            v[static_cast<std::size_t>(n)] =
                state.curve[static_cast<std::size_t>(n)] + window.moves[static_cast<std::size_t>(br.labels[static_cast<std::size_t>(n)])];
        return RotoCurve(std::move(v));
    };

    const auto& best = branches[static_cast<std::size_t>(order[0])];
    if (std::isfinite(best.cost)) {
        res.dp_optimum = apply(best);
        res.dp_optimum_cost = best.cost;
    }
    bool accepted = false;
    for (int idx : order) {
        const auto& br = branches[static_cast<std::size_t>(idx)];
        if (!(br.cost <= current))
            break;
        RotoCurve cand = apply(br);
        if (!is_simple(cand) || signed_area2(cand) <= 0)
            continue;
        res.moved = !(cand == state.curve);
        res.energy_after = br.cost;
        state.curve = std::move(cand);
        accepted = true;
        break;
    }
    res.fallback = !accepted && best.cost < current;
    state.flags.dp_fallback = res.fallback;
    return res;
}

AlternateResult alternate(TrackerState& state, const FrameContext& ctx, const MoveWindow& window, int max_iters,
                          double tol)
{
    AlternateResult res;
    double prev = total_energy(state, ctx).total;
    res.trace.push_back(prev);
    for (int it = 1; it <= max_iters; ++it) {
        if (state.weights.landmarks_active() && infer_landmarks(state, ctx, true))
            res.trace.push_back(total_energy(state, ctx).total);
        infer_contour(state, ctx, window);
        const double e = total_energy(state, ctx).total;
        res.trace.push_back(e);
        res.iterations = it;
        const double gain = prev - e;
        if (!(gain >= tol) || !(gain > 0.0)) {
            res.converged = true;
            break;
        }
        prev = e;
    }
    return res;
}

}  // namespace roam
