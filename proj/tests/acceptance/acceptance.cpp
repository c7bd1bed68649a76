// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any criterion fails.
// Tolerances and instance counts are fixed here.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "roam/benchmark.hpp"
#include "roam/inference.hpp"
#include "roam/io.hpp"
#include "roam/region_integral.hpp"
#include "roam/synthetic.hpp"

namespace fs = std::filesystem;
using namespace roam;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int g_failures = 0;

void report(bool pass, const char* name, const std::string& detail)
{
    std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", name, detail.c_str());
    std::fflush(stdout);
    g_failures += !pass;
}

class Stopwatch {
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

void green_exactness()
{
    Stopwatch sw;
    std::mt19937_64 rng(101);
    double worst = 0.0;
    for (int it = 0; it < 1000; ++it) {
        const int W = 8 + static_cast<int>(rng() % 121), H = 8 + static_cast<int>(rng() % 121);
        const Plane<double> field = oracle::random_field(rng, W, H, -6, 6);
        const RotoCurve c = oracle::random_simple_polygon(rng, W, H, 16);
        const GreenField gf = green_field_from_ratio(field);
        double s = 0.0;
        for (std::size_t n = 0; n < c.size(); ++n)
            s += global_edge_cost(gf, c, n);
        worst = std::max(worst, std::abs(s - oracle::region_sum(field, oracle::raycast_mask(c, W, H))));
    }
    const double t = sw.seconds();
    report(worst <= 1e-9 && t < 30.0, "green_exactness",
           fmt("1000 polygons, max |edge sum - region sum| = %.3g (tol 1e-9), %.1f s (limit 30)", worst, t));
}

Frame noise_frame(std::mt19937_64& rng, int W, int H)
{
    std::uniform_real_distribution<double> u(0, 1);
    Plane<Color> rgb(W, H);
    for (Color& c : rgb.data())
        c = {u(rng), u(rng), u(rng)};
    return Frame(std::move(rgb));
}

// Curve energy plus joint terms of `curve` under the frame context.
double curve_energy(TrackerState st, const FrameContext& ctx, const RotoCurve& curve)
{
    st.curve = curve;
    const EnergyBreakdown e = total_energy(st, ctx);
    return e.e_curve + e.e_joint;
}

void contour_dp_oracle()
{
    Stopwatch sw;
    std::mt19937_64 rng(202);
    RunConfig cfg = preset_config(Preset::lean);
    cfg.weights.w_glob = 1.0;
    int instances = 0, table_mismatch = 0, energy_checked = 0, energy_mismatch = 0;
    double worst_rel = 0.0;
    while (instances < 200) {
        const int W = 40, H = 36;
        const Frame f = noise_frame(rng, W, H);
        RotoCurve c = oracle::random_simple_polygon(rng, W, H, 5);
        TrackerState st;
        try {
            st = init_from_keyframe(f, c, cfg, 0);
        } catch (const std::exception&) {
            continue;  // region too small to fit models
        }
        ++instances;
        const FrameContext ctx = make_context(f, st, {}, cfg.landmarks.search_side, Exec::serial);
        const MoveWindow window = make_move_window(rng() % 5 == 0 ? 0 : 1);
        const kernels::ChainTables tables = build_contour_tables(st, ctx, window);
        TrackerState work = st;
        const ContourResult r = infer_contour(work, ctx, window);
        table_mismatch += r.dp_optimum_cost != oracle::chain_min(tables);

        // Exhaustive enumeration of the real energy over every joint move, where that is
        // affordable. Larger instances rely on the table enumeration above.
        const std::size_t N = c.size(), D = window.moves.size();
        if (std::pow(static_cast<double>(D), static_cast<double>(N)) > 6561.0)
            continue;
        ++energy_checked;
        std::vector<std::size_t> label(N, 0);
        double best = kInf;
        for (;;) {
            std::vector<Point> v(c.vertices().begin(), c.vertices().end());
            bool inside = true;
            for (std::size_t n = 0; n < N; ++n) {
                v[n] = v[n] + window.moves[label[n]];
                inside = inside && v[n].x >= 0 && v[n].y >= 0 && v[n].x < W && v[n].y < H;
            }
            if (inside) {
                try {
                    best = std::min(best, curve_energy(st, ctx, RotoCurve(v)));
                } catch (const GeometryError&) {
                    // collapsed edge, not a valid configuration
                }
            }
            std::size_t k = 0;
            while (k < N && ++label[k] == D)
                label[k++] = 0;
            if (k == N)
                break;
        }
        const double rel = std::abs(r.dp_optimum_cost - best) / std::max(1.0, std::abs(best));
        worst_rel = std::max(worst_rel, rel);
        energy_mismatch += rel > 1e-9;
    }
    const double t = sw.seconds();
    report(table_mismatch == 0 && energy_mismatch == 0 && t < 60.0, "contour_dp_oracle",
           fmt("200 instances (N<=5, D<=9): %d mismatches against table enumeration; %d of %d against "
               "real-energy enumeration, worst rel %.2g (tol 1e-9); %.1f s (limit 60)",
               table_mismatch, energy_mismatch, energy_checked, worst_rel, t));
}

void landmark_gdt_oracle()
{
    Stopwatch sw;
    std::mt19937_64 rng(303);
    int star_mismatch = 0;
    double gdt_worst = 0.0;
    for (int it = 0; it < 200; ++it) {
        const int M = 1 + static_cast<int>(rng() % 3);
        const int S = 3 + static_cast<int>(rng() % 10);  // S x S <= 144 states
        std::vector<Plane<double>> u;
        for (int m = 0; m < M; ++m) {
            Plane<double> p(S, S);
            for (double& v : p.data())
                v = static_cast<double>(static_cast<int>(rng() % 41) - 20);
            u.push_back(std::move(p));
        }
        const double spring = static_cast<double>(1 + rng() % 3);
        const StarSolution s = solve_star(u, spring);
        star_mismatch += s.energy != oracle::star_brute(u, spring) || star_energy(u, spring, s.root, s.leaves) != s.energy;

        Plane<double> f(S, S);
        std::uniform_real_distribution<double> ud(-50, 50);
        for (double& v : f.data())
            v = rng() % 7 == 0 ? kInf : ud(rng);
        f(static_cast<int>(rng() % S), static_cast<int>(rng() % S)) = ud(rng);
        const Plane<double> fast = gdt_quadratic(f), slow = oracle::gdt_brute(f);
        for (std::size_t i = 0; i < fast.data().size(); ++i)
            gdt_worst = std::max(gdt_worst, std::abs(fast.data()[i] - slow.data()[i]));
    }
    const double t = sw.seconds();
    report(star_mismatch == 0 && gdt_worst <= 1e-9 && t < 60.0, "landmark_gdt_oracle",
           fmt("200 instances (M<=3, S<=144): %d star mismatches, gdt max err %.3g (tol 1e-9), %.1f s (limit 60)",
               star_mismatch, gdt_worst, t));
}

void maxflow_oracle()
{
    Stopwatch sw;
    std::mt19937_64 rng(404);
    int mismatch = 0;
    for (int it = 0; it < 500; ++it) {
        const int n = 1 + static_cast<int>(rng() % 12);
        FlowGraph g(n);
        for (int u = 0; u < n; ++u)
            g.add_terminal(u, static_cast<double>(rng() % 10), static_cast<double>(rng() % 10));
        const int arcs = static_cast<int>(rng() % (3 * n + 1));
        for (int k = 0; k < arcs; ++k) {
            const int u = static_cast<int>(rng() % n), v = static_cast<int>(rng() % n);
            if (u != v)
                g.add_edge(u, v, static_cast<double>(rng() % 7), static_cast<double>(rng() % 7));
        }
        const MinCut c = max_flow_min_cut(g);
        const double brute = oracle::min_cut_brute(g);
        mismatch += c.flow != brute || oracle::cut_of(g, c.source_side) != brute;
    }
    const double t = sw.seconds();
    report(mismatch == 0 && t < 30.0, "maxflow_oracle",
           fmt("500 graphs (<=12 nodes): %d mismatches, %.1f s (limit 30)", mismatch, t));
}

void energy_monotonicity()
{
    constexpr int kSequences = 20, kFrames = 8;
    const RunConfig cfg = preset_config(Preset::full);
    int frames = 0, rises = 0, unconverged = 0, max_iters = 0;
    double worst_rise = 0.0;
    const auto suite = benchmark_suite(4040);
    for (int s = 0; s < kSequences; ++s) {
        SceneSpec spec = suite[static_cast<std::size_t>(s) % suite.size()];
        spec.seed += static_cast<std::uint64_t>(s);
        spec.frames = kFrames;
        const SyntheticSequence seq = make_sequence(spec);
        const auto results = track_sequence(seq.frames, seq.init_curve, cfg);
        for (std::size_t i = 1; i < results.size(); ++i) {
            const FrameResult& r = results[i];
            ++frames;
            for (std::size_t k = 1; k < r.trace.size(); ++k) {
                const double rise = r.trace[k] - r.trace[k - 1];
                worst_rise = std::max(worst_rise, rise);
                rises += rise > 1e-9;
            }
            unconverged += !r.converged;
            max_iters = std::max(max_iters, r.iterations);
        }
    }
    report(rises == 0 && unconverged == 0 && max_iters <= 10, "energy_monotonicity",
           fmt("%d sequences, %d frames: %d rises above 1e-9 (worst %.3g), %d hit the cap, max %d iterations (limit 10)",
               kSequences, frames, rises, worst_rise, unconverged, max_iters));
}

std::vector<SyntheticSequence> bundled_suite()
{
    std::vector<SyntheticSequence> suite;
    for (const SceneSpec& s : benchmark_suite())
        suite.push_back(make_sequence(s));
    return suite;
}

void ablation_and_warp()
{
    const auto suite = bundled_suite();
    Stopwatch sw;
    const auto rows = run_ablation(suite, preset_config(Preset::full));
    const double t = sw.seconds();
    std::printf("%s", format_table(rows).c_str());
    const double b = rows[0].mean_iou, l = rows[1].mean_iou, m = rows[2].mean_iou, f = rows[3].mean_iou;
    report(b <= l && l <= m && m <= f && f - b >= 0.05 && t < 600.0, "ablation_ordering",
           fmt("baseline %.3f <= lean %.3f <= medium %.3f <= full %.3f, full - baseline %.3f (min 0.05), %.0f s (limit 600)",
               b, l, m, f, f - b, t));

    // Medium has no topology proposals, which would re-detect the object and hide the warp's effect.
    const auto warp = run_warp_comparison(suite, SceneKind::large_displacement, preset_config(Preset::medium));
    std::printf("%s", format_table(warp).c_str());
    const double rigid = warp[0].mean_iou, proj = warp[1].mean_iou, none = warp[2].mean_iou;
    report(rigid >= proj && proj >= none && rigid >= none, "warp_comparison",
           fmt("rigid %.3f >= projection %.3f >= none %.3f", rigid, proj, none));
}

void em_monotonicity()
{
    std::mt19937_64 rng(505);
    int violations = 0;
    double worst = 0.0;
    for (int it = 0; it < 100; ++it) {
        const int clusters = 1 + static_cast<int>(rng() % 4);
        std::vector<Color> centers(static_cast<std::size_t>(clusters));
        std::uniform_real_distribution<double> u(0, 1);
        for (Color& c : centers)
            c = {u(rng), u(rng), u(rng)};
        const double spread = 0.01 + 0.1 * u(rng);
        std::normal_distribution<double> nd(0, spread);
        std::vector<Color> samples(20 + rng() % 400);
        for (Color& s : samples) {
            const Color& c = centers[rng() % centers.size()];
            s = {c[0] + nd(rng), c[1] + nd(rng), c[2] + nd(rng)};
        }
        EmTrace trace;
        fit_gmm(samples, 1 + static_cast<int>(rng() % 5), rng(), {}, &trace);
        for (std::size_t k = 1; k < trace.size(); ++k) {
            const double drop = trace[k - 1] - trace[k];
            worst = std::max(worst, drop);
            violations += drop > 1e-9;
        }
    }
    report(violations == 0, "em_monotonicity",
           fmt("100 fits: %d decreases above 1e-9 (largest %.3g)", violations, worst));
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void determinism()
{
    const fs::path root = fs::temp_directory_path() / ("roam_accept_" + std::to_string(::getpid()));
    fs::remove_all(root);
    SceneSpec spec;
    spec.kind = SceneKind::occluder;
    spec.seed = 2224;
    spec.frames = 10;
    write_sequence(root / "seq", make_sequence(spec));
    int codes[2];
    for (int run = 0; run < 2; ++run) {
        const std::string cmd = std::string("'") + ROAM_CLI_PATH + "' track --seed 7 --no-timing --frames '" +
                                (root / "seq" / "frames").string() + "' --init '" +
                                (root / "seq" / "init_curve.json").string() + "' --gt '" +
                                (root / "seq" / "gt").string() + "' --out '" +
                                (root / ("run" + std::to_string(run))).string() + "' >/dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        codes[run] = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }
    int compared = 0, differ = 0;
    if (codes[0] == 0 && codes[1] == 0) {
        std::vector<fs::path> files = {"metrics.csv"};
        for (const auto& e : fs::directory_iterator(root / "run0" / "curves"))
            files.push_back(fs::path("curves") / e.path().filename());
        for (const fs::path& rel : files) {
            ++compared;
            const fs::path other = root / "run1" / rel;
            differ += !fs::exists(other) || slurp(root / "run0" / rel) != slurp(other);
        }
    }
    fs::remove_all(root);
    report(codes[0] == 0 && codes[1] == 0 && compared > 1 && differ == 0, "determinism",
           fmt("two track runs (exit %d, %d): %d files compared, %d differ", codes[0], codes[1], compared, differ));
}

void performance_envelope()
{
    SceneSpec spec;
    spec.width = 640;
    spec.height = 480;
    spec.frames = 8;
    const SyntheticSequence seq = make_sequence(spec);
    const auto results = track_sequence(seq.frames, seq.init_curve, preset_config(Preset::baseline));
    std::vector<double> ms;
    for (std::size_t i = 1; i < results.size(); ++i)
        ms.push_back(results[i].ms);
    std::sort(ms.begin(), ms.end());
    const double median = ms[ms.size() / 2] / 1000.0;
    // Soft: logged, never fails the run.
    std::printf("%s performance_envelope: baseline median %.3f s/frame at 640x480 (soft limit 0.5)\n",
                median <= 0.5 ? "PASS" : "WARN", median);
}

}  // namespace

int main()
{
    green_exactness();
    contour_dp_oracle();
    landmark_gdt_oracle();
    maxflow_oracle();
    em_monotonicity();
    energy_monotonicity();
    determinism();
    performance_envelope();
    ablation_and_warp();
    std::printf("%d criteria failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
