#pragma once

#include <vector>

#include "roam/kernels/chain_dp.hpp"
#include "roam/region_integral.hpp"
#include "roam/state.hpp"

namespace roam {

enum class Exec { serial, parallel };

struct MoveWindow {
    int radius = 0;
    std::vector<Point> moves;  // lexicographic (x, then y); the zero move is at index D / 2
};
MoveWindow make_move_window(int radius);

struct EnergyBreakdown {
    double e_curve = 0.0;
    double e_land = 0.0;
    double e_joint = 0.0;
    double total = 0.0;
    std::vector<double> per_edge_loc;
    std::vector<double> per_edge_glob;  // already scaled by w_glob
};

/// Everything the energy needs for one frame besides the state itself.
struct FrameContext {
    const Frame* frame = nullptr;
    bool has_green = false;
    GreenField green;
    std::vector<CostMap> cost_maps;  // aligned with state.pool.landmarks
    int search_side = 61;
    std::vector<GmmEvaluator> local_fg, local_bg;  // aligned with state.local_models
    Exec exec = Exec::parallel;
};

FrameContext make_context(const Frame& frame, const TrackerState& state, std::vector<CostMap> cost_maps,
                          int search_side, Exec exec = Exec::parallel);
/// Rebuilds the per-edge evaluators after local_models changed.
void refresh_local_models(FrameContext& ctx, const TrackerState& state);
/// Rebuilds the green field after the global model changed.
void refresh_green(FrameContext& ctx, const TrackerState& state);

/// psi_loc for the edge a -> b with the given local model.
double local_edge_energy(const Frame& frame, Point a, Point b, const GmmEvaluator& fg, const GmmEvaluator& bg,
                         const Weights& weights);
double local_edge_energy(const Frame& frame, const RotoCurve& curve, std::size_t n, const FgBgModel& model,
                         const Weights& weights);

EnergyBreakdown total_energy(const TrackerState& state, const FrameContext& ctx);

/// out(y) = min_x f(x) + 0.5 |x - y|^2 over the grid; +inf entries are ignored.
/// If argmin is given it receives the minimizing x for every y.
Plane<double> gdt_quadratic(const Plane<double>& f, Plane<Point>* argmin = nullptr);

/// Star model on S x S offset grids (index S/2 is offset 0):
/// E = sum_m U_m(d_m) + spring * 0.5 |d_m - d_0|^2, minimized over d_0 and all d_m.
struct StarSolution {
    Point root;                // offset d_0
    std::vector<Point> leaves; // offsets d_m
    double energy = 0.0;
};
double star_energy(const std::vector<Plane<double>>& unaries, double spring, Point root,
                   const std::vector<Point>& leaves);
StarSolution solve_star(const std::vector<Plane<double>>& unaries, double spring);

/// Exact landmark step. Returns false (state untouched) when there is nothing to optimize.
bool infer_landmarks(TrackerState& state, const FrameContext& ctx, bool include_joint = true);

struct ContourResult {
    bool moved = false;
    bool fallback = false;
    double energy_before = 0.0;  // E^C + E^J of the input curve under the DP tables
    double energy_after = 0.0;
    RotoCurve dp_optimum;        // best branch before the simplicity filter
    double dp_optimum_cost = 0.0;
};

kernels::ChainTables build_contour_tables(const TrackerState& state, const FrameContext& ctx,
                                          const MoveWindow& window);
ContourResult infer_contour(TrackerState& state, const FrameContext& ctx, const MoveWindow& window);

struct AlternateResult {
    std::vector<double> trace;  // total energy before and after every block step
    int iterations = 0;
    bool converged = false;     // stopped on the tolerance rather than the iteration cap
};
AlternateResult alternate(TrackerState& state, const FrameContext& ctx, const MoveWindow& window, int max_iters,
                          double tol);

}  // namespace roam
