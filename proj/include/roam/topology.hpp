#pragma once

#include <vector>

#include "roam/inference.hpp"
#include "roam/state.hpp"

namespace roam {

/// Directed graph with source/sink terminal capacities per node.
class FlowGraph {
public:
    struct Arc {
        int from, to;
        double cap, rev_cap;
    };

    explicit FlowGraph(int nodes = 0) : source_(static_cast<std::size_t>(nodes), 0.0), sink_(source_) {}

    int nodes() const { return static_cast<int>(source_.size()); }
    int add_node();
    /// Arc u -> v with capacity cap and v -> u with rev_cap.
    void add_edge(int u, int v, double cap, double rev_cap = 0.0);
    /// Adds to the s -> u (paid when u ends on the sink side) and u -> t capacities.
    void add_terminal(int u, double source_cap, double sink_cap);

    const std::vector<Arc>& arcs() const { return arcs_; }
    double source_cap(int u) const { return source_[static_cast<std::size_t>(u)]; }
    double sink_cap(int u) const { return sink_[static_cast<std::size_t>(u)]; }

private:
    std::vector<Arc> arcs_;
    std::vector<double> source_, sink_;
};

struct MinCut {
    double flow = 0.0;
    double cut_value = 0.0;       // capacity of the cut recomputed from the labels
    std::vector<bool> source_side;
};

/// Boykov-Kolmogorov max-flow. source_side[u] is true for nodes reachable from the source in the
/// residual graph.
MinCut max_flow_min_cut(const FlowGraph& graph);

/// Capacity of the s-t cut induced by the labels (true = source side).
double cut_capacity(const FlowGraph& graph, const std::vector<bool>& source_side);

struct TopologyParams {
    double gamma = 10.0;
    double area_fraction = 0.005;  // minimum XOR component area relative to |R|
    int band_factor = 4;           // graph band = dilation of R by band_factor * w
    int local_factor = 2;          // local models used within local_factor * w of the curve
};

/// Pixel-labeling graph over the band; source side = foreground.
struct InstrumentalGraph {
    FlowGraph graph;
    std::vector<Point> pixels;  // node -> pixel
    RegionMask band;
    double beta = 0.0;
};

/// The band mask may be empty, meaning the whole frame.
InstrumentalGraph instrumental_energy_graph(const Frame& frame, const TrackerState& state, const RegionMask& band,
                                            const TopologyParams& params);

/// Min-cut labeling of the band around the current region; pixels outside the band stay background.
RegionMask propose_mask(const Frame& frame, const TrackerState& state, const TopologyParams& params);

struct TopologyResult {
    bool accepted = false;
    int edits_tried = 0;
    int edits_accepted = 0;
    double energy_before = 0.0;
    double energy_after = 0.0;
};

/// Applies the edits of `proposed` that strictly lower total_energy. ctx must be built for
/// `state` on `frame`; its local evaluators are refreshed on acceptance.
TopologyResult apply_proposal(TrackerState& state, FrameContext& ctx, const RegionMask& proposed,
                              const TopologyParams& params);

TopologyResult propose_and_accept(TrackerState& state, FrameContext& ctx, const TopologyParams& params);

}  // namespace roam
