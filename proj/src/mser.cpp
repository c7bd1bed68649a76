#include <algorithm>
#include <cmath>
#include <limits>

#include "roam/landmarks.hpp"

namespace roam {

namespace {

struct Node {
    int level;
    int area;
    double sum_x, sum_y;
    int parent = -1;
    int largest_child = -1;
};

struct Set {
    int parent;
    int size;
    double sum_x, sum_y;
    int node = -1;
    int stamp = -1;
    std::vector<int> pending;
};

class ComponentTree {
public:
    // levels: 0..255 per pixel, -1 outside the domain.
    ComponentTree(const std::vector<int>& levels, int width, int height) : w_(width), h_(height)
    {
        std::vector<std::vector<int>> buckets(256);
        for (int i = 0; i < static_cast<int>(levels.size()); ++i)
            if (levels[static_cast<std::size_t>(i)] >= 0)
                buckets[static_cast<std::size_t>(levels[static_cast<std::size_t>(i)])].push_back(i);
        sets_.resize(levels.size());
        std::vector<char> active(levels.size(), 0);
        std::vector<int> touched;
        for (int level = 0; level < 256; ++level) {
            const auto& pix = buckets[static_cast<std::size_t>(level)];
            if (pix.empty())
                continue;
            touched.clear();
            for (int p : pix) {
                Set& s = sets_[static_cast<std::size_t>(p)];
                s.parent = p;
                s.size = 1;
                s.sum_x = p % w_;
                s.sum_y = p / w_;
                active[static_cast<std::size_t>(p)] = 1;
                touched.push_back(p);
                const int x = p % w_, y = p / w_;
                const int nb[4] = {x > 0 ? p - 1 : -1, x + 1 < w_ ? p + 1 : -1, y > 0 ? p - w_ : -1,
                                   y + 1 < h_ ? p + w_ : -1};
                for (int q : nb)
                    if (q >= 0 && active[static_cast<std::size_t>(q)])
                        touched.push_back(unite(p, q));
            }
            for (int t : touched) {
                const int r = find(t);
                Set& s = sets_[static_cast<std::size_t>(r)];
                if (s.stamp == level)
                    continue;
                s.stamp = level;
                const int id = static_cast<int>(nodes_.size());
                nodes_.push_back({level, s.size, s.sum_x, s.sum_y});
                if (s.node >= 0)
                    s.pending.push_back(s.node);
                for (int c : s.pending) {
                    nodes_[static_cast<std::size_t>(c)].parent = id;
                    int& lc = nodes_[static_cast<std::size_t>(id)].largest_child;
                    if (lc < 0 || nodes_[static_cast<std::size_t>(c)].area > nodes_[static_cast<std::size_t>(lc)].area)
                        lc = c;
                }
                s.pending.clear();
                s.node = id;
            }
        }
    }

    const std::vector<Node>& nodes() const { return nodes_; }

private:
    int find(int p)
    {
        while (sets_[static_cast<std::size_t>(p)].parent != p) {
            const int gp = sets_[static_cast<std::size_t>(sets_[static_cast<std::size_t>(p)].parent)].parent;
            sets_[static_cast<std::size_t>(p)].parent = gp;
            p = gp;
        }
        return p;
    }

    int unite(int a, int b)
    {
        int ra = find(a), rb = find(b);
        if (ra == rb)
            return ra;
        if (sets_[static_cast<std::size_t>(ra)].size < sets_[static_cast<std::size_t>(rb)].size)
            std::swap(ra, rb);
        Set& A = sets_[static_cast<std::size_t>(ra)];
        Set& B = sets_[static_cast<std::size_t>(rb)];
        B.parent = ra;
        A.size += B.size;
        A.sum_x += B.sum_x;
        A.sum_y += B.sum_y;
        if (B.node >= 0)
            A.pending.push_back(B.node);
        A.pending.insert(A.pending.end(), B.pending.begin(), B.pending.end());
        B.pending.clear();
        return ra;
    }

    int w_, h_;
    std::vector<Set> sets_;
    std::vector<Node> nodes_;
};

void collect(const ComponentTree& tree, const LandmarkParams& params, int domain_area, bool bright,
             std::vector<ExtremalRegion>& out)
{
    const auto& nodes = tree.nodes();
    const std::size_t n = nodes.size();
    std::vector<double> q(n, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i) {
        if (nodes[i].parent < 0)
            continue;  // a whole connected piece of the domain
        const int target = nodes[i].level + params.mser_delta;
        std::size_t j = i;
        while (nodes[j].parent >= 0 && nodes[static_cast<std::size_t>(nodes[j].parent)].level <= target)
            j = static_cast<std::size_t>(nodes[j].parent);
        q[i] = static_cast<double>(nodes[j].area - nodes[i].area) / nodes[i].area;
    }
    const double max_area = params.mser_max_area_fraction * domain_area;
    for (std::size_t i = 0; i < n; ++i) {
        const Node& nd = nodes[i];
        if (!std::isfinite(q[i]) || nd.area < params.mser_min_area || nd.area > max_area ||
            q[i] > params.mser_max_variation)
            continue;
        if (nd.parent >= 0 && q[static_cast<std::size_t>(nd.parent)] < q[i])
            continue;
        if (nd.largest_child >= 0 && q[static_cast<std::size_t>(nd.largest_child)] <= q[i])
            continue;
        out.push_back({{nd.sum_x / nd.area, nd.sum_y / nd.area}, nd.area, q[i], bright});
    }
}

}  // namespace

std::vector<ExtremalRegion> detect_mser(const Frame& frame, const RegionMask& mask, const LandmarkParams& params)
{
    const int W = frame.width(), H = frame.height();
    std::vector<int> dark(static_cast<std::size_t>(W) * H, -1), light(dark.size(), -1);
    int domain = 0;
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            if (!mask(x, y))
                continue;
            const int level = std::clamp(static_cast<int>(std::lround(frame.gray()(x, y) * 255.0)), 0, 255);
            const std::size_t i = static_cast<std::size_t>(y) * W + x;
            dark[i] = level;
            light[i] = 255 - level;
            ++domain;
        }
    std::vector<ExtremalRegion> out;
    if (domain == 0)
        return out;
    collect(ComponentTree(dark, W, H), params, domain, false, out);
    collect(ComponentTree(light, W, H), params, domain, true, out);
    return out;
}

}  // namespace roam
