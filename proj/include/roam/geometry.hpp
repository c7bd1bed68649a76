#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "roam/types.hpp"

namespace roam {

/// Closed polygon with integer vertices; edge n joins vertex n to vertex n+1 (mod N).
/// Clockwise means positive shoelace area in image coordinates (y pointing down).
class RotoCurve {
public:
    RotoCurve() = default;
    explicit RotoCurve(std::vector<Point> vertices) : vertices_(std::move(vertices)) {}

    std::size_t size() const { return vertices_.size(); }
    const std::vector<Point>& vertices() const { return vertices_; }
    std::vector<Point>& vertices() { return vertices_; }

    const Point& operator[](std::size_t n) const { return vertices_[n]; }
    Point& operator[](std::size_t n) { return vertices_[n]; }
    /// Cyclic access.
    const Point& vertex(std::ptrdiff_t n) const
    {
        const auto N = static_cast<std::ptrdiff_t>(vertices_.size());
        return vertices_[static_cast<std::size_t>(((n % N) + N) % N)];
    }
    std::pair<Point, Point> edge(std::size_t n) const { return {vertices_[n], vertex(static_cast<std::ptrdiff_t>(n) + 1)}; }

    friend bool operator==(const RotoCurve&, const RotoCurve&) = default;

private:
    std::vector<Point> vertices_;
};

/// Per-pixel membership, 1 = inside. Stored as bytes so planes stay addressable.
using RegionMask = Plane<std::uint8_t>;

std::size_t mask_area(const RegionMask& mask);

/// Twice the signed shoelace area; positive for clockwise curves.
long long signed_area2(const RotoCurve& curve);
bool is_clockwise(const RotoCurve& curve);
RotoCurve make_clockwise(RotoCurve curve);
double perimeter(const RotoCurve& curve);

/// Closed-segment intersection test with exact integer arithmetic.
bool segments_intersect(Point a, Point b, Point c, Point d);

/// N >= 3, no zero-length edges, non-zero area, no edge crossings or touchings
/// other than shared endpoints of consecutive edges.
bool is_simple(const RotoCurve& curve);

/// Throws GeometryError describing the first violated invariant.
void validate_curve(const RotoCurve& curve, int width, int height);

bool in_bounds(const RotoCurve& curve, int width, int height);

/// Column index k of the first pixel whose center lies strictly right of the point where
/// segment a-b crosses the scanline y = row + 0.5. Requires min(a.y,b.y) <= row < max(a.y,b.y).
int scanline_crossing_column(Point a, Point b, int row);

/// Even-odd fill of pixel centers with half-open crossing rule (see scanline_crossing_column).
/// Throws GeometryError for degenerate or self-intersecting curves.
RegionMask rasterize_region(const RotoCurve& curve, int width, int height);
/// Same fill without validity checks; used in hot loops on curves already known valid.
RegionMask rasterize_unchecked(const RotoCurve& curve, int width, int height);

/// Bresenham pixels from a toward b with b excluded. Throws GeometryError if a == b.
std::vector<Point> edge_pixel_chain(Point a, Point b);
/// Number of pixels in edge_pixel_chain(a, b).
inline int chain_length(Point a, Point b)
{
    const int dx = b.x > a.x ? b.x - a.x : a.x - b.x;
    const int dy = b.y > a.y ? b.y - a.y : a.y - b.y;
    return dx > dy ? dx : dy;
}

enum class SupportSide : std::int8_t { none = 0, inside = 1, outside = -1 };

/// Membership of pixel p in the rectangle of half-width w around the oriented edge a->b,
/// split by the side of the edge's supporting line (interior side of a clockwise curve).
SupportSide support_side(Point a, Point b, int w, Point p);

struct EdgeSupport {
    std::size_t edge_index = 0;
    int half_width = 0;
    std::vector<Point> inside_pixels;
    std::vector<Point> outside_pixels;
};

/// Support rectangle of edge n, clipped to the image. When a mask is given, the inside part is
/// further restricted to the mask and the outside part to its complement.
EdgeSupport edge_support(const RotoCurve& curve, std::size_t n, int w, int width, int height,
                         const RegionMask* mask = nullptr);

/// Row spans [lo, hi] (inclusive, image-clipped) of the two support halves; empty when lo > hi.
struct SupportRow {
    int y;
    int in_lo, in_hi;
    int out_lo, out_hi;
};
std::vector<SupportRow> support_rows(Point a, Point b, int w, int width, int height);

/// Redistributes vertices at uniform arc length starting from vertex 0.
/// Throws GeometryError if spacing exceeds perimeter / 3 or the result is not simple.
RotoCurve resample_curve(const RotoCurve& curve, double target_spacing);

// Mask utilities

/// 4-connected component labels (0 = background, components numbered from 1).
Plane<int> label_components(const RegionMask& mask, int* count = nullptr);
RegionMask largest_component(const RegionMask& mask);
RegionMask fill_holes(const RegionMask& mask);
/// Chebyshev dilation by r pixels.
RegionMask dilate(const RegionMask& mask, int r);

/// Clockwise crack-following outline of the component containing the top-left-most pixel,
/// with integer pixel-corner vertices and collinear runs merged. rasterize_region of the
/// result reproduces a simply-connected 4-connected mask exactly.
std::optional<RotoCurve> trace_boundary(const RegionMask& mask);

/// Squared Euclidean distance from pixel center of p to segment a-b (vertex coordinates).
double point_segment_distance_sq(Vec2 p, Vec2 a, Vec2 b);

}  // namespace roam
