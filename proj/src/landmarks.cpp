#include "roam/landmarks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <opencv2/core.hpp>
#include <opencv2/imgproc.hpp>

namespace roam {

namespace {

constexpr int kPsrExclusion = 11;

Plane<double> cosine_window(int F)
{
    Plane<double> w(F, F);
    std::vector<double> v(static_cast<std::size_t>(F));
    for (int i = 0; i < F; ++i)
        v[static_cast<std::size_t>(i)] = F > 1 ? 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / (F - 1)) : 1.0;
    for (int y = 0; y < F; ++y)
        for (int x = 0; x < F; ++x)
            w(x, y) = v[static_cast<std::size_t>(x)] * v[static_cast<std::size_t>(y)];
    return w;
}

cv::Mat to_mat(const Plane<double>& p)
{
    cv::Mat m(p.height(), p.width(), CV_64F);
    for (int y = 0; y < p.height(); ++y)
        std::copy(p.row(y), p.row(y) + p.width(), m.ptr<double>(y));
    return m;
}

}  // namespace

Vec2 centroid(const std::vector<Landmark>& landmarks)
{
    if (landmarks.empty())
        return {};
    double sx = 0.0, sy = 0.0;
    for (const auto& l : landmarks) {
        sx += l.position.x;
        sy += l.position.y;
    }
    return {sx / static_cast<double>(landmarks.size()), sy / static_cast<double>(landmarks.size())};
}

bool patch_in_bounds(int width, int height, Point center, int F)
{
    const int c = F / 2;
    return center.x - c >= 0 && center.y - c >= 0 && center.x + c < width && center.y + c < height;
}

constexpr int kTrainShift = 2;

Plane<double> normalized_patch(const Frame& frame, Point center, int F)
{
    if (!patch_in_bounds(frame.width(), frame.height(), center, F))
        throw GeometryError("patch outside the frame");
    const int c = F / 2;
    Plane<double> p(F, F);
    double sum = 0.0, sum_sq = 0.0;
    for (int y = 0; y < F; ++y)
        for (int x = 0; x < F; ++x) {
            const double v = frame.gray()(center.x - c + x, center.y - c + y);
            p(x, y) = v;
            sum += v;
            sum_sq += v * v;
        }
    const double n = static_cast<double>(F) * F;
    const double mean = sum / n;
    const double var = std::max(sum_sq / n - mean * mean, 0.0);
    const double sd = std::sqrt(var);
    for (double& v : p.data())
        v = sd > 1e-6 ? (v - mean) / sd : 0.0;
    return p;
}

CorrelationFilter train_filter(const Frame& frame, Point center, int F, double reg, double sigma_resp)
{
    if (F < 3 || F % 2 == 0)
        throw InputError("filter size must be odd and >= 3");
    if (!patch_in_bounds(frame.width(), frame.height(), center, F))
        throw GeometryError("filter patch out of bounds");
    const Plane<double> window = cosine_window(F);
    const int c = F / 2;

    // Besides the centered patch, patches displaced by a few pixels are regressed onto equally
    // displaced targets. A single-sample fit is nearly an inverse filter and responds to noise
    // away from the training position.
    cv::Mat num(F, F, CV_64FC2, cv::Scalar(0, 0)), den(F, F, CV_64F, cv::Scalar(0));
    for (int sy = -kTrainShift; sy <= kTrainShift; sy += kTrainShift)
        for (int sx = -kTrainShift; sx <= kTrainShift; sx += kTrainShift) {
            const Point at{center.x + sx, center.y + sy};
            if (!patch_in_bounds(frame.width(), frame.height(), at, F))
                continue;
            const Plane<double> z = normalized_patch(frame, at, F);
            cv::Mat x(F, F, CV_64F), g(F, F, CV_64F);
            for (int y = 0; y < F; ++y)
                for (int i = 0; i < F; ++i) {
                    x.at<double>(y, i) = z(i, y) * window(i, y);
                    // The training center sits at c - s inside the displaced patch.
                    const double dx = i - (c - sx), dy = y - (c - sy);
                    g.at<double>(y, i) = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma_resp * sigma_resp));
                }
            cv::Mat X, G;
            cv::dft(x, X, cv::DFT_COMPLEX_OUTPUT);
            cv::dft(g, G, cv::DFT_COMPLEX_OUTPUT);
            for (int y = 0; y < F; ++y)
                for (int i = 0; i < F; ++i) {
                    const auto xv = X.at<cv::Vec2d>(y, i);
                    const auto gv = G.at<cv::Vec2d>(y, i);
                    // G * conj(X)
                    num.at<cv::Vec2d>(y, i) += cv::Vec2d(gv[0] * xv[0] + gv[1] * xv[1], gv[1] * xv[0] - gv[0] * xv[1]);
                    den.at<double>(y, i) += xv[0] * xv[0] + xv[1] * xv[1];
                }
        }

    // MOSSE: H* = sum G conj(X) / (sum |X|^2 + reg); the spatial correlation filter h has spectrum conj(H*).
    cv::Mat Hc(F, F, CV_64FC2);
    for (int y = 0; y < F; ++y)
        for (int i = 0; i < F; ++i) {
            const auto nv = num.at<cv::Vec2d>(y, i);
            const double d = den.at<double>(y, i) + reg;
            Hc.at<cv::Vec2d>(y, i) = {nv[0] / d, -nv[1] / d};
        }
    cv::Mat h;
    cv::dft(Hc, h, cv::DFT_INVERSE | cv::DFT_SCALE | cv::DFT_REAL_OUTPUT);

    CorrelationFilter f;
    f.size = F;
    f.h = Plane<double>(F, F);
    f.kernel = Plane<double>(F, F);
    for (int y = 0; y < F; ++y)
        for (int i = 0; i < F; ++i)
            f.h(i, y) = h.at<double>(y, i);
    for (int y = 0; y < F; ++y)
        for (int i = 0; i < F; ++i) {
            const double k = f.h((i - c + F) % F, (y - c + F) % F) * window(i, y);
            f.kernel(i, y) = k;
            f.kernel_sum += k;
        }
    return f;
}

Plane<double> circular_response(const CorrelationFilter& filter, const Plane<double>& normalized)
{
    const int F = filter.size;
    const Plane<double> window = cosine_window(F);
    const Plane<double>& h = filter.h;
    Plane<double> x(F, F);
    for (std::size_t i = 0; i < x.size(); ++i)
        x.data()[i] = normalized.data()[i] * window.data()[i];
    Plane<double> r(F, F, 0.0);
    for (int vy = 0; vy < F; ++vy)
        for (int vx = 0; vx < F; ++vx) {
            double acc = 0.0;
            for (int uy = 0; uy < F; ++uy)
                for (int ux = 0; ux < F; ++ux)
                    acc += h(ux, uy) * x((ux + vx) % F, (uy + vy) % F);
            r(vx, vy) = acc;
        }
    return r;
}

Plane<double> sliding_response(const CorrelationFilter& filter, const Frame& frame, Point origin, int cols, int rows)
{
    const int F = filter.size, c = F / 2;
    const int W = frame.width(), H = frame.height();
    const int rw = cols + F - 1, rh = rows + F - 1;
    cv::Mat roi(rh, rw, CV_64F);
    for (int y = 0; y < rh; ++y) {
        const int sy = std::clamp(origin.y - c + y, 0, H - 1);
        double* out = roi.ptr<double>(y);
        for (int x = 0; x < rw; ++x)
            out[x] = frame.gray()(std::clamp(origin.x - c + x, 0, W - 1), sy);
    }
    cv::Mat corr;
    cv::filter2D(roi, corr, CV_64F, to_mat(filter.kernel), cv::Point(c, c), 0.0, cv::BORDER_REPLICATE);
    cv::Mat sum, sum_sq;
    cv::integral(roi, sum, sum_sq, CV_64F, CV_64F);

    const double n = static_cast<double>(F) * F;
    Plane<double> out(cols, rows);
    for (int j = 0; j < rows; ++j)
        for (int i = 0; i < cols; ++i) {
            auto box = [&](const cv::Mat& s) {
                return s.at<double>(j + F, i + F) - s.at<double>(j, i + F) - s.at<double>(j + F, i) + s.at<double>(j, i);
            };
            const double mean = box(sum) / n;
            const double var = std::max(box(sum_sq) / n - mean * mean, 0.0);
            const double sd = std::sqrt(var);
            const double a = corr.at<double>(j + c, i + c);
            out(i, j) = sd > 1e-6 ? (a - mean * filter.kernel_sum) / sd : 0.0;
        }
    return out;
}

double peak_to_sidelobe(const Plane<double>& response, Point peak)
{
    const int half = kPsrExclusion / 2;
    double sum = 0.0, sum_sq = 0.0;
    std::size_t n = 0;
    for (int y = 0; y < response.height(); ++y)
        for (int x = 0; x < response.width(); ++x) {
            if (std::abs(x - peak.x) <= half && std::abs(y - peak.y) <= half)
                continue;
            const double v = response(x, y);
            sum += v;
            sum_sq += v * v;
            ++n;
        }
    if (n < 2)
        return 0.0;
    const double mean = sum / static_cast<double>(n);
    const double sd = std::sqrt(std::max(sum_sq / static_cast<double>(n) - mean * mean, 0.0));
    if (sd < 1e-12)
        return 0.0;
    return (response(peak) - mean) / sd;
}

CostMap match_cost_map(const CorrelationFilter& filter, const Frame& frame, Point search_center, int search_side,
                       double gain)
{
    const int R = search_side / 2;
    const int x0 = std::max(search_center.x - R, 0), x1 = std::min(search_center.x + R, frame.width() - 1);
    const int y0 = std::max(search_center.y - R, 0), y1 = std::min(search_center.y + R, frame.height() - 1);
    CostMap map;
    map.origin = {x0, y0};
    if (x1 < x0 || y1 < y0)
        return map;
    const Plane<double> resp = sliding_response(filter, frame, map.origin, x1 - x0 + 1, y1 - y0 + 1);
    Point peak{0, 0};
    for (int y = 0; y < resp.height(); ++y)
        for (int x = 0; x < resp.width(); ++x)
            if (resp(x, y) > resp(peak))
                peak = {x, y};
    map.psr = peak_to_sidelobe(resp, peak);
    map.peak = {peak.x + x0, peak.y + y0};
    map.phi = Plane<double>(resp.width(), resp.height());
    for (std::size_t i = 0; i < resp.size(); ++i)
        map.phi.data()[i] = -gain * resp.data()[i];
    return map;
}

namespace {

std::vector<std::pair<double, Point>> harris_ranked(const Frame& frame)
{
    cv::Mat gray = to_mat(frame.gray());
    cv::Mat g32;
    gray.convertTo(g32, CV_32F);
    cv::Mat response;
    cv::cornerHarris(g32, response, 5, 3, 0.04);
    std::vector<std::pair<double, Point>> out;
    for (int y = 1; y + 1 < response.rows; ++y)
        for (int x = 1; x + 1 < response.cols; ++x) {
            const float v = response.at<float>(y, x);
            if (v <= 1e-8f)
                continue;
            bool is_max = true;
            for (int dy = -1; dy <= 1 && is_max; ++dy)
                for (int dx = -1; dx <= 1; ++dx)
                    if ((dx || dy) && response.at<float>(y + dy, x + dx) > v) {
                        is_max = false;
                        break;
                    }
            if (is_max)
                out.push_back({-static_cast<double>(v), Point{x, y}});
        }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

}  // namespace

std::vector<Point> detect_candidates(const Frame& frame, const RegionMask& mask, int count,
                                     const LandmarkParams& params, const std::vector<Point>& avoid)
{
    std::vector<Point> out;
    if (count <= 0 || mask_area(mask) == 0)
        return out;
    const int F = params.patch, c = F / 2;

    // Mask integral so the eroded-membership test is O(1).
    const int W = mask.width(), H = mask.height();
    std::vector<int> integ(static_cast<std::size_t>(W + 1) * (H + 1), 0);
    auto I = [&](int x, int y) -> int& { return integ[static_cast<std::size_t>(y) * (W + 1) + x]; };
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x)
            I(x + 1, y + 1) = I(x, y + 1) + I(x + 1, y) - I(x, y) + (mask(x, y) ? 1 : 0);
    auto eroded_inside = [&](Point p) {
        if (!patch_in_bounds(W, H, p, F))
            return false;
        const int s = I(p.x + c + 1, p.y + c + 1) - I(p.x - c, p.y + c + 1) - I(p.x + c + 1, p.y - c) + I(p.x - c, p.y - c);
        return s == F * F;
    };

    std::vector<Point> ranked;
    if (params.detector == Detector::mser) {
        auto regions = detect_mser(frame, mask, params);
        std::stable_sort(regions.begin(), regions.end(), [](const ExtremalRegion& a, const ExtremalRegion& b) {
            if (a.variation != b.variation)
                return a.variation < b.variation;
            return a.area > b.area;
        });
        for (const auto& r : regions)
            ranked.push_back({static_cast<int>(std::lround(r.centroid.x)), static_cast<int>(std::lround(r.centroid.y))});
    } else {
        for (const auto& [score, p] : harris_ranked(frame))
            ranked.push_back(p);
    }

    const long long sep2 = static_cast<long long>(params.min_separation) * params.min_separation;
    auto far_from = [&](Point p, const std::vector<Point>& others) {
        return std::all_of(others.begin(), others.end(), [&](Point q) { return squared_norm(p - q) >= sep2; });
    };
    for (const Point& p : ranked) {
        if (static_cast<int>(out.size()) >= count)
            break;
        if (!eroded_inside(p) || !far_from(p, out) || !far_from(p, avoid))
            continue;
        out.push_back(p);
    }
    return out;
}

void pair_landmark(Landmark& landmark, const RotoCurve& curve, int k)
{
    std::vector<std::pair<long long, int>> d;
    for (std::size_t n = 0; n < curve.size(); ++n)
        d.push_back({squared_norm(curve[n] - landmark.position), static_cast<int>(n)});
    std::sort(d.begin(), d.end());
    landmark.pairings.clear();
    for (int i = 0; i < k && i < static_cast<int>(d.size()); ++i) {
        const int n = d[static_cast<std::size_t>(i)].second;
        landmark.pairings.push_back({n, curve[static_cast<std::size_t>(n)] - landmark.position});
    }
}

LandmarkPool cull_and_repopulate(const LandmarkPool& pool, const Frame& frame, const RegionMask& mask,
                                 const RotoCurve& curve, const LandmarkParams& params)
{
    LandmarkPool out;
    out.next_id = pool.next_id;
    std::vector<Point> kept;
    for (const auto& l : pool.landmarks) {
        if (l.lost || l.psr < params.psr_threshold)
            continue;
        if (!mask.contains(l.position) || !mask(l.position))
            continue;
        if (!patch_in_bounds(frame.width(), frame.height(), l.position, params.patch))
            continue;
        if (static_cast<int>(out.landmarks.size()) >= params.capacity)
            break;
        Landmark copy = l;
        copy.prev_position = copy.position;
        out.landmarks.push_back(copy);
        kept.push_back(copy.position);
    }
    const int room = params.capacity - static_cast<int>(out.landmarks.size());
    if (room > 0) {
        for (const Point& p : detect_candidates(frame, mask, room, params, kept)) {
            Landmark l;
            l.id = out.next_id++;
            l.position = l.prev_position = p;
            l.filter = train_filter(frame, p, params.patch, params.reg, params.sigma_resp);
            l.psr = match_cost_map(l.filter, frame, p, params.search_side, params.gain).psr;
            pair_landmark(l, curve, params.k_pair);
            out.landmarks.push_back(std::move(l));
        }
    }
    out.prev_root = centroid(out.landmarks);
    out.root_shift = {0, 0};
    return out;
}

}  // namespace roam
