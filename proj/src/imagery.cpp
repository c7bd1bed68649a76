#include "roam/imagery.hpp"

#include <algorithm>
#include <fstream>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

namespace roam {

namespace fs = std::filesystem;

Plane<double> gradient_squared(const Plane<double>& gray)
{
    const int w = gray.width();
    const int h = gray.height();
    Plane<double> out(w, h);
    for (int y = 0; y < h; ++y) {
        const int ym = std::max(y - 1, 0);
        const int yp = std::min(y + 1, h - 1);
        for (int x = 0; x < w; ++x) {
            const int xm = std::max(x - 1, 0);
            const int xp = std::min(x + 1, w - 1);
            const double gx = 0.5 * (gray(xp, y) - gray(xm, y));
            const double gy = 0.5 * (gray(x, yp) - gray(x, ym));
            out(x, y) = gx * gx + gy * gy;
        }
    }
    return out;
}

Frame::Frame(Plane<Color> rgb) : rgb_(std::move(rgb))
{
    if (rgb_.width() <= 0 || rgb_.height() <= 0)
        throw DecodeError("frame has zero dimension");
    gray_ = Plane<double>(rgb_.width(), rgb_.height());
    for (std::size_t i = 0; i < rgb_.size(); ++i)
        gray_.data()[i] = luma(rgb_.data()[i]);
    grad_sq_ = gradient_squared(gray_);
}

Frame Frame::from_rgb8(int width, int height, std::span<const std::uint8_t> rgb)
{
    if (width <= 0 || height <= 0)
        throw DecodeError("frame has zero dimension");
    if (rgb.size() != static_cast<std::size_t>(width) * height * 3)
        throw DecodeError("rgb buffer size does not match dimensions");
    Plane<Color> plane(width, height);
    for (std::size_t i = 0; i < plane.size(); ++i)
        plane.data()[i] = {rgb[3 * i] / 255.0, rgb[3 * i + 1] / 255.0, rgb[3 * i + 2] / 255.0};
    return Frame(std::move(plane));
}

RowPrefixPlane::RowPrefixPlane(const Plane<double>& source)
{
    if (source.width() <= 0 || source.height() <= 0)
        throw Error("row_prefix: empty plane");
    values_ = Plane<double>(source.width(), source.height());
    for (int y = 0; y < source.height(); ++y) {
        const double* in = source.row(y);
        double* out = values_.row(y);
        double acc = 0.0;
        for (int x = 0; x < source.width(); ++x) {
            acc += in[x];
            out[x] = acc;
        }
    }
}

RowPrefixPlane row_prefix(const Plane<double>& source) { return RowPrefixPlane(source); }

Frame load_frame(const fs::path& path)
{
    if (!fs::exists(path))
        throw DecodeError("no such file: " + path.string());
    const cv::Mat img = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
    if (img.empty())
        throw DecodeError("cannot decode image: " + path.string());
    if (img.depth() != CV_8U)
        throw DecodeError("unsupported bit depth (8-bit expected): " + path.string());
    if (img.cols == 0 || img.rows == 0)
        throw DecodeError("zero-dimension image: " + path.string());

    Plane<Color> plane(img.cols, img.rows);
    const int ch = img.channels();
    if (ch != 1 && ch != 3 && ch != 4)
        throw DecodeError("unsupported channel count: " + path.string());
    for (int y = 0; y < img.rows; ++y) {
        const std::uint8_t* row = img.ptr<std::uint8_t>(y);
        for (int x = 0; x < img.cols; ++x) {
            const std::uint8_t* px = row + x * ch;
            if (ch == 1) {
                const double v = px[0] / 255.0;
                plane(x, y) = {v, v, v};
            } else {
                // OpenCV stores BGR(A)
                plane(x, y) = {px[2] / 255.0, px[1] / 255.0, px[0] / 255.0};
            }
        }
    }
    return Frame(std::move(plane));
}

std::vector<fs::path> list_frame_files(const fs::path& dir)
{
    if (!fs::is_directory(dir))
        throw InputError("not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file())
            continue;
        auto ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        if (ext == ".png" || ext == ".ppm" || ext == ".pgm" || ext == ".pnm")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

std::vector<Frame> load_frames(const fs::path& dir)
{
    std::vector<Frame> frames;
    for (const auto& f : list_frame_files(dir))
        frames.push_back(load_frame(f));
    return frames;
}

Plane<std::uint8_t> load_mask_png(const fs::path& path)
{
    const cv::Mat img = cv::imread(path.string(), cv::IMREAD_GRAYSCALE);
    if (img.empty())
        throw DecodeError("cannot decode mask: " + path.string());
    Plane<std::uint8_t> mask(img.cols, img.rows);
    for (int y = 0; y < img.rows; ++y) {
        const std::uint8_t* row = img.ptr<std::uint8_t>(y);
        for (int x = 0; x < img.cols; ++x)
            mask(x, y) = row[x] != 0 ? 1 : 0;
    }
    return mask;
}

void save_mask_png(const fs::path& path, const Plane<std::uint8_t>& mask)
{
    cv::Mat img(mask.height(), mask.width(), CV_8UC1);
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x)
            img.at<std::uint8_t>(y, x) = mask(x, y) ? 255 : 0;
    if (!cv::imwrite(path.string(), img))
        throw Error("cannot write " + path.string());
}

static cv::Mat to_bgr8(const Frame& frame)
{
    cv::Mat img(frame.height(), frame.width(), CV_8UC3);
    for (int y = 0; y < frame.height(); ++y)
        for (int x = 0; x < frame.width(); ++x) {
            const Color& c = frame.rgb()(x, y);
            auto q = [](double v) { return static_cast<std::uint8_t>(std::clamp(v * 255.0 + 0.5, 0.0, 255.0)); };
            img.at<cv::Vec3b>(y, x) = {q(c[2]), q(c[1]), q(c[0])};
        }
    return img;
}

void save_frame_png(const fs::path& path, const Frame& frame)
{
    if (!cv::imwrite(path.string(), to_bgr8(frame)))
        throw Error("cannot write " + path.string());
}

std::vector<std::uint8_t> encode_png(const Frame& frame)
{
    std::vector<std::uint8_t> buf;
    cv::imencode(".png", to_bgr8(frame), buf);
    return buf;
}

}  // namespace roam
