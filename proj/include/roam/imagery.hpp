#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "roam/types.hpp"

namespace roam {

/// One video frame. All planes share the frame dimensions and are immutable after construction.
class Frame {
public:
    Frame() = default;

    /// Builds gray and gradient planes from an RGB plane with channels in [0,1].
    explicit Frame(Plane<Color> rgb);

    /// Interleaved 8-bit RGB, row-major.
    static Frame from_rgb8(int width, int height, std::span<const std::uint8_t> rgb);

    int width() const { return rgb_.width(); }
    int height() const { return rgb_.height(); }

    const Plane<Color>& rgb() const { return rgb_; }
    const Plane<double>& gray() const { return gray_; }
    /// ||grad I||^2 from central differences on gray, replicated borders.
    const Plane<double>& grad_sq() const { return grad_sq_; }

private:
    Plane<Color> rgb_;
    Plane<double> gray_;
    Plane<double> grad_sq_;
};

inline double luma(const Color& c) { return 0.299 * c[0] + 0.587 * c[1] + 0.114 * c[2]; }

Plane<double> gradient_squared(const Plane<double>& gray);

/// values[x, y] = sum of source[0..x, y].
class RowPrefixPlane {
public:
    RowPrefixPlane() = default;
    explicit RowPrefixPlane(const Plane<double>& source);

    int width() const { return values_.width(); }
    int height() const { return values_.height(); }
    double operator()(int x, int y) const { return values_(x, y); }
    /// Prefix up to and including column x; 0 for x < 0.
    double at_or_zero(int x, int y) const { return x < 0 ? 0.0 : values_(x, y); }
    const Plane<double>& values() const { return values_; }

private:
    Plane<double> values_;
};

RowPrefixPlane row_prefix(const Plane<double>& source);

/// Decodes PNG / PPM / PGM. Throws DecodeError.
Frame load_frame(const std::filesystem::path& path);

/// Image files of a directory sorted lexicographically.
std::vector<std::filesystem::path> list_frame_files(const std::filesystem::path& dir);

std::vector<Frame> load_frames(const std::filesystem::path& dir);

/// 8-bit single channel; nonzero pixels read as foreground (stored as 1).
Plane<std::uint8_t> load_mask_png(const std::filesystem::path& path);
void save_mask_png(const std::filesystem::path& path, const Plane<std::uint8_t>& mask);
void save_frame_png(const std::filesystem::path& path, const Frame& frame);
std::vector<std::uint8_t> encode_png(const Frame& frame);

}  // namespace roam
