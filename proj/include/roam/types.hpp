#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace roam {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Image file missing, truncated or in an unsupported format.
class DecodeError : public Error {
public:
    using Error::Error;
};

/// Invalid curve: degenerate, self-intersecting or out of bounds.
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Malformed configuration, curve document or CLI input.
class InputError : public Error {
public:
    using Error::Error;
};

/// Integer pixel / vertex position. Pixel (x, y) has its center at (x + 0.5, y + 0.5).
struct Point {
    int x = 0;
    int y = 0;

    friend constexpr bool operator==(const Point&, const Point&) = default;
    friend constexpr auto operator<=>(const Point&, const Point&) = default;
    constexpr Point operator+(const Point& o) const { return {x + o.x, y + o.y}; }
    constexpr Point operator-(const Point& o) const { return {x - o.x, y - o.y}; }
};

inline constexpr long long squared_norm(const Point& p)
{
    return static_cast<long long>(p.x) * p.x + static_cast<long long>(p.y) * p.y;
}

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
    constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
};

inline constexpr Vec2 to_vec(const Point& p) { return {double(p.x), double(p.y)}; }

using Color = std::array<double, 3>;

/// Dense row-major 2-D array.
template <typename T>
class Plane {
public:
    Plane() = default;
    Plane(int width, int height, T fill = T{})
        : width_(width), height_(height), data_(static_cast<std::size_t>(width) * height, fill)
    {
        if (width < 0 || height < 0)
            throw Error("Plane: negative dimensions");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }
    bool contains(const Point& p) const { return contains(p.x, p.y); }

    T& operator()(int x, int y) { return data_[index(x, y)]; }
    const T& operator()(int x, int y) const { return data_[index(x, y)]; }
    T& operator()(const Point& p) { return (*this)(p.x, p.y); }
    const T& operator()(const Point& p) const { return (*this)(p.x, p.y); }

    T* row(int y) { return data_.data() + static_cast<std::size_t>(y) * width_; }
    const T* row(int y) const { return data_.data() + static_cast<std::size_t>(y) * width_; }

    std::vector<T>& data() { return data_; }
    const std::vector<T>& data() const { return data_; }

    friend bool operator==(const Plane&, const Plane&) = default;

private:
    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }

    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

}  // namespace roam
