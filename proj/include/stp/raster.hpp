#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "stp/errors.hpp"

namespace stp {

struct PointI {
    int x = 0;
    int y = 0;
};

inline bool operator==(PointI a, PointI b) { return a.x == b.x && a.y == b.y; }

// Axis-aligned box, top-left corner plus size, in pixel units.
// The center is the pixel-center of the covered range: pixels x .. x+w-1.
struct Box {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    double cx() const { return x + (w - 1.0) * 0.5; }
    double cy() const { return y + (h - 1.0) * 0.5; }

    static Box from_center(double cx, double cy, double w, double h) {
        return Box{cx - (w - 1.0) * 0.5, cy - (h - 1.0) * 0.5, w, h};
    }
};

// Integer rectangle of candidate positions (inclusive grid of w*h points).
struct RegionRect {
    int x0 = 0;
    int y0 = 0;
    int w = 0;
    int h = 0;

    bool contains(int x, int y) const {
        return x >= x0 && x < x0 + w && y >= y0 && y < y0 + h;
    }
};

template <typename T>
class Raster {
public:
    Raster() = default;
    Raster(int w, int h, T fill = T{}) : w_(w), h_(h), v_(static_cast<size_t>(w) * h, fill) {
        if (w < 0 || h < 0) throw InvalidInput("raster dimensions must be non-negative");
    }

    int width() const { return w_; }
    int height() const { return h_; }
    bool empty() const { return v_.empty(); }
    size_t size() const { return v_.size(); }

    bool in_bounds(int x, int y) const { return x >= 0 && x < w_ && y >= 0 && y < h_; }

    T& at(int x, int y) { return v_[static_cast<size_t>(y) * w_ + x]; }
    const T& at(int x, int y) const { return v_[static_cast<size_t>(y) * w_ + x]; }

    T* row(int y) { return v_.data() + static_cast<size_t>(y) * w_; }
    const T* row(int y) const { return v_.data() + static_cast<size_t>(y) * w_; }

    T* data() { return v_.data(); }
    const T* data() const { return v_.data(); }

    void fill(T value) { std::fill(v_.begin(), v_.end(), value); }

private:
    int w_ = 0;
    int h_ = 0;
    std::vector<T> v_;
};

using RasterD = Raster<double>;

// 8-bit raster as decoded from disk; interleaved pixels, 1 or 3 channels.
struct ImageU8 {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<uint8_t> pixels;

    bool empty() const { return pixels.empty() || width <= 0 || height <= 0; }

    uint8_t at(int x, int y, int c) const {
        return pixels[(static_cast<size_t>(y) * width + x) * channels + c];
    }
    uint8_t& at(int x, int y, int c) {
        return pixels[(static_cast<size_t>(y) * width + x) * channels + c];
    }

    static ImageU8 make(int w, int h, int channels, uint8_t fill = 0) {
        ImageU8 im;
        im.width = w;
        im.height = h;
        im.channels = channels;
        im.pixels.assign(static_cast<size_t>(w) * h * channels, fill);
        return im;
    }
};

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace stp
