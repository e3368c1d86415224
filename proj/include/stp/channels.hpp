#pragma once

// Frame representation: 3 color channels scaled to [0,1] plus gradient
// magnitudes at orientations 0, pi/4, pi/2, 3pi/4, all double precision.
// Patch descriptors are channel-major vectorizations of a window over the
// seven planes.

#include <array>
#include <cmath>
#include <cstdint>

#include <Eigen/Dense>

#include "stp/errors.hpp"
#include "stp/raster.hpp"

namespace stp {

inline constexpr int kChannels = 7;

struct ChannelStack {
    int width = 0;
    int height = 0;
    std::array<RasterD, kChannels> plane;     // 0..2 color, 3..6 gradient magnitude
    std::array<RasterD, kChannels> integral;  // (w+1)x(h+1) summed-area tables

    void rebuild_integrals() {
        for (int ch = 0; ch < kChannels; ++ch) {
            RasterD& sat = integral[ch];
            sat = RasterD(width + 1, height + 1, 0.0);
            const RasterD& p = plane[ch];
            for (int y = 0; y < height; ++y) {
                const double* src = p.row(y);
                const double* above = sat.row(y);
                double* dst = sat.row(y + 1);
                double run = 0.0;
                for (int x = 0; x < width; ++x) {
                    run += src[x];
                    dst[x + 1] = run + above[x + 1];
                }
            }
        }
    }

    // Sum of plane ch over pixels [x0, x0+bw) x [y0, y0+bh).
    double box_sum(int ch, int x0, int y0, int bw, int bh) const {
        const RasterD& sat = integral[ch];
        return sat.at(x0 + bw, y0 + bh) - sat.at(x0, y0 + bh) - sat.at(x0 + bw, y0) + sat.at(x0, y0);
    }

    double box_mean(int ch, int x0, int y0, int bw, int bh) const {
        return box_sum(ch, x0, y0, bw, bh) / (static_cast<double>(bw) * bh);
    }
};

inline ChannelStack build_channel_stack(const ImageU8& frame) {
    if (frame.empty()) throw InvalidInput("build_channel_stack: empty frame");
    if (frame.channels != 1 && frame.channels != 3)
        throw InvalidInput("build_channel_stack: frame must have 1 or 3 channels");

    const int w = frame.width;
    const int h = frame.height;
    ChannelStack s;
    s.width = w;
    s.height = h;
    for (int ch = 0; ch < 3; ++ch) s.plane[ch] = RasterD(w, h, 0.0);

    // Grayscale input is replicated into all three color planes.
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (frame.channels == 3) {
                s.plane[0].at(x, y) = frame.at(x, y, 0) / 255.0;
                s.plane[1].at(x, y) = frame.at(x, y, 1) / 255.0;
                s.plane[2].at(x, y) = frame.at(x, y, 2) / 255.0;
            } else {
                const double v = frame.at(x, y, 0) / 255.0;
                s.plane[0].at(x, y) = v;
                s.plane[1].at(x, y) = v;
                s.plane[2].at(x, y) = v;
            }
        }
    }

    // Gradients are taken on the mean of the color planes, central differences
    // with clamped neighbors; diagonal pairs scaled by the 1/sqrt(2) step.
    RasterD gray(w, h, 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            gray.at(x, y) = (s.plane[0].at(x, y) + s.plane[1].at(x, y) + s.plane[2].at(x, y)) / 3.0;

    for (int ch = 3; ch < kChannels; ++ch) s.plane[ch] = RasterD(w, h, 0.0);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    auto cx = [&](int x) { return std::clamp(x, 0, w - 1); };
    auto cy = [&](int y) { return std::clamp(y, 0, h - 1); };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double dx = 0.5 * (gray.at(cx(x + 1), y) - gray.at(cx(x - 1), y));
            const double dy = 0.5 * (gray.at(x, cy(y + 1)) - gray.at(x, cy(y - 1)));
            const double dd = 0.5 * (gray.at(cx(x + 1), cy(y + 1)) - gray.at(cx(x - 1), cy(y - 1))) * inv_sqrt2;
            const double da = 0.5 * (gray.at(cx(x - 1), cy(y + 1)) - gray.at(cx(x + 1), cy(y - 1))) * inv_sqrt2;
            s.plane[3].at(x, y) = std::abs(dx);
            s.plane[4].at(x, y) = std::abs(dd);
            s.plane[5].at(x, y) = std::abs(dy);
            s.plane[6].at(x, y) = std::abs(da);
        }
    }

    s.rebuild_integrals();
    return s;
}

// Extraction window of a part: win_w x win_h pixels in the frame, sampled on a
// grid_w x grid_h grid (identity unless the window was downsampled).
struct PatchGeometry {
    int win_w = 0;
    int win_h = 0;
    int grid_w = 0;
    int grid_h = 0;
    std::vector<int> off_x;  // sample offsets inside the window, per grid column
    std::vector<int> off_y;

    bool contiguous() const { return win_w == grid_w && win_h == grid_h; }
    int k() const { return grid_w * grid_h * kChannels; }
    int samples_per_channel() const { return grid_w * grid_h; }

    static PatchGeometry square(int side) { return boxed(side, side, side); }

    // Window w x h, downsampled to at most max_side samples per axis.
    static PatchGeometry boxed(int w, int h, int max_side) {
        if (w <= 0 || h <= 0 || max_side <= 0) throw InvalidInput("PatchGeometry: bad size");
        PatchGeometry g;
        g.win_w = w;
        g.win_h = h;
        g.grid_w = std::min(w, max_side);
        g.grid_h = std::min(h, max_side);
        g.off_x.resize(g.grid_w);
        g.off_y.resize(g.grid_h);
        for (int j = 0; j < g.grid_w; ++j) g.off_x[j] = ((2 * j + 1) * g.win_w) / (2 * g.grid_w);
        for (int j = 0; j < g.grid_h; ++j) g.off_y[j] = ((2 * j + 1) * g.win_h) / (2 * g.grid_h);
        return g;
    }
};

// Top-left corner of the window for a requested center, clamped to the frame.
inline PointI clamp_window_origin(const ChannelStack& s, int cx, int cy, const PatchGeometry& g) {
    if (g.win_w > s.width || g.win_h > s.height)
        throw OutOfBounds("patch window larger than frame");
    int x0 = std::clamp(cx - g.win_w / 2, 0, s.width - g.win_w);
    int y0 = std::clamp(cy - g.win_h / 2, 0, s.height - g.win_h);
    return {x0, y0};
}

// Channel-major vectorization: all samples of channel 0 (row-major over the
// grid), then channel 1, and so on. With mean_center each channel block has
// its own mean subtracted.
inline Eigen::VectorXd extract_descriptor(const ChannelStack& s, int cx, int cy,
                                          const PatchGeometry& g, bool mean_center = false) {
    const PointI o = clamp_window_origin(s, cx, cy, g);
    Eigen::VectorXd d(g.k());
    const int block = g.samples_per_channel();
    for (int ch = 0; ch < kChannels; ++ch) {
        double* out = d.data() + static_cast<size_t>(ch) * block;
        const RasterD& p = s.plane[ch];
        int idx = 0;
        for (int gy = 0; gy < g.grid_h; ++gy) {
            const double* row = p.row(o.y + g.off_y[gy]);
            for (int gx = 0; gx < g.grid_w; ++gx) out[idx++] = row[o.x + g.off_x[gx]];
        }
        if (mean_center) {
            double mean = 0.0;
            for (int i = 0; i < block; ++i) mean += out[i];
            mean /= block;
            for (int i = 0; i < block; ++i) out[i] -= mean;
        }
    }
    return d;
}

inline Eigen::VectorXd extract_descriptor(const ChannelStack& s, int cx, int cy, int side,
                                          bool mean_center = false) {
    return extract_descriptor(s, cx, cy, PatchGeometry::square(side), mean_center);
}

// Sum of the four gradient planes over the s x s window centered at each
// pixel, windows truncated at the frame border.
inline RasterD edge_density_map(const ChannelStack& s, int window) {
    if (window <= 0 || window > std::min(s.width, s.height))
        throw InvalidInput("edge_density_map: window must fit the frame");
    RasterD out(s.width, s.height, 0.0);
    const int half = window / 2;
    for (int y = 0; y < s.height; ++y) {
        const int y0 = std::max(0, y - half);
        const int y1 = std::min(s.height - 1, y - half + window - 1);
        for (int x = 0; x < s.width; ++x) {
            const int x0 = std::max(0, x - half);
            const int x1 = std::min(s.width - 1, x - half + window - 1);
            double sum = 0.0;
            for (int ch = 3; ch < kChannels; ++ch)
                sum += s.box_sum(ch, x0, y0, x1 - x0 + 1, y1 - y0 + 1);
            out.at(x, y) = sum;
        }
    }
    return out;
}

}  // namespace stp
