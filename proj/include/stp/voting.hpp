#pragma once

// Dense voting: per-part activation maps over a search region, accumulation
// into a vote map, Gaussian smoothing, peak extraction and per-part agreement.
//
// Activation maps are center-indexed: the value stored at object-center
// location l is the classifier response with the part's window centered at
// l + offset. That is exactly the raw response map shifted by -offset, so
// accumulation is a plain elementwise sum. Locations where the window would
// leave the frame hold -inf and abstain (contribute 0) during accumulation.

#include <cmath>
#include <cstdlib>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "stp/channels.hpp"
#include "stp/errors.hpp"
#include "stp/parts.hpp"
#include "stp/raster.hpp"

namespace stp {

struct Peak {
    int x = 0;  // raster-local
    int y = 0;
    double value = 0.0;
};

struct VoteMap {
    RegionRect region;
    RasterD values;  // smoothed accumulation, region-sized
    int peak_x = 0;  // frame coordinates
    int peak_y = 0;
    double m_v = 0.0;
};

struct PartVote {
    int part_id = -1;
    bool valid = false;  // false when the window fits nowhere in the region
    int argmax_x = 0;    // frame coordinates, unsmoothed per-part peak
    int argmax_y = 0;
    double value = 0.0;
};

namespace detail {

// out(px,py) += sum_j w[j] * plane(ox0+px+sx[j], oy0+py+sy[j]).
// Inner loop runs over contiguous rows of both rasters.
inline void add_sampled_correlation(const RasterD& plane, int ox0, int oy0, const double* w,
                                    const std::vector<int>& sx, const std::vector<int>& sy,
                                    RasterD& out) {
    const int out_w = out.width();
    const int out_h = out.height();
    const size_t n = sx.size();
    for (size_t j = 0; j < n; ++j) {
        const double wj = w[j];
        if (wj == 0.0) continue;
        const int dx = ox0 + sx[j];
        const int dy = oy0 + sy[j];
        for (int py = 0; py < out_h; ++py) {
            const double* src = plane.row(py + dy) + dx;
            double* dst = out.row(py);
            for (int px = 0; px < out_w; ++px) dst[px] += wj * src[px];
        }
    }
}

inline void sample_offsets(const PatchGeometry& g, std::vector<int>& sx, std::vector<int>& sy) {
    const int spc = g.samples_per_channel();
    sx.resize(spc);
    sy.resize(spc);
    for (int jy = 0; jy < g.grid_h; ++jy)
        for (int jx = 0; jx < g.grid_w; ++jx) {
            sx[jy * g.grid_w + jx] = g.off_x[jx];
            sy[jy * g.grid_w + jx] = g.off_y[jy];
        }
}

}  // namespace detail

// Weights actually applied by the dense kernel. Subtracting each channel
// block's mean from the weights equals centering the window descriptor:
// sum_j w_j (x_j - mean x) == sum_j (w_j - mean w) x_j.
inline Eigen::VectorXd dense_weights(const Eigen::VectorXd& classifier, const PatchGeometry& g,
                                     bool mean_center) {
    if (classifier.size() != g.k())
        throw InvalidInput("classifier length does not match patch geometry");
    Eigen::VectorXd w = classifier;
    if (mean_center) {
        const int spc = g.samples_per_channel();
        for (int ch = 0; ch < kChannels; ++ch) {
            auto block = w.segment(static_cast<Eigen::Index>(ch) * spc, spc);
            block.array() -= block.mean();
        }
    }
    return w;
}

// Center-indexed activation of one part over `region` (which must lie within
// the frame). Off-frame window locations hold -inf.
inline RasterD part_activation(const ChannelStack& stack, const Part& part,
                               const RegionRect& region, bool mean_center = true) {
    if (region.w <= 0 || region.h <= 0) throw InvalidInput("empty search region");
    if (region.x0 < 0 || region.y0 < 0 || region.x0 + region.w > stack.width ||
        region.y0 + region.h > stack.height)
        throw OutOfBounds("search region leaves the frame");

    const PatchGeometry& g = part.geom;
    RasterD out(region.w, region.h, kNegInf);

    // center range where the window stays inside the frame
    const int hx = g.win_w / 2;
    const int hy = g.win_h / 2;
    const int lx_min = std::max(region.x0, hx - part.offset_x);
    const int lx_max = std::min(region.x0 + region.w - 1, stack.width - g.win_w + hx - part.offset_x);
    const int ly_min = std::max(region.y0, hy - part.offset_y);
    const int ly_max = std::min(region.y0 + region.h - 1, stack.height - g.win_h + hy - part.offset_y);
    if (lx_min > lx_max || ly_min > ly_max) return out;

    const int vw = lx_max - lx_min + 1;
    const int vh = ly_max - ly_min + 1;
    RasterD acc(vw, vh, 0.0);

    const Eigen::VectorXd w = dense_weights(part.classifier, g, mean_center);
    std::vector<int> sx, sy;
    detail::sample_offsets(g, sx, sy);
    const int spc = g.samples_per_channel();
    const int ox0 = lx_min + part.offset_x - hx;  // window origin of the first column
    const int oy0 = ly_min + part.offset_y - hy;
    for (int ch = 0; ch < kChannels; ++ch)
        detail::add_sampled_correlation(stack.plane[ch], ox0, oy0,
                                        w.data() + static_cast<size_t>(ch) * spc, sx, sy, acc);

    for (int py = 0; py < vh; ++py) {
        const double* src = acc.row(py);
        double* dst = out.row(ly_min - region.y0 + py) + (lx_min - region.x0);
        for (int px = 0; px < vw; ++px) dst[px] = src[px];
    }
    return out;
}

// Elementwise sum of center-indexed maps; -inf entries abstain.
inline RasterD accumulate_activation_ptrs(const std::vector<const RasterD*>& maps, int width,
                                          int height) {
    RasterD acc(width, height, 0.0);
    for (const RasterD* m : maps) {
        if (m->width() != width || m->height() != height)
            throw InvalidInput("activation map size mismatch");
        double* dst = acc.data();
        const double* src = m->data();
        const size_t n = acc.size();
        for (size_t i = 0; i < n; ++i)
            if (src[i] != kNegInf) dst[i] += src[i];
    }
    return acc;
}

inline RasterD accumulate_activations(const std::vector<RasterD>& maps, int width, int height) {
    std::vector<const RasterD*> ptrs;
    ptrs.reserve(maps.size());
    for (const RasterD& m : maps) ptrs.push_back(&m);
    return accumulate_activation_ptrs(ptrs, width, height);
}

// Unsmoothed per-part peak of a center-indexed map, in frame coordinates.
inline PartVote vote_from_map(const RasterD& m, const RegionRect& region, int part_id) {
    PartVote v;
    v.part_id = part_id;
    double best = kNegInf;
    for (int y = 0; y < m.height(); ++y) {
        const double* row = m.row(y);
        for (int x = 0; x < m.width(); ++x)
            if (row[x] != kNegInf && row[x] > best) {
                best = row[x];
                v.argmax_x = region.x0 + x;
                v.argmax_y = region.y0 + y;
            }
    }
    if (best != kNegInf) {
        v.valid = true;
        v.value = best;
    }
    return v;
}

// Separable Gaussian, truncated at 3 sigma, renormalized over the in-bounds
// taps so borders are not pulled toward zero. Input must be finite.
inline RasterD smooth_raster(const RasterD& in, double sigma) {
    if (sigma <= 0.0) return in;
    const int radius = static_cast<int>(std::floor(3.0 * sigma));
    std::vector<double> kernel(static_cast<size_t>(2 * radius + 1));
    for (int d = -radius; d <= radius; ++d)
        kernel[static_cast<size_t>(d + radius)] = std::exp(-0.5 * d * d / (sigma * sigma));

    RasterD tmp(in.width(), in.height());
    for (int y = 0; y < in.height(); ++y) {
        const double* src = in.row(y);
        double* dst = tmp.row(y);
        for (int x = 0; x < in.width(); ++x) {
            double s = 0.0, wsum = 0.0;
            const int d0 = std::max(-radius, -x);
            const int d1 = std::min(radius, in.width() - 1 - x);
            for (int d = d0; d <= d1; ++d) {
                const double w = kernel[static_cast<size_t>(d + radius)];
                s += w * src[x + d];
                wsum += w;
            }
            dst[x] = s / wsum;
        }
    }
    RasterD out(in.width(), in.height());
    for (int y = 0; y < in.height(); ++y) {
        const int d0 = std::max(-radius, -y);
        const int d1 = std::min(radius, in.height() - 1 - y);
        for (int x = 0; x < in.width(); ++x) {
            double s = 0.0, wsum = 0.0;
            for (int d = d0; d <= d1; ++d) {
                const double w = kernel[static_cast<size_t>(d + radius)];
                s += w * tmp.at(x, y + d);
                wsum += w;
            }
            out.at(x, y) = s / wsum;
        }
    }
    return out;
}

// First maximum in raster order: lowest row, then lowest column.
inline Peak find_peak(const RasterD& r) {
    Peak p;
    p.value = r.at(0, 0);
    for (int y = 0; y < r.height(); ++y) {
        const double* row = r.row(y);
        for (int x = 0; x < r.width(); ++x)
            if (row[x] > p.value) {
                p.value = row[x];
                p.x = x;
                p.y = y;
            }
    }
    return p;
}

struct VoteResult {
    VoteMap map;
    std::vector<PartVote> part_votes;
};

// Full voting pass for one subset of parts: per-part activations,
// accumulation, smoothing, peak. Also records each part's own unsmoothed
// argmax for later agreement checks. Empty subset yields a zero map, M_v = 0.
inline VoteResult cast_votes(const ChannelStack& stack, const std::vector<const Part*>& voters,
                             const RegionRect& region, double sigma, bool mean_center = true) {
    if (region.w <= 0 || region.h <= 0) throw InvalidInput("empty search region");
    VoteResult res;
    res.map.region = region;
    std::vector<RasterD> maps;
    maps.reserve(voters.size());
    for (const Part* p : voters) {
        RasterD m = part_activation(stack, *p, region, mean_center);
        res.part_votes.push_back(vote_from_map(m, region, p->id));
        maps.push_back(std::move(m));
    }
    RasterD acc = accumulate_activations(maps, region.w, region.h);
    res.map.values = smooth_raster(acc, sigma);
    Peak pk = find_peak(res.map.values);
    res.map.peak_x = region.x0 + pk.x;
    res.map.peak_y = region.y0 + pk.y;
    res.map.m_v = pk.value;
    return res;
}

// Chebyshev agreement test between each part's own vote and the chosen center.
inline std::vector<bool> agreement_set(const std::vector<PartVote>& votes, int chosen_x,
                                       int chosen_y, int radius) {
    std::vector<bool> flags(votes.size(), false);
    for (size_t i = 0; i < votes.size(); ++i) {
        const PartVote& v = votes[i];
        if (!v.valid) continue;
        flags[i] = std::abs(v.argmax_x - chosen_x) <= radius &&
                   std::abs(v.argmax_y - chosen_y) <= radius;
    }
    return flags;
}

}  // namespace stp
