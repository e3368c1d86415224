#pragma once

// Candidate-part proposal: hard-negative mining from high-edge-density
// background, stride-2 grid coverage of the bounding box with
// smallest-size-first escalation, and discriminativeness screening by the
// ratio of a patch's own response to its best mined-negative response.

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stp/channels.hpp"
#include "stp/errors.hpp"
#include "stp/parts.hpp"
#include "stp/raster.hpp"
#include "stp/ridge.hpp"

namespace stp {

struct MinedNegatives {
    std::vector<PointI> centers;
    Eigen::MatrixXd rows;  // m x k, one descriptor per row
};

// Picks up to `count` descriptor centers outside `bbox`, in decreasing order
// of edge density (window = largest patch dimension), square non-maximum
// suppression of radius side/2, ties broken in raster order. Throws
// EmptyNegatives when the box leaves no exterior center at all.
inline MinedNegatives mine_negatives(const ChannelStack& stack, const RegionRect& bbox, int count,
                                     const PatchGeometry& g, bool mean_center = true) {
    if (count < 1) throw InvalidInput("mine_negatives: count must be >= 1");
    const int side = std::max(g.win_w, g.win_h);
    const RasterD density = edge_density_map(stack, std::min({side, stack.width, stack.height}));

    std::vector<PointI> exterior;
    exterior.reserve(static_cast<size_t>(stack.width) * stack.height);
    for (int y = 0; y < stack.height; ++y)
        for (int x = 0; x < stack.width; ++x)
            if (!bbox.contains(x, y)) exterior.push_back({x, y});
    if (exterior.empty()) throw EmptyNegatives("mine_negatives: box covers the whole frame");

    std::stable_sort(exterior.begin(), exterior.end(), [&](const PointI& a, const PointI& b) {
        return density.at(a.x, a.y) > density.at(b.x, b.y);
    });

    const int radius = side / 2;
    Raster<uint8_t> suppressed(stack.width, stack.height, 0);
    MinedNegatives out;
    for (const PointI& c : exterior) {
        if (static_cast<int>(out.centers.size()) >= count) break;
        if (suppressed.at(c.x, c.y)) continue;
        out.centers.push_back(c);
        const int x0 = std::max(0, c.x - radius);
        const int x1 = std::min(stack.width - 1, c.x + radius);
        const int y0 = std::max(0, c.y - radius);
        const int y1 = std::min(stack.height - 1, c.y + radius);
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x) suppressed.at(x, y) = 1;
    }

    out.rows.resize(static_cast<Eigen::Index>(out.centers.size()), g.k());
    for (size_t i = 0; i < out.centers.size(); ++i)
        out.rows.row(static_cast<Eigen::Index>(i)) =
            extract_descriptor(stack, out.centers[i].x, out.centers[i].y, g, mean_center);
    return out;
}

struct ProposalParams {
    double t_d = 1.4;           // own/negative response ratio threshold
    double lambda_scale = 1e-2; // ridge weight = lambda_scale * k
    int grid_stride = 2;
    int side_small = 17;
    int side_medium = 27;
    int full_box_cap = 40;      // full-box grid samples per axis
    double weak_response = 0.5; // existing parts above this pre-cover their footprint
    bool mean_center = true;
    int train_cap = 512;        // max rows per closed-form solve
    int screen_chunk = 128;     // positives per screening solve
    double neg_ratio = 3.0;     // negatives per positive, subject to train_cap
};

struct ProposalOutcome {
    std::vector<Part> accepted;  // state Candidate, ids unassigned
    std::vector<std::string> warnings;
    int grid_points = 0;
    int screened = 0;
    bool skipped = false;  // no negatives available for any size
};

namespace detail {

inline void mark_footprint(Raster<uint8_t>& coverage, const RegionRect& bbox,
                           const ChannelStack& stack, int cx, int cy, const PatchGeometry& g) {
    const PointI o = clamp_window_origin(stack, cx, cy, g);
    const int x0 = std::max(o.x, bbox.x0);
    const int x1 = std::min(o.x + g.win_w, bbox.x0 + bbox.w);
    const int y0 = std::max(o.y, bbox.y0);
    const int y1 = std::min(o.y + g.win_h, bbox.y0 + bbox.h);
    for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) coverage.at(x - bbox.x0, y - bbox.y0) = 1;
}

// Screens `points` in chunks: preliminary one-vs-all banks over
// [chunk positives; shared negatives], acceptance iff the own response is
// positive and exceeds t_d times the best negative response.
inline std::vector<char> screen_points(const Eigen::MatrixXd& positives,
                                       const Eigen::MatrixXd& negatives, double lambda,
                                       const ProposalParams& pp) {
    const Eigen::Index npos = positives.rows();
    std::vector<char> pass(static_cast<size_t>(npos), 0);
    for (Eigen::Index begin = 0; begin < npos; begin += pp.screen_chunk) {
        const Eigen::Index m = std::min<Eigen::Index>(pp.screen_chunk, npos - begin);
        const Eigen::Index nneg =
            std::min<Eigen::Index>({static_cast<Eigen::Index>(pp.neg_ratio * static_cast<double>(m)),
                                    negatives.rows(),
                                    static_cast<Eigen::Index>(pp.train_cap) - m});
        if (nneg < 1) throw EmptyNegatives("screen_points: no room for negatives");
        Eigen::MatrixXd D(m + nneg, positives.cols());
        D.topRows(m) = positives.middleRows(begin, m);
        D.bottomRows(nneg) = negatives.topRows(nneg);
        const ClassifierBank bank = train_bank(D, lambda);
        const Eigen::MatrixXd cpos = bank.columns.leftCols(m);          // k x m
        const Eigen::VectorXd own = (D.topRows(m) * cpos).diagonal();   // d_i . c_i
        const Eigen::VectorXd worst = (D.bottomRows(nneg) * cpos).colwise().maxCoeff();
        for (Eigen::Index i = 0; i < m; ++i)
            if (own(i) > 0.0 && own(i) > pp.t_d * worst(i)) pass[static_cast<size_t>(begin + i)] = 1;
    }
    return pass;
}

}  // namespace detail

// Proposes new candidate parts for the box: every stride-2 grid point not
// already covered (by an existing candidate footprint, or by a
// reliable-or-gold part responding at least weak_response at its expected
// place) is screened at side 17, then 27, then the full box; surviving points
// are selected greedily in raster order, each marking its footprint, and each
// size class is finally trained in a single one-vs-all solve and calibrated.
inline ProposalOutcome propose_parts(const ChannelStack& stack, const RegionRect& bbox,
                                     int anchor_x, int anchor_y, const PartRoster& roster,
                                     int frame_index, const ProposalParams& pp) {
    if (bbox.w <= 0 || bbox.h <= 0) throw InvalidInput("propose_parts: empty box");
    if (bbox.x0 < 0 || bbox.y0 < 0 || bbox.x0 + bbox.w > stack.width ||
        bbox.y0 + bbox.h > stack.height)
        throw OutOfBounds("propose_parts: box leaves the frame");

    ProposalOutcome out;
    Raster<uint8_t> coverage(bbox.w, bbox.h, 0);

    for (const Part& p : roster.parts()) {
        const int cx = anchor_x + p.offset_x;
        const int cy = anchor_y + p.offset_y;
        if (p.state == PartState::Candidate) {
            detail::mark_footprint(coverage, bbox, stack, cx, cy, p.geom);
            continue;
        }
        const Eigen::VectorXd d = extract_descriptor(stack, cx, cy, p.geom, pp.mean_center);
        if (response(p.classifier, d) >= pp.weak_response)
            detail::mark_footprint(coverage, bbox, stack, cx, cy, p.geom);
    }

    std::vector<PointI> grid;
    for (int gy = bbox.y0; gy < bbox.y0 + bbox.h; gy += pp.grid_stride)
        for (int gx = bbox.x0; gx < bbox.x0 + bbox.w; gx += pp.grid_stride)
            grid.push_back({gx, gy});
    out.grid_points = static_cast<int>(grid.size());

    struct SizePlan {
        SizeClass cls;
        PatchGeometry geom;
        bool usable = false;
        MinedNegatives negs;
        std::vector<PointI> screened_points;
        std::vector<char> passed;
        std::vector<PointI> selected;
    };
    std::vector<SizePlan> plans;
    plans.push_back({SizeClass::Small, PatchGeometry::square(pp.side_small)});
    plans.push_back({SizeClass::Medium, PatchGeometry::square(pp.side_medium)});
    plans.push_back({SizeClass::FullBox, PatchGeometry::boxed(bbox.w, bbox.h, pp.full_box_cap)});

    // points still in play after the previous (smaller) size rejected them
    std::vector<PointI> pending;
    for (const PointI& gp : grid)
        if (!coverage.at(gp.x - bbox.x0, gp.y - bbox.y0)) pending.push_back(gp);

    for (SizePlan& plan : plans) {
        if (pending.empty()) break;
        if (plan.geom.win_w > stack.width || plan.geom.win_h > stack.height) {
            out.warnings.push_back(std::string("patch size ") + to_string(plan.cls) +
                                   " larger than frame, skipped");
            continue;
        }
        try {
            plan.negs = mine_negatives(stack, bbox, pp.train_cap - 1, plan.geom, pp.mean_center);
        } catch (const EmptyNegatives&) {
            out.warnings.push_back(std::string("no negatives available for size ") +
                                   to_string(plan.cls));
            continue;
        }
        plan.usable = true;
        plan.screened_points = pending;
        Eigen::MatrixXd positives(static_cast<Eigen::Index>(pending.size()), plan.geom.k());
        for (size_t i = 0; i < pending.size(); ++i)
            positives.row(static_cast<Eigen::Index>(i)) =
                extract_descriptor(stack, pending[i].x, pending[i].y, plan.geom, pp.mean_center);
        const double lambda = pp.lambda_scale * plan.geom.k();
        plan.passed = detail::screen_points(positives, plan.negs.rows, lambda, pp);
        out.screened += static_cast<int>(pending.size());

        std::vector<PointI> still_pending;
        for (size_t i = 0; i < pending.size(); ++i)
            if (!plan.passed[i]) still_pending.push_back(pending[i]);
        pending = std::move(still_pending);
    }

    // greedy raster selection: smallest passing size wins, footprints accrue
    for (const PointI& gp : grid) {
        if (coverage.at(gp.x - bbox.x0, gp.y - bbox.y0)) continue;
        for (SizePlan& plan : plans) {
            if (!plan.usable) continue;
            bool passed = false;
            for (size_t i = 0; i < plan.screened_points.size(); ++i)
                if (plan.screened_points[i].x == gp.x && plan.screened_points[i].y == gp.y) {
                    passed = plan.passed[i] != 0;
                    break;
                }
            if (!passed) continue;
            plan.selected.push_back(gp);
            detail::mark_footprint(coverage, bbox, stack, gp.x, gp.y, plan.geom);
            break;
        }
    }

    bool any_usable = false;
    for (const SizePlan& plan : plans) any_usable = any_usable || plan.usable;
    if (!any_usable) {
        out.skipped = true;
        return out;
    }

    // final per-size training over the selected positives plus shared negatives
    for (SizePlan& plan : plans) {
        if (plan.selected.empty()) continue;
        const Eigen::Index nsel = static_cast<Eigen::Index>(plan.selected.size());
        const Eigen::Index nneg = std::min<Eigen::Index>(
            {static_cast<Eigen::Index>(pp.neg_ratio * static_cast<double>(nsel)),
             plan.negs.rows.rows(), static_cast<Eigen::Index>(pp.train_cap) - nsel});
        Eigen::MatrixXd D(nsel + nneg, plan.geom.k());
        for (Eigen::Index i = 0; i < nsel; ++i)
            D.row(i) = extract_descriptor(stack, plan.selected[static_cast<size_t>(i)].x,
                                          plan.selected[static_cast<size_t>(i)].y, plan.geom,
                                          pp.mean_center);
        D.bottomRows(nneg) = plan.negs.rows.topRows(nneg);
        const ClassifierBank bank = train_bank(D, pp.lambda_scale * plan.geom.k());
        for (Eigen::Index i = 0; i < nsel; ++i) {
            Eigen::VectorXd c = bank.columns.col(i);
            if (!calibrate_column(c, D.row(i).transpose())) {
                out.warnings.push_back("uncalibratable proposal dropped");
                continue;
            }
            Part part;
            part.size_class = plan.cls;
            part.geom = plan.geom;
            part.offset_x = plan.selected[static_cast<size_t>(i)].x - anchor_x;
            part.offset_y = plan.selected[static_cast<size_t>(i)].y - anchor_y;
            part.classifier = std::move(c);
            part.channel_sums = classifier_channel_sums(part.classifier, part.geom);
            part.state = PartState::Candidate;
            part.birth_frame = frame_index;
            out.accepted.push_back(std::move(part));
        }
    }
    return out;
}

}  // namespace stp
