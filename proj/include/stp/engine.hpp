#pragma once

// The tracker automaton. Strong frames (S) vote with reliable and gold parts
// inside a +-delta search window and every t_update frames run an update
// phase (lifecycle review, budget, new proposals). A weak strong-state vote
// falls back to a same-frame re-vote with candidates included (W); if that is
// weak too the tracker enters crisis (C) and votes over the whole frame with
// a frozen roster until the vote is strong again.

#include <cmath>
#include <string>
#include <vector>

#include "stp/channels.hpp"
#include "stp/errors.hpp"
#include "stp/parts.hpp"
#include "stp/raster.hpp"
#include "stp/ridge.hpp"
#include "stp/sampling.hpp"
#include "stp/voting.hpp"

namespace stp {

enum class AutomatonState { S, W, C };

// Ablation modes: SOnly never leaves S (weak votes still move to the peak),
// SW adds the candidate re-vote but never enters crisis (a failed W holds
// position and stays W), Full adds full-frame crisis recovery.
enum class TrackerMode { SOnly, SW, Full };

inline const char* to_string(AutomatonState s) {
    switch (s) {
        case AutomatonState::S: return "S";
        case AutomatonState::W: return "W";
        case AutomatonState::C: return "C";
    }
    return "?";
}

inline const char* to_string(TrackerMode m) {
    switch (m) {
        case TrackerMode::SOnly: return "stp-s";
        case TrackerMode::SW: return "stp-sw";
        case TrackerMode::Full: return "stp-full";
    }
    return "?";
}

inline TrackerMode parse_tracker_mode(const std::string& s) {
    if (s == "stp-s" || s == "s") return TrackerMode::SOnly;
    if (s == "stp-sw" || s == "sw") return TrackerMode::SW;
    if (s == "stp-full" || s == "full") return TrackerMode::Full;
    throw ConfigError("unknown tracker mode: " + s);
}

// Pure transition function over (state, vote strength); total on all inputs.
inline AutomatonState transition(AutomatonState s, double m_v, double t_v, TrackerMode mode) {
    const bool strong = m_v > t_v;
    switch (s) {
        case AutomatonState::S:
            if (strong || mode == TrackerMode::SOnly) return AutomatonState::S;
            return AutomatonState::W;
        case AutomatonState::W:
            if (strong) return AutomatonState::S;
            return mode == TrackerMode::Full ? AutomatonState::C : AutomatonState::W;
        case AutomatonState::C:
            return strong ? AutomatonState::S : AutomatonState::C;
    }
    return s;
}

inline std::vector<const Part*> voting_subset(const PartRoster& roster, bool include_candidates) {
    std::vector<const Part*> out;
    for (const Part& p : roster.parts())
        if (include_candidates || p.state != PartState::Candidate) out.push_back(&p);
    return out;
}

struct TrackerParams {
    int delta = 25;             // search half-window around the previous center
    int t_update = 10;          // frames between update phases
    double t_d = 1.4;           // proposal discriminativeness ratio
    double p_plus = 0.2;        // promotion threshold (strict)
    double p_minus = 0.1;       // removal threshold (inclusive)
    int n_max = 200;            // reliable+gold cap per size class
    double t_v_factor = 0.3;    // vote threshold = factor * (reliable+gold count)
    double sigma_smooth = 2.0;  // vote-map Gaussian
    int agree_radius = 5;       // Chebyshev agreement distance
    double lambda_scale = 1e-2; // ridge weight = scale * descriptor length
    bool mean_center = true;
    TrackerMode mode = TrackerMode::Full;

    ProposalParams proposal() const {
        ProposalParams pp;
        pp.t_d = t_d;
        pp.lambda_scale = lambda_scale;
        pp.mean_center = mean_center;
        return pp;
    }

    void validate() const {
        if (delta <= 0 || t_update <= 0 || t_d <= 0 || n_max <= 0 || t_v_factor <= 0 ||
            sigma_smooth <= 0 || agree_radius <= 0 || lambda_scale <= 0)
            throw ConfigError("tracker parameters must be positive");
        if (!(p_minus < p_plus)) throw ConfigError("p_minus must be below p_plus");
    }
};

struct FrameRecord {
    int frame = 0;
    char label = 'S';            // S, U (strong frame with update phase), W, C
    AutomatonState end_state = AutomatonState::S;
    double m_v = 0.0;            // decisive vote strength for the frame
    double t_v_eff = 0.0;
    bool moved = false;
    int center_x = 0;            // anchor after the frame
    int center_y = 0;
    Box bbox;                    // predicted box after the frame
    int n_candidate = 0;
    int n_reliable = 0;
    int n_gold = 0;
};

class Tracker {
public:
    Tracker(const ImageU8& first_frame, const Box& groundtruth, const TrackerParams& params)
        : params_(params) {
        params_.validate();
        frame_w_ = first_frame.width;
        frame_h_ = first_frame.height;
        box_w_ = static_cast<int>(std::lround(groundtruth.w));
        box_h_ = static_cast<int>(std::lround(groundtruth.h));
        if (box_w_ <= 0 || box_h_ <= 0) throw InvalidInput("empty ground-truth box");
        anchor_x_ = static_cast<int>(std::lround(groundtruth.cx()));
        anchor_y_ = static_cast<int>(std::lround(groundtruth.cy()));
        const RegionRect rect = box_rect();
        if (rect.x0 < 0 || rect.y0 < 0 || rect.x0 + rect.w > frame_w_ ||
            rect.y0 + rect.h > frame_h_)
            throw InvalidInput("ground-truth box leaves the frame");

        const ChannelStack stack = build_channel_stack(first_frame);
        ProposalOutcome founders =
            propose_parts(stack, rect, anchor_x_, anchor_y_, roster_, 1, params_.proposal());
        for (Part& p : founders.accepted) {
            p.state = PartState::Reliable;  // founders vote from the start
            roster_.add(std::move(p));
        }
        if (roster_.empty())
            throw InitializationFailure("no discriminative parts found in the first frame");
        state_ = AutomatonState::S;
        frame_index_ = 1;
        frames_since_update_ = 1;  // the initialization counts as an update
    }

    // Ground-truth row for the initialization frame.
    FrameRecord initial_record() const {
        FrameRecord r;
        r.frame = 1;
        r.label = 'S';
        r.end_state = AutomatonState::S;
        r.center_x = anchor_x_;
        r.center_y = anchor_y_;
        r.bbox = predicted_box();
        fill_counts(r);
        return r;
    }

    FrameRecord step(const ImageU8& frame) {
        if (frame.width != frame_w_ || frame.height != frame_h_)
            throw InvalidInput("frame size changed mid-sequence");
        frame_index_ += 1;
        frames_since_update_ += 1;
        const ChannelStack stack = build_channel_stack(frame);

        FrameRecord rec;
        rec.frame = frame_index_;
        switch (state_) {
            case AutomatonState::S: step_search(stack, rec, false); break;
            case AutomatonState::W: step_search(stack, rec, true); break;  // SW mode only
            case AutomatonState::C: step_crisis(stack, rec); break;
        }
        rec.end_state = state_;
        rec.center_x = anchor_x_;
        rec.center_y = anchor_y_;
        rec.bbox = predicted_box();
        fill_counts(rec);
        return rec;
    }

    const PartRoster& roster() const { return roster_; }
    const TrackerParams& params() const { return params_; }
    AutomatonState state() const { return state_; }
    int frame_index() const { return frame_index_; }
    int anchor_x() const { return anchor_x_; }
    int anchor_y() const { return anchor_y_; }

    Box predicted_box() const {
        Box b;
        b.w = box_w_;
        b.h = box_h_;
        b.x = anchor_x_ - (box_w_ - 1) * 0.5;
        b.y = anchor_y_ - (box_h_ - 1) * 0.5;
        return b;
    }

private:
    RegionRect search_region() const {
        const int x0 = std::max(0, anchor_x_ - params_.delta);
        const int y0 = std::max(0, anchor_y_ - params_.delta);
        const int x1 = std::min(frame_w_ - 1, anchor_x_ + params_.delta);
        const int y1 = std::min(frame_h_ - 1, anchor_y_ + params_.delta);
        return {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
    }

    RegionRect box_rect() const {
        return {anchor_x_ - (box_w_ - 1) / 2, anchor_y_ - (box_h_ - 1) / 2, box_w_, box_h_};
    }

    double vote_threshold() const {
        return params_.t_v_factor *
               (roster_.count(PartState::Reliable) + roster_.count(PartState::Gold));
    }

    void fill_counts(FrameRecord& r) const {
        r.n_candidate = roster_.count(PartState::Candidate);
        r.n_reliable = roster_.count(PartState::Reliable);
        r.n_gold = roster_.count(PartState::Gold);
    }

    // S frame (and persistent-W frames in SW mode): activation maps are
    // computed once for every part; candidates join the accumulation only in
    // the W re-vote, but their own peaks always feed the agreement counters.
    void step_search(const ChannelStack& stack, FrameRecord& rec, bool begin_in_w) {
        const RegionRect region = search_region();
        const auto& parts = roster_.parts();
        std::vector<RasterD> maps;
        std::vector<PartVote> votes;
        maps.reserve(parts.size());
        votes.reserve(parts.size());
        for (const Part& p : parts) {
            maps.push_back(part_activation(stack, p, region, params_.mean_center));
            votes.push_back(vote_from_map(maps.back(), region, p.id));
        }

        const double t_v = vote_threshold();
        rec.t_v_eff = t_v;

        std::vector<const RasterD*> rg_maps;
        for (size_t i = 0; i < parts.size(); ++i)
            if (parts[i].state != PartState::Candidate) rg_maps.push_back(&maps[i]);
        RasterD acc = accumulate_activation_ptrs(rg_maps, region.w, region.h);

        if (!begin_in_w) {
            const Peak pk = smooth_and_peak(acc, region);
            rec.m_v = pk.value;
            if (pk.value > t_v) {
                accept_vote(stack, rec, region, votes, pk, 'S');
                state_ = AutomatonState::S;
                return;
            }
            if (params_.mode == TrackerMode::SOnly) {
                // weak vote still moves; no bookkeeping, no update phase
                rec.label = 'S';
                anchor_x_ = region.x0 + pk.x;
                anchor_y_ = region.y0 + pk.y;
                rec.moved = true;
                state_ = AutomatonState::S;
                return;
            }
            state_ = AutomatonState::W;  // same-frame re-vote below
        }

        // W: candidates join the accumulation
        std::vector<const RasterD*> cand_maps;
        for (size_t i = 0; i < parts.size(); ++i)
            if (parts[i].state == PartState::Candidate) cand_maps.push_back(&maps[i]);
        RasterD cand_acc = accumulate_activation_ptrs(cand_maps, region.w, region.h);
        for (size_t i = 0; i < acc.size(); ++i) acc.data()[i] += cand_acc.data()[i];

        const Peak pk = smooth_and_peak(acc, region);
        rec.m_v = pk.value;
        rec.label = 'W';
        if (pk.value > t_v) {
            const std::vector<bool> agree =
                agreement_set(votes, region.x0 + pk.x, region.y0 + pk.y, params_.agree_radius);
            for (size_t i = 0; i < votes.size(); ++i)
                if (votes[i].valid) record_agreement(roster_.parts()[i], agree[i]);
            for (size_t i = 0; i < votes.size(); ++i)
                if (agree[i] && parts[i].state == PartState::Candidate)
                    roster_.promote_to_reliable(parts[i].id);
            roster_.enforce_budget(params_.n_max);
            anchor_x_ = region.x0 + pk.x;
            anchor_y_ = region.y0 + pk.y;
            rec.moved = true;
            state_ = AutomatonState::S;
            return;
        }
        // weak W: hold position; crisis next frame in full mode
        state_ = params_.mode == TrackerMode::Full ? AutomatonState::C : AutomatonState::W;
    }

    void step_crisis(const ChannelStack& stack, FrameRecord& rec) {
        const RegionRect region{0, 0, frame_w_, frame_h_};
        std::vector<const Part*> voters = voting_subset(roster_, false);
        const VoteResult res =
            cast_votes(stack, voters, region, params_.sigma_smooth, params_.mean_center);
        const double t_v = vote_threshold();
        rec.t_v_eff = t_v;
        rec.m_v = res.map.m_v;
        rec.label = 'C';
        anchor_x_ = res.map.peak_x;  // crisis always moves to the best full-frame vote
        anchor_y_ = res.map.peak_y;
        rec.moved = true;
        state_ = res.map.m_v > t_v ? AutomatonState::S : AutomatonState::C;
    }

    Peak smooth_and_peak(const RasterD& acc, const RegionRect&) const {
        return find_peak(smooth_raster(acc, params_.sigma_smooth));
    }

    // Strong S vote: move, update agreement counters for every evaluated
    // part, and run the periodic update phase.
    void accept_vote(const ChannelStack& stack, FrameRecord& rec, const RegionRect& region,
                     const std::vector<PartVote>& votes, const Peak& pk, char label) {
        rec.label = label;
        const int chosen_x = region.x0 + pk.x;
        const int chosen_y = region.y0 + pk.y;
        const std::vector<bool> agree =
            agreement_set(votes, chosen_x, chosen_y, params_.agree_radius);
        for (size_t i = 0; i < votes.size(); ++i)
            if (votes[i].valid) record_agreement(roster_.parts()[i], agree[i]);
        anchor_x_ = chosen_x;
        anchor_y_ = chosen_y;
        rec.moved = true;

        if (frames_since_update_ >= params_.t_update) {
            rec.label = 'U';
            run_update(stack);
            frames_since_update_ = 0;
        }
    }

    void run_update(const ChannelStack& stack) {
        roster_.review_lifecycle(params_.p_plus, params_.p_minus);
        roster_.enforce_budget(params_.n_max);
        const RegionRect rect = box_rect();
        const int x0 = std::max(rect.x0, 0);
        const int y0 = std::max(rect.y0, 0);
        const int x1 = std::min(rect.x0 + rect.w, frame_w_);
        const int y1 = std::min(rect.y0 + rect.h, frame_h_);
        if (x1 - x0 < 2 || y1 - y0 < 2) return;  // box almost entirely outside
        const RegionRect clipped{x0, y0, x1 - x0, y1 - y0};
        ProposalOutcome proposals = propose_parts(stack, clipped, anchor_x_, anchor_y_, roster_,
                                                  frame_index_, params_.proposal());
        for (Part& p : proposals.accepted) roster_.add(std::move(p));
    }

    TrackerParams params_;
    PartRoster roster_;
    AutomatonState state_ = AutomatonState::S;
    int frame_w_ = 0;
    int frame_h_ = 0;
    int box_w_ = 0;
    int box_h_ = 0;
    int anchor_x_ = 0;
    int anchor_y_ = 0;
    int frame_index_ = 0;
    int frames_since_update_ = 0;
};

}  // namespace stp
