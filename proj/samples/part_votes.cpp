// A look under the tracker's hood: propose part classifiers on the first
// frame of a synthetic sequence, then cast their votes on a later frame and
// compare the vote-map peak with the true object center.

#include <cmath>
#include <cstdio>

#include <stp/stp.hpp>

int main() {
    stp::SynthConfig cfg;
    cfg.name = "anatomy";
    cfg.width = 160;
    cfg.height = 120;
    cfg.frames = 8;
    cfg.seed = 9;
    cfg.object_w = 40;
    cfg.object_h = 40;
    cfg.start_x = 30;
    cfg.start_y = 24;
    cfg.motion = {{1, 2.0, 1.0}};
    const stp::SynthSequence seq = stp::generate_synthetic(cfg);

    // Train parts on the first frame inside the ground-truth box.
    const stp::ChannelStack first = stp::build_channel_stack(seq.frames[0]);
    const stp::Box& init = seq.gt[0];
    const stp::RegionRect box{static_cast<int>(std::lround(init.x)),
                              static_cast<int>(std::lround(init.y)),
                              static_cast<int>(std::lround(init.w)),
                              static_cast<int>(std::lround(init.h))};
    const int cx0 = static_cast<int>(std::lround(init.cx()));
    const int cy0 = static_cast<int>(std::lround(init.cy()));

    stp::TrackerParams params;
    stp::PartRoster roster;
    stp::ProposalOutcome outcome =
        stp::propose_parts(first, box, cx0, cy0, roster, 1, params.proposal());
    for (stp::Part& p : outcome.accepted) {
        p.state = stp::PartState::Reliable;
        roster.add(std::move(p));
    }
    std::printf("screened %d grid points, accepted %zu parts\n", outcome.screened,
                roster.size());
    for (const stp::Part& p : roster.parts())
        std::printf("  part %2d  %7s  offset (%+3d,%+3d)  %d weights\n", p.id,
                    stp::to_string(p.size_class), p.offset_x, p.offset_y,
                    static_cast<int>(p.classifier.size()));

    // Vote on a later frame: search around the stale center, find the peak.
    const size_t probe = 5;
    const stp::ChannelStack later = stp::build_channel_stack(seq.frames[probe]);
    const int x0 = std::max(0, cx0 - params.delta);
    const int y0 = std::max(0, cy0 - params.delta);
    const int x1 = std::min(cfg.width - 1, cx0 + params.delta);
    const int y1 = std::min(cfg.height - 1, cy0 + params.delta);
    const stp::RegionRect region{x0, y0, x1 - x0 + 1, y1 - y0 + 1};

    const stp::VoteResult votes = stp::cast_votes(later, stp::voting_subset(roster, false),
                                                  region, params.sigma_smooth);
    const int tx = static_cast<int>(std::lround(seq.gt[probe].cx()));
    const int ty = static_cast<int>(std::lround(seq.gt[probe].cy()));
    std::printf("frame %zu: vote peak (%d,%d) strength %.2f, true center (%d,%d)\n", probe + 1,
                votes.map.peak_x, votes.map.peak_y, votes.map.m_v, tx, ty);

    int agreers = 0;
    for (bool a : stp::agreement_set(votes.part_votes, votes.map.peak_x, votes.map.peak_y,
                                     params.agree_radius))
        agreers += a ? 1 : 0;
    std::printf("%d of %zu parts put their own peak within %dpx of the chosen center\n",
                agreers, votes.part_votes.size(), params.agree_radius);

    const bool on_target = std::abs(votes.map.peak_x - tx) <= 2 &&
                           std::abs(votes.map.peak_y - ty) <= 2;
    return on_target ? 0 : 1;
}
