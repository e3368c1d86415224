#pragma once

// Shared fixtures for the test suite: deterministic textures, scratch
// directories, and a grammar checker for tracking traces.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "stp/engine.hpp"
#include "stp/raster.hpp"

namespace testsupport {

// Independent of the library's generator on purpose: tests of the synthetic
// pipeline should not receive their fixtures from the code under test.
inline uint64_t mix64(uint64_t x) {
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdull;
    x ^= x >> 33;
    x *= 0xc4ceb9fe1a85ec53ull;
    x ^= x >> 33;
    return x;
}

inline stp::ImageU8 noise_frame(int w, int h, uint64_t seed, int channels = 3) {
    stp::ImageU8 im = stp::ImageU8::make(w, h, channels);
    for (size_t i = 0; i < im.pixels.size(); ++i)
        im.pixels[i] = static_cast<uint8_t>(mix64(seed * 0x9e3779b97f4a7c15ull + i) & 0xff);
    return im;
}

// 3x3 box blur, clamped borders; applied in place for `passes` rounds.
// Widens the texture autocorrelation so smoothed vote maps keep their peaks.
inline void blur_frame(stp::ImageU8& im, int passes) {
    for (int pass = 0; pass < passes; ++pass) {
        stp::ImageU8 src = im;
        for (int y = 0; y < im.height; ++y) {
            for (int x = 0; x < im.width; ++x) {
                for (int c = 0; c < im.channels; ++c) {
                    int sum = 0;
                    for (int dy = -1; dy <= 1; ++dy) {
                        for (int dx = -1; dx <= 1; ++dx) {
                            const int sx = std::clamp(x + dx, 0, im.width - 1);
                            const int sy = std::clamp(y + dy, 0, im.height - 1);
                            sum += src.at(sx, sy, c);
                        }
                    }
                    im.at(x, y, c) = static_cast<uint8_t>(sum / 9);
                }
            }
        }
    }
}

inline stp::ImageU8 textured_frame(int w, int h, uint64_t seed, int blur_passes = 2) {
    stp::ImageU8 im = noise_frame(w, h, seed);
    blur_frame(im, blur_passes);
    return im;
}

// Scratch directory under the system temp root, removed on destruction.
struct TempDir {
    std::filesystem::path path;

    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        const uint64_t nonce = (static_cast<uint64_t>(rd()) << 32) ^ rd();
        path = std::filesystem::temp_directory_path() / (tag + "_" + std::to_string(nonce));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name) const { return (path / name).string(); }
};

// Validates the per-frame label/state grammar of a tracking trace. Returns an
// empty string when the trace is well formed, otherwise a description of the
// first violation. records[0] must be the initialization frame.
inline std::string check_trace(const std::vector<stp::FrameRecord>& recs, stp::TrackerMode mode,
                               double t_v_factor) {
    using stp::AutomatonState;
    using stp::TrackerMode;
    auto fail = [](int frame, const std::string& what) {
        return "frame " + std::to_string(frame) + ": " + what;
    };
    if (recs.empty()) return "empty trace";
    if (recs[0].label != 'S' || recs[0].end_state != AutomatonState::S)
        return fail(recs[0].frame, "initialization frame must hold in S");
    for (size_t t = 1; t < recs.size(); ++t) {
        const stp::FrameRecord& r = recs[t];
        const stp::FrameRecord& prev = recs[t - 1];
        const bool strong = r.m_v > r.t_v_eff;
        switch (r.label) {
            case 'S':
                if (r.end_state != AutomatonState::S) return fail(r.frame, "S frame must end in S");
                if (!strong && mode != TrackerMode::SOnly)
                    return fail(r.frame, "weak vote kept the S label outside plain mode");
                if (!r.moved) return fail(r.frame, "S frames always move");
                break;
            case 'U':
                if (r.end_state != AutomatonState::S) return fail(r.frame, "U frame must end in S");
                if (!strong) return fail(r.frame, "update phase on a weak vote");
                if (!r.moved) return fail(r.frame, "U frames always move");
                break;
            case 'W':
                if (mode == TrackerMode::SOnly) return fail(r.frame, "W label in plain mode");
                if (prev.end_state == AutomatonState::C)
                    return fail(r.frame, "W cannot follow crisis");
                if (prev.end_state == AutomatonState::W && mode != TrackerMode::SW)
                    return fail(r.frame, "W persists only in the no-crisis mode");
                if (strong) {
                    if (r.end_state != AutomatonState::S)
                        return fail(r.frame, "strong re-vote must recover to S");
                    if (!r.moved) return fail(r.frame, "strong re-vote moves");
                } else {
                    const AutomatonState want =
                        mode == TrackerMode::Full ? AutomatonState::C : AutomatonState::W;
                    if (r.end_state != want)
                        return fail(r.frame, "weak re-vote must hold or enter crisis");
                    if (r.moved) return fail(r.frame, "weak re-vote must hold position");
                }
                break;
            case 'C':
                if (mode != TrackerMode::Full) return fail(r.frame, "crisis outside full mode");
                if (prev.end_state != AutomatonState::C)
                    return fail(r.frame, "crisis entered without a failed re-vote");
                if (r.end_state != (strong ? AutomatonState::S : AutomatonState::C))
                    return fail(r.frame, "crisis exit disagrees with the vote");
                if (!r.moved) return fail(r.frame, "crisis frames always move");
                break;
            default:
                return fail(r.frame, std::string("unknown label ") + r.label);
        }
        if (r.end_state == AutomatonState::W && mode != TrackerMode::SW)
            return fail(r.frame, "resting W outside the no-crisis mode");
        if (r.end_state == AutomatonState::C && mode != TrackerMode::Full)
            return fail(r.frame, "resting C outside full mode");
        // Frames without roster mutations must report the canonical threshold.
        if (r.label == 'S' || r.label == 'C') {
            const double expect = t_v_factor * (r.n_reliable + r.n_gold);
            if (std::abs(r.t_v_eff - expect) > 1e-9)
                return fail(r.frame, "vote threshold out of step with the voting roster");
        }
    }
    return "";
}

}  // namespace testsupport
