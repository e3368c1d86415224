#pragma once

// Deterministic synthetic sequences: a textured rigid object moving over a
// cluttered static background, with optional full-occlusion windows (the
// object is simply not drawn) and a piecewise-linear illumination gain on the
// object. Ground truth is the exact integer position the object was drawn at.
//
// Config is JSON:
//   {
//     "name": "demo", "width": 256, "height": 192, "frames": 120, "seed": 7,
//     "background": {"noise": 1.0, "blobs": 40},
//     "object": {"width": 64, "height": 64},
//     "start": {"x": 20, "y": 30},
//     "motion": [{"from": 1, "vx": 2.0, "vy": 1.0}],
//     "occlusions": [{"from": 60, "to": 69}],
//     "illumination": [{"frame": 1, "gain": 1.0}, {"frame": 120, "gain": 1.3}]
//   }
// Frames are 1-based; a motion segment applies from its frame onward; the
// object must stay inside the frame at every step.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stp/errors.hpp"
#include "stp/io.hpp"
#include "stp/raster.hpp"

namespace stp {

struct MotionSegment {
    int from = 1;
    double vx = 0.0;
    double vy = 0.0;
};

struct OcclusionWindow {
    int from = 0;
    int to = 0;  // inclusive
};

struct IlluminationKey {
    int frame = 1;
    double gain = 1.0;
};

struct SynthConfig {
    std::string name = "synthetic";
    int width = 256;
    int height = 192;
    int frames = 100;
    uint64_t seed = 1;
    double background_noise = 1.0;
    int background_blobs = 30;
    int texture_blur = 3;  // 3x3 box-blur passes; widens the autocorrelation
    int object_w = 64;
    int object_h = 64;
    double start_x = 20;
    double start_y = 20;
    std::vector<MotionSegment> motion;
    std::vector<OcclusionWindow> occlusions;
    std::vector<IlluminationKey> illumination;
};

struct SynthSequence {
    SynthConfig config;
    std::vector<ImageU8> frames;
    std::vector<Box> gt;            // exact drawn position, one per frame
    std::vector<uint8_t> occluded;  // one flag per frame
};

namespace detail {

// xorshift-based generator with a fixed layout so sequences are identical
// across platforms and standard-library versions.
class SynthRng {
public:
    explicit SynthRng(uint64_t seed) : s_(seed ? seed : 0x9e3779b97f4a7c15ull) {}
    uint64_t next() {
        uint64_t x = s_;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        return s_ = x;
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    int uniform_int(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(uniform() * (hi - lo + 1));
    }

private:
    uint64_t s_;
};

inline void box_blur3(ImageU8& img) {
    ImageU8 src = img;
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < img.channels; ++c) {
                int sum = 0;
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int sx = std::clamp(x + dx, 0, img.width - 1);
                        const int sy = std::clamp(y + dy, 0, img.height - 1);
                        sum += src.at(sx, sy, c);
                    }
                img.at(x, y, c) = static_cast<uint8_t>(sum / 9);
            }
}

}  // namespace detail

inline SynthConfig parse_synth_config(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad synthetic config: ") + e.what());
    }
    SynthConfig cfg;
    try {
        cfg.name = j.value("name", cfg.name);
        cfg.width = j.value("width", cfg.width);
        cfg.height = j.value("height", cfg.height);
        cfg.frames = j.value("frames", cfg.frames);
        cfg.seed = j.value("seed", cfg.seed);
        if (j.contains("background")) {
            cfg.background_noise = j["background"].value("noise", cfg.background_noise);
            cfg.background_blobs = j["background"].value("blobs", cfg.background_blobs);
        }
        cfg.texture_blur = j.value("texture_blur", cfg.texture_blur);
        if (j.contains("object")) {
            cfg.object_w = j["object"].value("width", cfg.object_w);
            cfg.object_h = j["object"].value("height", cfg.object_h);
        }
        if (j.contains("start")) {
            cfg.start_x = j["start"].value("x", cfg.start_x);
            cfg.start_y = j["start"].value("y", cfg.start_y);
        }
        for (const auto& m : j.value("motion", nlohmann::json::array()))
            cfg.motion.push_back({m.value("from", 1), m.value("vx", 0.0), m.value("vy", 0.0)});
        for (const auto& o : j.value("occlusions", nlohmann::json::array()))
            cfg.occlusions.push_back({o.value("from", 0), o.value("to", -1)});
        for (const auto& k : j.value("illumination", nlohmann::json::array()))
            cfg.illumination.push_back({k.value("frame", 1), k.value("gain", 1.0)});
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad synthetic config: ") + e.what());
    }
    return cfg;
}

inline SynthConfig load_synth_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open config: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_synth_config(buf.str());
}

inline SynthSequence generate_synthetic(const SynthConfig& cfg) {
    if (cfg.width < 8 || cfg.height < 8 || cfg.frames < 1)
        throw ConfigError("synthetic: frame size or length too small");
    if (cfg.object_w < 4 || cfg.object_h < 4 ||
        cfg.object_w > cfg.width || cfg.object_h > cfg.height)
        throw ConfigError("synthetic: object does not fit the frame");
    for (const auto& o : cfg.occlusions)
        if (o.from > o.to || o.from < 1)
            throw ConfigError("synthetic: bad occlusion window");

    detail::SynthRng rng(cfg.seed);

    ImageU8 background = ImageU8::make(cfg.width, cfg.height, 3);
    for (uint8_t& v : background.pixels)
        v = static_cast<uint8_t>(std::clamp(
            128.0 + cfg.background_noise * (rng.uniform() * 255.0 - 128.0), 0.0, 255.0));
    for (int b = 0; b < cfg.background_blobs; ++b) {
        const int bw = rng.uniform_int(8, std::max(8, cfg.width / 3));
        const int bh = rng.uniform_int(8, std::max(8, cfg.height / 3));
        const int bx = rng.uniform_int(0, cfg.width - 1);
        const int by = rng.uniform_int(0, cfg.height - 1);
        uint8_t color[3] = {static_cast<uint8_t>(rng.uniform_int(0, 255)),
                            static_cast<uint8_t>(rng.uniform_int(0, 255)),
                            static_cast<uint8_t>(rng.uniform_int(0, 255))};
        for (int y = by; y < std::min(cfg.height, by + bh); ++y)
            for (int x = bx; x < std::min(cfg.width, bx + bw); ++x)
                for (int c = 0; c < 3; ++c)
                    background.at(x, y, c) =
                        static_cast<uint8_t>((background.at(x, y, c) + 2 * color[c]) / 3);
    }
    for (int pass = 0; pass < cfg.texture_blur; ++pass) detail::box_blur3(background);

    ImageU8 object = ImageU8::make(cfg.object_w, cfg.object_h, 3);
    for (uint8_t& v : object.pixels) v = static_cast<uint8_t>(rng.uniform_int(0, 255));
    for (int pass = 0; pass < cfg.texture_blur; ++pass) detail::box_blur3(object);

    std::vector<MotionSegment> motion = cfg.motion;
    std::stable_sort(motion.begin(), motion.end(),
                     [](const MotionSegment& a, const MotionSegment& b) { return a.from < b.from; });

    auto gain_at = [&cfg](int frame) {
        if (cfg.illumination.empty()) return 1.0;
        const auto& keys = cfg.illumination;
        if (frame <= keys.front().frame) return keys.front().gain;
        for (size_t i = 1; i < keys.size(); ++i)
            if (frame <= keys[i].frame) {
                const double t = static_cast<double>(frame - keys[i - 1].frame) /
                                 std::max(1, keys[i].frame - keys[i - 1].frame);
                return keys[i - 1].gain + t * (keys[i].gain - keys[i - 1].gain);
            }
        return keys.back().gain;
    };

    SynthSequence seq;
    seq.config = cfg;
    double px = cfg.start_x, py = cfg.start_y;
    double vx = 0.0, vy = 0.0;
    size_t mseg = 0;
    for (int f = 1; f <= cfg.frames; ++f) {
        while (mseg < motion.size() && motion[mseg].from <= f) {
            vx = motion[mseg].vx;
            vy = motion[mseg].vy;
            ++mseg;
        }
        const int draw_x = static_cast<int>(std::lround(px));
        const int draw_y = static_cast<int>(std::lround(py));
        if (draw_x < 0 || draw_y < 0 || draw_x + cfg.object_w > cfg.width ||
            draw_y + cfg.object_h > cfg.height)
            throw ConfigError("synthetic: object leaves the frame at frame " + std::to_string(f));

        bool occluded = false;
        for (const auto& o : cfg.occlusions) occluded = occluded || (f >= o.from && f <= o.to);

        ImageU8 frame = background;
        if (!occluded) {
            const double gain = gain_at(f);
            for (int y = 0; y < cfg.object_h; ++y)
                for (int x = 0; x < cfg.object_w; ++x)
                    for (int c = 0; c < 3; ++c)
                        frame.at(draw_x + x, draw_y + y, c) = static_cast<uint8_t>(
                            std::clamp(object.at(x, y, c) * gain, 0.0, 255.0));
        }
        seq.frames.push_back(std::move(frame));
        seq.gt.push_back({static_cast<double>(draw_x), static_cast<double>(draw_y),
                          static_cast<double>(cfg.object_w), static_cast<double>(cfg.object_h)});
        seq.occluded.push_back(occluded ? 1 : 0);
        px += vx;
        py += vy;
    }
    return seq;
}

// Writes the standard on-disk layout: img/0001.ppm ..., groundtruth_rect.txt,
// and occlusion.txt when any frame is occluded.
inline void write_sequence(const SynthSequence& seq, const std::string& directory) {
    namespace fs = std::filesystem;
    const fs::path root(directory);
    fs::create_directories(root / "img");
    char name[32];
    for (size_t i = 0; i < seq.frames.size(); ++i) {
        std::snprintf(name, sizeof(name), "%04zu.ppm", i + 1);
        write_pnm((root / "img" / name).string(), seq.frames[i]);
    }
    std::ofstream gt(root / "groundtruth_rect.txt");
    if (!gt) throw LoadError("cannot write ground truth under " + directory);
    for (const Box& b : seq.gt)
        gt << static_cast<long long>(b.x) << "," << static_cast<long long>(b.y) << ","
           << static_cast<long long>(b.w) << "," << static_cast<long long>(b.h) << "\n";
    bool any = false;
    for (uint8_t f : seq.occluded) any = any || f;
    if (any) {
        std::ofstream occ(root / "occlusion.txt");
        for (uint8_t f : seq.occluded) occ << int(f) << "\n";
    }
}

}  // namespace stp
