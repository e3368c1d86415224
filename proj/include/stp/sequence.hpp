#pragma once

// Sequence ingestion. On-disk layout follows the common benchmark
// convention: a directory with an img/ subfolder of numbered frames and a
// groundtruth_rect.txt with one x,y,w,h box per line (comma, tab or space
// separated, top-left corner convention, coordinates taken as given). An
// optional occlusion.txt holds one 0/1 flag per frame.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "stp/errors.hpp"
#include "stp/io.hpp"
#include "stp/raster.hpp"

namespace stp {

struct SequenceSpec {
    std::string name;
    std::vector<std::string> frame_paths;
    std::vector<Box> boxes;          // may be shorter or longer than frames
    std::vector<uint8_t> occluded;   // empty, or one flag per frame
    std::vector<std::string> warnings;
};

namespace detail {

inline long long leading_number(const std::string& stem) {
    size_t i = 0;
    while (i < stem.size() && !std::isdigit(static_cast<unsigned char>(stem[i]))) ++i;
    long long value = -1;
    while (i < stem.size() && std::isdigit(static_cast<unsigned char>(stem[i]))) {
        if (value < 0) value = 0;
        value = value * 10 + (stem[i] - '0');
        ++i;
    }
    return value;
}

inline bool image_suffix(const std::string& name) {
    for (const char* s : {".ppm", ".pgm", ".pnm", ".jpg", ".jpeg", ".png", ".bmp"})
        if (has_suffix(name, s)) return true;
    return false;
}

inline std::vector<Box> parse_box_lines(std::istream& in, const std::string& context) {
    std::vector<Box> boxes;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        for (char& c : line)
            if (c == ',' || c == '\t' || c == ';') c = ' ';
        std::istringstream ls(line);
        Box b;
        if (!(ls >> b.x >> b.y >> b.w >> b.h)) {
            if (line.find_first_not_of(" \r\n") == std::string::npos) continue;  // blank
            throw LoadError(context + ": bad box on line " + std::to_string(lineno));
        }
        boxes.push_back(b);
    }
    return boxes;
}

}  // namespace detail

inline SequenceSpec load_sequence(const std::string& directory) {
    namespace fs = std::filesystem;
    const fs::path root(directory);
    if (!fs::is_directory(root)) throw LoadError("not a directory: " + directory);

    SequenceSpec spec;
    spec.name = root.filename().string();
    if (spec.name.empty()) spec.name = root.parent_path().filename().string();

    fs::path img_dir = root / "img";
    if (!fs::is_directory(img_dir)) img_dir = root;
    std::vector<std::pair<long long, std::string>> frames;
    for (const auto& entry : fs::directory_iterator(img_dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (!detail::image_suffix(name)) continue;
        frames.emplace_back(detail::leading_number(entry.path().stem().string()),
                            entry.path().string());
    }
    std::sort(frames.begin(), frames.end());
    for (auto& [num, path] : frames) spec.frame_paths.push_back(std::move(path));
    if (spec.frame_paths.empty()) throw LoadError("no frames found under " + img_dir.string());

    fs::path gt_path = root / "groundtruth_rect.txt";
    if (!fs::exists(gt_path)) gt_path = root / "groundtruth.txt";
    if (!fs::exists(gt_path)) throw LoadError("no ground-truth file in " + directory);
    std::ifstream gt(gt_path);
    if (!gt) throw LoadError("cannot open " + gt_path.string());
    spec.boxes = detail::parse_box_lines(gt, gt_path.string());
    if (spec.boxes.empty()) throw LoadError(gt_path.string() + ": no boxes");
    if (spec.boxes.size() != spec.frame_paths.size())
        spec.warnings.push_back("frame/box count mismatch (" +
                                std::to_string(spec.frame_paths.size()) + " frames, " +
                                std::to_string(spec.boxes.size()) +
                                " boxes); evaluating the overlap");

    const fs::path occ_path = root / "occlusion.txt";
    if (fs::exists(occ_path)) {
        std::ifstream occ(occ_path);
        int flag;
        while (occ >> flag) spec.occluded.push_back(flag ? 1 : 0);
        if (!spec.occluded.empty() && spec.occluded.size() != spec.frame_paths.size())
            spec.warnings.push_back("occlusion flag count differs from frame count");
    }
    return spec;
}

}  // namespace stp
