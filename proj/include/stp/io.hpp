#pragma once

// Minimal PPM/PGM image IO plus a hook for an externally supplied decoder
// (the CLI registers one for jpg/png when built with OpenCV).

#include <cctype>
#include <fstream>
#include <string>

#include "stp/errors.hpp"
#include "stp/raster.hpp"

namespace stp {

using ExtraDecoder = ImageU8 (*)(const std::string& path);

// Optional decoder for formats the native reader does not handle.
inline ExtraDecoder& extra_image_decoder() {
    static ExtraDecoder decoder = nullptr;
    return decoder;
}

namespace detail {

inline int read_pnm_token(std::istream& in) {
    // skips whitespace and '#' comment lines
    while (true) {
        int c = in.peek();
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else if (std::isspace(c)) {
            in.get();
        } else {
            break;
        }
    }
    int value = -1;
    in >> value;
    return value;
}

}  // namespace detail

inline ImageU8 read_pnm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot open image: " + path);
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (magic[0] != 'P' || (magic[1] != '5' && magic[1] != '6'))
        throw LoadError("unsupported image format (need binary PGM/PPM): " + path);
    const int channels = magic[1] == '6' ? 3 : 1;
    const int w = detail::read_pnm_token(in);
    const int h = detail::read_pnm_token(in);
    const int maxval = detail::read_pnm_token(in);
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255)
        throw LoadError("bad PNM header in " + path);
    in.get();  // single whitespace after maxval
    ImageU8 im = ImageU8::make(w, h, channels);
    in.read(reinterpret_cast<char*>(im.pixels.data()), static_cast<std::streamsize>(im.pixels.size()));
    if (!in) throw LoadError("truncated image data in " + path);
    return im;
}

inline void write_pnm(const std::string& path, const ImageU8& im) {
    if (im.empty()) throw InvalidInput("cannot write empty image");
    if (im.channels != 1 && im.channels != 3)
        throw InvalidInput("write_pnm supports 1 or 3 channels");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw LoadError("cannot open for writing: " + path);
    out << (im.channels == 3 ? "P6" : "P5") << "\n" << im.width << " " << im.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(im.pixels.data()),
              static_cast<std::streamsize>(im.pixels.size()));
}

inline bool has_suffix(const std::string& s, const std::string& suffix) {
    if (s.size() < suffix.size()) return false;
    for (size_t i = 0; i < suffix.size(); ++i) {
        char a = static_cast<char>(std::tolower(static_cast<unsigned char>(s[s.size() - suffix.size() + i])));
        if (a != suffix[i]) return false;
    }
    return true;
}

inline ImageU8 load_image(const std::string& path) {
    if (has_suffix(path, ".ppm") || has_suffix(path, ".pgm") || has_suffix(path, ".pnm"))
        return read_pnm(path);
    if (auto decoder = extra_image_decoder()) {
        ImageU8 im = decoder(path);
        if (!im.empty()) return im;
        throw LoadError("decoder failed for: " + path);
    }
    throw LoadError("no decoder for: " + path + " (native support is PPM/PGM)");
}

}  // namespace stp
