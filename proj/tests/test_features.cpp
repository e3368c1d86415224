#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <fstream>

#include "stp/channels.hpp"
#include "stp/io.hpp"
#include "stp/raster.hpp"
#include "support.hpp"

using namespace stp;
using Catch::Matchers::WithinAbs;

TEST_CASE("color planes scale bytes to the unit interval") {
    ImageU8 im = ImageU8::make(4, 3, 3);
    im.at(1, 2, 0) = 255;
    im.at(1, 2, 1) = 128;
    im.at(1, 2, 2) = 51;
    const ChannelStack s = build_channel_stack(im);
    REQUIRE_THAT(s.plane[0].at(1, 2), WithinAbs(1.0, 1e-15));
    REQUIRE_THAT(s.plane[1].at(1, 2), WithinAbs(128.0 / 255.0, 1e-15));
    REQUIRE_THAT(s.plane[2].at(1, 2), WithinAbs(0.2, 1e-15));
    REQUIRE_THAT(s.plane[0].at(0, 0), WithinAbs(0.0, 1e-15));
}

TEST_CASE("grayscale input is replicated into all color planes") {
    ImageU8 im = testsupport::noise_frame(6, 5, 7, 1);
    const ChannelStack s = build_channel_stack(im);
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 6; ++x) {
            REQUIRE(s.plane[0].at(x, y) == s.plane[1].at(x, y));
            REQUIRE(s.plane[1].at(x, y) == s.plane[2].at(x, y));
        }
}

TEST_CASE("channel stack rejects unusable frames") {
    REQUIRE_THROWS_AS(build_channel_stack(ImageU8{}), InvalidInput);
    REQUIRE_THROWS_AS(build_channel_stack(ImageU8::make(4, 4, 2)), InvalidInput);
}

TEST_CASE("gradient channels match the analytic values of a ramp") {
    // Horizontal ramp: intensity 30*x. The four orientation responses follow
    // from central differences with clamped neighbors and the diagonal step.
    const int w = 8, h = 6;
    ImageU8 im = ImageU8::make(w, h, 1);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) im.at(x, y, 0) = static_cast<uint8_t>(30 * x);
    const ChannelStack s = build_channel_stack(im);

    const double c = 30.0 / 255.0;        // gray-level slope per pixel
    const double diag = c / std::sqrt(2.0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const bool edge = (x == 0 || x == w - 1);
            const double axial = edge ? c / 2 : c;
            REQUIRE_THAT(s.plane[3].at(x, y), WithinAbs(axial, 1e-12));
            REQUIRE_THAT(s.plane[5].at(x, y), WithinAbs(0.0, 1e-12));
            REQUIRE_THAT(s.plane[4].at(x, y), WithinAbs(edge ? diag / 2 : diag, 1e-12));
            REQUIRE_THAT(s.plane[6].at(x, y), WithinAbs(edge ? diag / 2 : diag, 1e-12));
        }
    }
}

TEST_CASE("vertical ramp drives only the vertical and diagonal channels") {
    const int w = 6, h = 9;
    ImageU8 im = ImageU8::make(w, h, 1);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) im.at(x, y, 0) = static_cast<uint8_t>(20 * y);
    const ChannelStack s = build_channel_stack(im);
    const double c = 20.0 / 255.0;
    // interior pixel
    REQUIRE_THAT(s.plane[3].at(2, 4), WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(s.plane[5].at(2, 4), WithinAbs(c, 1e-12));
    REQUIRE_THAT(s.plane[4].at(2, 4), WithinAbs(c / std::sqrt(2.0), 1e-12));
    REQUIRE_THAT(s.plane[6].at(2, 4), WithinAbs(c / std::sqrt(2.0), 1e-12));
}

TEST_CASE("integral images reproduce brute-force box sums") {
    const ImageU8 im = testsupport::noise_frame(23, 17, 3);
    const ChannelStack s = build_channel_stack(im);
    REQUIRE(s.integral[0].width() == 24);
    REQUIRE(s.integral[0].height() == 18);
    for (int ch = 0; ch < kChannels; ++ch) {
        for (auto [x0, y0, bw, bh] : {std::array{0, 0, 23, 17}, std::array{5, 3, 7, 9},
                                      std::array{22, 16, 1, 1}, std::array{0, 10, 23, 1}}) {
            double brute = 0.0;
            for (int y = y0; y < y0 + bh; ++y)
                for (int x = x0; x < x0 + bw; ++x) brute += s.plane[ch].at(x, y);
            REQUIRE_THAT(s.box_sum(ch, x0, y0, bw, bh), WithinAbs(brute, 1e-9));
            REQUIRE_THAT(s.box_mean(ch, x0, y0, bw, bh), WithinAbs(brute / (bw * bh), 1e-9));
        }
    }
}

TEST_CASE("square geometry is the identity sampling grid") {
    const PatchGeometry g = PatchGeometry::square(17);
    REQUIRE(g.win_w == 17);
    REQUIRE(g.grid_w == 17);
    REQUIRE(g.contiguous());
    REQUIRE(g.k() == 17 * 17 * 7);
    REQUIRE(g.samples_per_channel() == 289);
    for (int j = 0; j < 17; ++j) {
        REQUIRE(g.off_x[j] == j);
        REQUIRE(g.off_y[j] == j);
    }
}

TEST_CASE("downsampled geometry spreads samples across the window") {
    const PatchGeometry g = PatchGeometry::boxed(64, 64, 40);
    REQUIRE(g.grid_w == 40);
    REQUIRE(g.grid_h == 40);
    REQUIRE_FALSE(g.contiguous());
    REQUIRE(g.k() == 40 * 40 * 7);
    REQUIRE(g.off_x[0] == 0);
    REQUIRE(g.off_x[20] == 32);
    REQUIRE(g.off_x[39] == 63);
    for (int j = 1; j < 40; ++j) REQUIRE(g.off_x[j] >= g.off_x[j - 1]);
    for (int j = 0; j < 40; ++j) {
        REQUIRE(g.off_x[j] >= 0);
        REQUIRE(g.off_x[j] < 64);
    }
}

TEST_CASE("rectangular geometry downsamples each axis independently") {
    const PatchGeometry g = PatchGeometry::boxed(50, 30, 40);
    REQUIRE(g.grid_w == 40);
    REQUIRE(g.grid_h == 30);
    for (int j = 0; j < 30; ++j) REQUIRE(g.off_y[j] == j);  // y axis stays contiguous
    REQUIRE(g.k() == 40 * 30 * 7);
    REQUIRE_THROWS_AS(PatchGeometry::boxed(0, 5, 40), InvalidInput);
    REQUIRE_THROWS_AS(PatchGeometry::square(-1), InvalidInput);
}

TEST_CASE("window origins center interior points and clamp at borders") {
    const ChannelStack s = build_channel_stack(testsupport::noise_frame(20, 15, 11));
    const PatchGeometry g = PatchGeometry::square(5);
    REQUIRE(clamp_window_origin(s, 10, 7, g) == PointI{8, 5});
    REQUIRE(clamp_window_origin(s, 1, 1, g) == PointI{0, 0});
    REQUIRE(clamp_window_origin(s, 19, 14, g) == PointI{15, 10});
    REQUIRE_THROWS_AS(clamp_window_origin(s, 10, 7, PatchGeometry::square(25)), OutOfBounds);
}

TEST_CASE("descriptors vectorize the window channel by channel") {
    const ChannelStack s = build_channel_stack(testsupport::noise_frame(16, 12, 5));
    const PatchGeometry g = PatchGeometry::square(3);
    const Eigen::VectorXd d = extract_descriptor(s, 5, 5, g);
    REQUIRE(d.size() == 63);
    for (int ch = 0; ch < kChannels; ++ch)
        for (int gy = 0; gy < 3; ++gy)
            for (int gx = 0; gx < 3; ++gx)
                REQUIRE(d[ch * 9 + gy * 3 + gx] == s.plane[ch].at(4 + gx, 4 + gy));
}

TEST_CASE("mean centering zeroes each channel block") {
    const ChannelStack s = build_channel_stack(testsupport::noise_frame(16, 12, 5));
    const Eigen::VectorXd raw = extract_descriptor(s, 7, 6, 5, false);
    const Eigen::VectorXd centered = extract_descriptor(s, 7, 6, 5, true);
    for (int ch = 0; ch < kChannels; ++ch) {
        const auto block = centered.segment(ch * 25, 25);
        REQUIRE_THAT(block.sum(), WithinAbs(0.0, 1e-12));
        const double mean = raw.segment(ch * 25, 25).mean();
        for (int i = 0; i < 25; ++i)
            REQUIRE_THAT(block[i], WithinAbs(raw[ch * 25 + i] - mean, 1e-12));
    }
}

TEST_CASE("downsampled descriptors pick the grid offsets") {
    const ChannelStack s = build_channel_stack(testsupport::noise_frame(80, 70, 9));
    const PatchGeometry g = PatchGeometry::boxed(60, 50, 8);
    const PointI o = clamp_window_origin(s, 40, 35, g);
    const Eigen::VectorXd d = extract_descriptor(s, 40, 35, g);
    REQUIRE(d.size() == 8 * 8 * 7);
    for (int gy = 0; gy < 8; ++gy)
        for (int gx = 0; gx < 8; ++gx)
            REQUIRE(d[gy * 8 + gx] == s.plane[0].at(o.x + g.off_x[gx], o.y + g.off_y[gy]));
}

TEST_CASE("edge density sums gradient mass over truncated windows") {
    const ChannelStack s = build_channel_stack(testsupport::textured_frame(25, 19, 13, 1));
    const int window = 5, half = 2;
    const RasterD density = edge_density_map(s, window);
    for (auto [px, py] : {PointI{12, 9}, PointI{0, 0}, PointI{24, 18}, PointI{1, 9}}) {
        double brute = 0.0;
        for (int ch = 3; ch < kChannels; ++ch)
            for (int y = std::max(0, py - half); y <= std::min(18, py - half + window - 1); ++y)
                for (int x = std::max(0, px - half); x <= std::min(24, px - half + window - 1); ++x)
                    brute += s.plane[ch].at(x, y);
        REQUIRE_THAT(density.at(px, py), WithinAbs(brute, 1e-9));
    }
    REQUIRE_THROWS_AS(edge_density_map(s, 0), InvalidInput);
    REQUIRE_THROWS_AS(edge_density_map(s, 20), InvalidInput);
}

TEST_CASE("pnm files round trip bit for bit") {
    testsupport::TempDir dir("pnm_roundtrip");
    SECTION("three channels") {
        const ImageU8 im = testsupport::noise_frame(31, 22, 17);
        write_pnm(dir.file("a.ppm"), im);
        const ImageU8 back = read_pnm(dir.file("a.ppm"));
        REQUIRE(back.width == im.width);
        REQUIRE(back.height == im.height);
        REQUIRE(back.channels == 3);
        REQUIRE(back.pixels == im.pixels);
    }
    SECTION("single channel") {
        const ImageU8 im = testsupport::noise_frame(9, 14, 19, 1);
        write_pnm(dir.file("a.pgm"), im);
        const ImageU8 back = read_pnm(dir.file("a.pgm"));
        REQUIRE(back.channels == 1);
        REQUIRE(back.pixels == im.pixels);
    }
}

TEST_CASE("pnm reader handles comments and rejects damage") {
    testsupport::TempDir dir("pnm_bad");
    {
        std::ofstream out(dir.file("c.pgm"), std::ios::binary);
        out << "P5\n# a comment\n4 3\n255\n";
        for (int i = 0; i < 12; ++i) out.put(static_cast<char>(i));
    }
    const ImageU8 im = read_pnm(dir.file("c.pgm"));
    REQUIRE(im.width == 4);
    REQUIRE(im.height == 3);
    REQUIRE(im.at(3, 2, 0) == 11);

    {
        std::ofstream out(dir.file("ascii.pgm"));
        out << "P2\n4 3\n255\n0 0 0 0 0 0 0 0 0 0 0 0\n";
    }
    REQUIRE_THROWS_AS(read_pnm(dir.file("ascii.pgm")), LoadError);

    {
        std::ofstream out(dir.file("short.pgm"), std::ios::binary);
        out << "P5\n4 3\n255\n";
        out.put('\0');
    }
    REQUIRE_THROWS_AS(read_pnm(dir.file("short.pgm")), LoadError);
    REQUIRE_THROWS_AS(read_pnm(dir.file("missing.pgm")), LoadError);
}

TEST_CASE("image loading dispatches on the suffix") {
    testsupport::TempDir dir("load_image");
    const ImageU8 im = testsupport::noise_frame(6, 4, 23);
    write_pnm(dir.file("f.PPM"), im);  // case-insensitive suffix
    REQUIRE(load_image(dir.file("f.PPM")).pixels == im.pixels);

    REQUIRE_THROWS_AS(load_image(dir.file("f.xyz")), LoadError);

    struct DecoderGuard {
        ~DecoderGuard() { extra_image_decoder() = nullptr; }
    } guard;
    extra_image_decoder() = [](const std::string&) { return ImageU8::make(2, 2, 3, 42); };
    const ImageU8 decoded = load_image(dir.file("f.xyz"));
    REQUIRE(decoded.width == 2);
    REQUIRE(decoded.pixels[0] == 42);
}
