#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hwstack/common.hpp"
#include "hwstack/windows.hpp"

using namespace hwstack;

namespace {

Raster smooth_noise(int w, int h, std::uint64_t seed) {
    SeededRng rng(seed);
    Raster coarse(w / 4 + 2, h / 4 + 2);
    for (float& v : coarse.data) v = static_cast<float>(rng.uniform01());
    Raster out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            out.at(x, y) = coarse.sample(x / 4.0, y / 4.0, 0.5f);
    return out;
}

double max_abs_diff(const float* a, const float* b, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(static_cast<double>(a[i]) - b[i]));
    return m;
}

}  // namespace

TEST_CASE("window grid counts follow the stride formula", "[windows]") {
    const DescriptorConfig cfg;
    SECTION("window equals the image: one window") {
        const Pyramid pyr = build_pyramid(smooth_noise(64, 64, 1), {1.0});
        const WindowBank bank = extract_windows(pyr, 64, 8, cfg, DescriptorKind::HOG);
        REQUIRE(bank.count() == 1);
        CHECK(bank.refs[0].x == 0);
        CHECK(bank.refs[0].y == 0);
        CHECK(bank.refs[0].w == 64);
        CHECK(bank.dim == hog_dim(64, cfg));
    }
    SECTION("80px image, 64px window, stride 8: 3x3 grid in row-major order") {
        const Pyramid pyr = build_pyramid(smooth_noise(80, 80, 2), {1.0});
        const WindowBank bank = extract_windows(pyr, 64, 8, cfg, DescriptorKind::HOG);
        REQUIRE(bank.count() == 9);
        CHECK(bank.refs[0].x == 0);
        CHECK(bank.refs[0].y == 0);
        CHECK(bank.refs[1].x == 8);
        CHECK(bank.refs[1].y == 0);
        CHECK(bank.refs[3].x == 0);
        CHECK(bank.refs[3].y == 8);
        CHECK(bank.refs[8].x == 16);
        CHECK(bank.refs[8].y == 16);
    }
    SECTION("levels too small for the window are skipped") {
        const Pyramid pyr = build_pyramid(smooth_noise(80, 80, 3), {1.0, 0.5});
        const WindowBank bank = extract_windows(pyr, 64, 8, cfg, DescriptorKind::HOG);
        REQUIRE(bank.count() == 9);  // the 40px level admits nothing
        for (const WindowRef& r : bank.refs) CHECK(r.level == 0);
    }
    SECTION("multi-level banks are level-major") {
        const Pyramid pyr = build_pyramid(smooth_noise(80, 80, 4), {1.0, 0.8});
        const WindowBank bank = extract_windows(pyr, 64, 8, cfg, DescriptorKind::HOG);
        REQUIRE(bank.count() == 10);  // 9 at 80px + 1 at 64px
        for (int i = 0; i < 9; ++i) CHECK(bank.refs[i].level == 0);
        CHECK(bank.refs[9].level == 1);
    }
}

TEST_CASE("window descriptors are unit-normalized", "[windows]") {
    const Pyramid pyr = build_pyramid(smooth_noise(80, 80, 5), {1.0});
    const WindowBank bank = extract_windows(pyr, 64, 16, DescriptorConfig{}, DescriptorKind::HOG);
    for (std::size_t i = 0; i < bank.count(); ++i) {
        double nn = 0.0;
        for (std::size_t c = 0; c < bank.dim; ++c)
            nn += static_cast<double>(bank.desc(i)[c]) * bank.desc(i)[c];
        CHECK(nn == Catch::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("flat windows keep their all-zero descriptor", "[windows]") {
    const Raster img(64, 64, 0.5f);
    const Pyramid pyr = build_pyramid(img, {1.0});
    const WindowBank bank = extract_windows(pyr, 64, 8, DescriptorConfig{}, DescriptorKind::HOG);
    REQUIRE(bank.count() == 1);
    for (std::size_t c = 0; c < bank.dim; ++c) CHECK(bank.desc(0)[c] == 0.0f);
}

TEST_CASE("shared content gives identical window descriptors", "[windows]") {
    // two crops of one scene, offset by exactly one stride step
    const Raster base = smooth_noise(96, 96, 6);
    const Raster a = base.crop(0, 0, 80, 80);
    const Raster b = base.crop(8, 0, 80, 80);
    const DescriptorConfig cfg;
    const WindowBank ba =
        extract_windows(build_pyramid(a, {1.0}), 64, 8, cfg, DescriptorKind::HOG);
    const WindowBank bb =
        extract_windows(build_pyramid(b, {1.0}), 64, 8, cfg, DescriptorKind::HOG);
    REQUIRE(ba.count() == 9);
    REQUIRE(bb.count() == 9);
    // a's window at x+8 covers the same pixels as b's window at x
    for (int gy = 0; gy < 3; ++gy) {
        for (int gx = 0; gx < 2; ++gx) {
            const std::size_t ia = static_cast<std::size_t>(gy) * 3 + (gx + 1);
            const std::size_t ib = static_cast<std::size_t>(gy) * 3 + gx;
            CHECK(max_abs_diff(ba.desc(ia), bb.desc(ib), ba.dim) <= 1e-6);
        }
    }
}

TEST_CASE("descriptor kind selects the window dimension", "[windows]") {
    const Pyramid pyr = build_pyramid(smooth_noise(64, 64, 7), {1.0});
    const DescriptorConfig cfg;
    const WindowBank lb = extract_windows(pyr, 64, 8, cfg, DescriptorKind::LBP);
    CHECK(lb.dim == lbp_dim(cfg));
    const WindowBank fb = extract_windows(pyr, 64, 8, cfg, DescriptorKind::FUSED);
    CHECK(fb.dim == hog_dim(64, cfg) + lbp_dim(cfg));
}

TEST_CASE("window extraction validates geometry", "[windows]") {
    const Pyramid pyr = build_pyramid(smooth_noise(32, 32, 8), {1.0});
    const DescriptorConfig cfg;
    REQUIRE_THROWS_AS(extract_windows(pyr, 64, 8, cfg, DescriptorKind::HOG),
                      std::invalid_argument);  // no level fits
    REQUIRE_THROWS_AS(extract_windows(pyr, 8, 8, cfg, DescriptorKind::HOG),
                      std::invalid_argument);  // below the HOG minimum
    REQUIRE_THROWS_AS(extract_windows(pyr, 32, 0, cfg, DescriptorKind::HOG),
                      std::invalid_argument);
}
