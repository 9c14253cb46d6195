#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hwstack/common.hpp"
#include "hwstack/jitter.hpp"

using namespace hwstack;

TEST_CASE("integer translation moves content by exactly (dx,dy)", "[jitter]") {
    Raster img(15, 15, 0.0f);
    img.at(3, 4) = 1.0f;
    const Raster out = affine_jitter(img, {2.0, 3.0, 1.0, 0.0}, 0.0f);
    CHECK(out.at(5, 7) == 1.0f);
    CHECK(out.at(3, 4) == 0.0f);
    float total = 0.0f;
    for (float v : out.data) total += v;
    CHECK(total == 1.0f);
}

TEST_CASE("identity jitter returns pixel-identical content", "[jitter]") {
    SeededRng rng(5);
    Raster img(13, 9);
    for (float& v : img.data) v = static_cast<float>(rng.uniform01());
    const Raster out = affine_jitter(img, {0.0, 0.0, 1.0, 0.0}, 0.5f);
    REQUIRE(out.size() == img.size());
    for (std::size_t i = 0; i < img.size(); ++i) CHECK(out.data[i] == img.data[i]);
}

TEST_CASE("scaling is centered: the center pixel is fixed", "[jitter]") {
    Raster img(11, 11, 0.0f);
    img.at(5, 5) = 1.0f;  // center of an odd-sized frame
    img.at(6, 5) = 0.5f;
    const Raster out = affine_jitter(img, {0.0, 0.0, 2.0, 0.0}, 0.0f);
    CHECK(out.at(5, 5) == 1.0f);
    // 1 px right of center in the source appears 2 px right of center
    CHECK(out.at(7, 5) == 0.5f);
}

TEST_CASE("quarter-turn rotation maps the expected pixel", "[jitter]") {
    Raster img(11, 11, 0.0f);
    img.at(5, 3) = 1.0f;
    const Raster out = affine_jitter(img, {0.0, 0.0, 1.0, 90.0}, 0.0f);
    // output (7,5) samples the source at (cx + ry, cy - rx) = (5, 3)
    CHECK(out.at(7, 5) == Catch::Approx(1.0).margin(1e-6));
    CHECK(out.at(5, 3) == Catch::Approx(0.0).margin(1e-6));
}

TEST_CASE("the center lands at center + (dx,dy) for any scale/rotation", "[jitter]") {
    Raster img(21, 21, 0.25f);
    img.at(10, 10) = 1.0f;
    const Raster out = affine_jitter(img, {4.0, -3.0, 1.37, 28.0}, 0.0f);
    CHECK(out.at(14, 7) == Catch::Approx(1.0).margin(1e-2));
}

TEST_CASE("content pushed outside the frame is replaced by fill", "[jitter]") {
    Raster img(9, 9, 1.0f);
    const Raster out = affine_jitter(img, {20.0, 0.0, 1.0, 0.0}, 0.25f);
    for (float v : out.data) CHECK(v == 0.25f);
}

TEST_CASE("affine jitter validates its inputs", "[jitter]") {
    Raster img(4, 4, 0.0f);
    REQUIRE_THROWS_AS(affine_jitter(img, {0.0, 0.0, 0.0, 0.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(affine_jitter(img, {0.0, 0.0, -1.0, 0.0}), std::invalid_argument);
    const double nan = std::nan("");
    REQUIRE_THROWS_AS(affine_jitter(img, {nan, 0.0, 1.0, 0.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(affine_jitter(Raster{}, {0.0, 0.0, 1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("cyclic shift relocates and wraps pixels", "[jitter]") {
    Raster img(7, 5, 0.0f);
    img.at(0, 0) = 1.0f;
    img.at(6, 4) = 2.0f;
    const Raster out = cyclic_shift(img, 2, 3);
    CHECK(out.at(2, 3) == 1.0f);
    CHECK(out.at(1, 2) == 2.0f);  // (6+2) mod 7, (4+3) mod 5

    const Raster back = cyclic_shift(out, -2, -3);
    for (std::size_t i = 0; i < img.size(); ++i) CHECK(back.data[i] == img.data[i]);
}

TEST_CASE("cyclic shift preserves the pixel multiset", "[jitter]") {
    SeededRng rng(11);
    Raster img(12, 8);
    for (float& v : img.data) v = static_cast<float>(rng.uniform01());
    const Raster out = cyclic_shift(img, -5, 13);
    double in_sq = 0.0, out_sq = 0.0;
    for (float v : img.data) in_sq += static_cast<double>(v) * v;
    for (float v : out.data) out_sq += static_cast<double>(v) * v;
    CHECK(out_sq == Catch::Approx(in_sq).epsilon(1e-12));
}

TEST_CASE("jitter sampling stays inside the configured ranges", "[jitter]") {
    JitterRanges r;
    r.dx_min = -3.0;
    r.dx_max = 7.0;
    r.dy_min = 0.0;
    r.dy_max = 0.0;
    r.scale_min = 1.0;
    r.scale_max = 1.2;
    r.rot_min = -5.0;
    r.rot_max = 5.0;
    SeededRng rng(123);
    double dx_sum = 0.0;
    for (int i = 0; i < 2000; ++i) {
        const JitterParams p = sample_jitter(rng, r);
        REQUIRE(p.dx >= -3.0);
        REQUIRE(p.dx < 7.0);
        REQUIRE(p.dy == 0.0);
        REQUIRE(p.scale >= 1.0);
        REQUIRE(p.scale < 1.2);
        REQUIRE(p.rotation >= -5.0);
        REQUIRE(p.rotation < 5.0);
        dx_sum += p.dx;
    }
    CHECK(dx_sum / 2000.0 == Catch::Approx(2.0).margin(0.3));
}

TEST_CASE("jitter range validation rejects inverted or non-positive bounds", "[jitter]") {
    JitterRanges r;
    r.dx_min = 1.0;
    r.dx_max = -1.0;
    REQUIRE_THROWS_AS(r.validate(), std::invalid_argument);
    r.dx_min = r.dx_max = 0.0;
    r.scale_min = 0.0;
    r.scale_max = 1.0;
    REQUIRE_THROWS_AS(r.validate(), std::invalid_argument);
    r.scale_min = 0.5;
    REQUIRE_NOTHROW(r.validate());
}
