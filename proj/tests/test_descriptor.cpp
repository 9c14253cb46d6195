#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>

#include "hwstack/common.hpp"
#include "hwstack/hog.hpp"
#include "hwstack/lbp.hpp"

using namespace hwstack;

namespace {

// Independent uniformity check: circular 0/1 transition count via popcount.
bool is_uniform_code(unsigned code, int points) {
    const unsigned mask = (1u << points) - 1u;
    const unsigned rot = ((code << 1) | (code >> (points - 1))) & mask;
    return std::popcount((code ^ rot) & mask) <= 2;
}

}  // namespace

TEST_CASE("hog of a constant window is all zero", "[descriptor]") {
    const Raster img(32, 32, 0.7f);
    const Descriptor d = hog(img, DescriptorConfig{});
    REQUIRE(d.kind == DescriptorKind::HOG);
    REQUIRE(d.dim() == hog_dim(32, DescriptorConfig{}));
    for (float v : d.values) CHECK(v == 0.0f);
}

TEST_CASE("hog of a vertical step edge loads only the horizontal bin", "[descriptor]") {
    // 16x16, cell 8, block 2: one block of 4 cells, 9 bins -> 36 values.
    Raster img(16, 16, 0.0f);
    for (int y = 0; y < 16; ++y)
        for (int x = 8; x < 16; ++x) img.at(x, y) = 1.0f;
    const Descriptor d = hog(img, DescriptorConfig{});
    REQUIRE(d.dim() == 36);
    // gradient is purely horizontal -> orientation 0 -> first bin of each
    // cell; symmetric cell weighting makes the four cells equal, and L2-hys
    // clipping leaves four entries of 1/2.
    for (int cell = 0; cell < 4; ++cell) {
        CHECK(d.values[cell * 9] == Catch::Approx(0.5).epsilon(1e-6));
        for (int b = 1; b < 9; ++b) CHECK(d.values[cell * 9 + b] == 0.0f);
    }
}

TEST_CASE("hog of a horizontal step edge splits between the two middle bins", "[descriptor]") {
    Raster img(16, 16, 0.0f);
    for (int y = 8; y < 16; ++y)
        for (int x = 0; x < 16; ++x) img.at(x, y) = 1.0f;
    const Descriptor d = hog(img, DescriptorConfig{});
    REQUIRE(d.dim() == 36);
    // orientation pi/2 falls exactly between bins 4 and 5 of 9
    const double expect = 1.0 / std::sqrt(8.0);
    for (int cell = 0; cell < 4; ++cell) {
        CHECK(d.values[cell * 9 + 4] == Catch::Approx(expect).epsilon(1e-6));
        CHECK(d.values[cell * 9 + 5] == Catch::Approx(expect).epsilon(1e-6));
        for (int b = 0; b < 9; ++b)
            if (b != 4 && b != 5) CHECK(d.values[cell * 9 + b] == 0.0f);
    }
}

TEST_CASE("hog dimension matches the closed form across configs", "[descriptor]") {
    SeededRng rng(17);
    Raster img(48, 48);
    for (float& v : img.data) v = static_cast<float>(rng.uniform01());
    for (int cell : {4, 6, 8}) {
        for (int block : {1, 2, 3}) {
            for (int bins : {5, 9, 12}) {
                DescriptorConfig cfg;
                cfg.hog_cell = cell;
                cfg.hog_block = block;
                cfg.hog_bins = bins;
                const Descriptor d = hog(img, cfg);
                const int cells = 48 / cell;
                const int blocks = cells - block + 1;
                REQUIRE(d.dim() == static_cast<std::size_t>(blocks) * blocks * block * block * bins);
                REQUIRE(d.dim() == hog_dim(48, cfg));
                for (float v : d.values) {
                    REQUIRE(std::isfinite(v));
                    REQUIRE(v >= 0.0f);
                    REQUIRE(v <= 1.0f);
                }
            }
        }
    }
}

TEST_CASE("hog rejects windows smaller than one block", "[descriptor]") {
    const Raster img(15, 15, 0.0f);
    REQUIRE_THROWS_AS(hog(img, DescriptorConfig{}), std::invalid_argument);  // needs 16
}

TEST_CASE("the uniform code table has P(P-1)+3 bins", "[descriptor]") {
    int uniform = 0;
    for (unsigned code = 0; code < 256; ++code)
        if (is_uniform_code(code, 8)) ++uniform;
    CHECK(uniform == 58);
    CHECK(detail::uniform_bin_count(8) == 59);  // 58 uniform + 1 catch-all
    DescriptorConfig cfg;
    CHECK(lbp_dim(cfg) == static_cast<std::size_t>(cfg.lbp_grid) * cfg.lbp_grid * 59);
}

TEST_CASE("lbp of a flat window concentrates every cell in the all-ones bin", "[descriptor]") {
    const Raster img(18, 18, 0.4f);
    DescriptorConfig cfg;  // radius 1, 8 points, 4x4 grid
    const Descriptor d = lbp(img, cfg);
    REQUIRE(d.kind == DescriptorKind::LBP);
    REQUIRE(d.dim() == 16 * 59);
    // all neighbors equal the center, and ties count as >=, so every valid
    // pixel produces code 255; its bin is its rank among uniform codes
    int rank255 = 0;
    for (unsigned code = 0; code < 255; ++code)
        if (is_uniform_code(code, 8)) ++rank255;
    REQUIRE(rank255 == 57);
    for (int cell = 0; cell < 16; ++cell) {
        for (int b = 0; b < 59; ++b) {
            const float v = d.values[cell * 59 + b];
            if (b == rank255)
                CHECK(v == 1.0f);  // L1-normalized one-hot cell histogram
            else
                CHECK(v == 0.0f);
        }
    }
}

TEST_CASE("lbp of a horizontal ramp yields one uniform code everywhere", "[descriptor]") {
    Raster img(18, 18);
    for (int y = 0; y < 18; ++y)
        for (int x = 0; x < 18; ++x) img.at(x, y) = static_cast<float>(x) * 0.05f;
    const Descriptor d = lbp(img, DescriptorConfig{});
    // neighbors at and to the right of each center are >=, left ones are <:
    // bits 0,1,2,6,7 set -> code 199, which is uniform
    REQUIRE(is_uniform_code(199, 8));
    int rank199 = 0;
    for (unsigned code = 0; code < 199; ++code)
        if (is_uniform_code(code, 8)) ++rank199;
    for (int cell = 0; cell < 16; ++cell)
        for (int b = 0; b < 59; ++b)
            CHECK(d.values[cell * 59 + b] == (b == rank199 ? 1.0f : 0.0f));
}

TEST_CASE("lbp cell histograms are L1-normalized", "[descriptor]") {
    SeededRng rng(29);
    Raster img(22, 22);
    for (float& v : img.data) v = static_cast<float>(rng.uniform01());
    const Descriptor d = lbp(img, DescriptorConfig{});
    for (int cell = 0; cell < 16; ++cell) {
        double sum = 0.0;
        for (int b = 0; b < 59; ++b) sum += d.values[cell * 59 + b];
        CHECK(sum == Catch::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("lbp rejects windows smaller than grid plus border", "[descriptor]") {
    DescriptorConfig cfg;  // min window = grid + 2*radius = 6
    REQUIRE_THROWS_AS(lbp(Raster(5, 5, 0.0f), cfg), std::invalid_argument);
    REQUIRE_NOTHROW(lbp(Raster(6, 6, 0.0f), cfg));
}

TEST_CASE("fusion normalizes each part before concatenation", "[descriptor]") {
    Descriptor a;
    a.kind = DescriptorKind::HOG;
    a.values = {3.0f, 0.0f, 4.0f};
    Descriptor b;
    b.kind = DescriptorKind::LBP;
    b.values = {1.0f, 1.0f, 1.0f, 1.0f};
    const Descriptor f = fuse(a, b);
    REQUIRE(f.kind == DescriptorKind::FUSED);
    REQUIRE(f.dim() == 7);
    CHECK(f.values[0] == Catch::Approx(0.6));
    CHECK(f.values[2] == Catch::Approx(0.8));
    CHECK(f.values[3] == Catch::Approx(0.5));
    double norm_sq = 0.0;
    for (float v : f.values) norm_sq += static_cast<double>(v) * v;
    CHECK(norm_sq == Catch::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("fusing a zero part keeps it zero", "[descriptor]") {
    Descriptor a;
    a.values = {0.0f, 0.0f};
    Descriptor b;
    b.values = {2.0f, 0.0f};
    const Descriptor f = fuse(a, b);
    CHECK(f.values[0] == 0.0f);
    CHECK(f.values[1] == 0.0f);
    CHECK(f.values[2] == 1.0f);
    CHECK(f.values[3] == 0.0f);
}

TEST_CASE("extract_descriptor dispatches on kind", "[descriptor]") {
    SeededRng rng(31);
    Raster img(32, 32);
    for (float& v : img.data) v = static_cast<float>(rng.uniform01());
    const DescriptorConfig cfg;
    const Descriptor h = extract_descriptor(img, DescriptorKind::HOG, cfg);
    const Descriptor l = extract_descriptor(img, DescriptorKind::LBP, cfg);
    const Descriptor f = extract_descriptor(img, DescriptorKind::FUSED, cfg);
    CHECK(h.values == hog(img, cfg).values);
    CHECK(l.values == lbp(img, cfg).values);
    REQUIRE(f.dim() == h.dim() + l.dim());
    CHECK(f.values == fuse(h, l).values);
}

TEST_CASE("descriptor config validation and minimum windows", "[descriptor]") {
    DescriptorConfig cfg;
    CHECK(cfg.hog_min_window() == 16);
    CHECK(cfg.lbp_min_window() == 6);
    CHECK(cfg.min_window(DescriptorKind::FUSED) == 16);
    cfg.hog_bins = 1;
    REQUIRE_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.hog_bins = 9;
    cfg.lbp_points = 25;
    REQUIRE_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.lbp_points = 8;
    REQUIRE_NOTHROW(cfg.validate());
    REQUIRE_THROWS_AS(kind_from_name("sift"), std::invalid_argument);
    CHECK(kind_from_name("fused") == DescriptorKind::FUSED);
}
