#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "hwstack/common.hpp"
#include "hwstack/hw.hpp"

using namespace hwstack;

TEST_CASE("dot and normalized dot agree with hand values", "[hw]") {
    const std::vector<float> u = {3.0f, 4.0f};
    const std::vector<float> v = {4.0f, 3.0f};
    CHECK(dot(std::span<const float>(u), std::span<const float>(v)) == 24.0);
    CHECK(ndot(u, v) == Catch::Approx(0.96));
    CHECK(ndot(u, u) == Catch::Approx(1.0));

    const std::vector<double> ud = {3.0, 4.0};
    const std::vector<double> vd = {4.0, 3.0};
    CHECK(ndot(ud, vd) == Catch::Approx(0.96));
}

TEST_CASE("ndot of a zero vector is zero", "[hw]") {
    const std::vector<float> z = {0.0f, 0.0f, 0.0f};
    const std::vector<float> v = {1.0f, 2.0f, 3.0f};
    CHECK(ndot(z, v) == 0.0);
    CHECK(ndot(v, z) == 0.0);
    CHECK(ndot(z, z) == 0.0);
}

TEST_CASE("ndot validates dimensions and finiteness", "[hw]") {
    const std::vector<float> u = {1.0f, 2.0f};
    const std::vector<float> v = {1.0f, 2.0f, 3.0f};
    REQUIRE_THROWS_AS(ndot(u, v), std::invalid_argument);
    const std::vector<float> bad = {1.0f, std::nanf("")};
    REQUIRE_THROWS_AS(ndot(u, bad), std::invalid_argument);
}

TEST_CASE("pooling reduces window scores by max or mean", "[hw]") {
    const std::vector<double> s = {0.2, -0.5, 0.9};
    CHECK(hw_response(s, PoolKind::MAX) == 0.9);
    CHECK(hw_response(s, PoolKind::MEAN) == Catch::Approx(0.2));
    const std::vector<double> neg = {-1.5};
    CHECK(hw_response(neg, PoolKind::MAX) == -1.5);
    REQUIRE_THROWS_AS(hw_response(std::vector<double>{}, PoolKind::MAX), std::invalid_argument);
}

TEST_CASE("pool kinds round-trip through their names", "[hw]") {
    CHECK(pool_from_name("max") == PoolKind::MAX);
    CHECK(pool_from_name("mean") == PoolKind::MEAN);
    CHECK(pool_from_name(pool_name(PoolKind::MEAN)) == PoolKind::MEAN);
    REQUIRE_THROWS_AS(pool_from_name("median"), std::invalid_argument);
}

TEST_CASE("cyclic shifts transfer between image and template", "[hw]") {
    // shifting the image matches counter-shifting the template: the shift
    // acts unitarily on pixel space, so both correlations agree to rounding
    SeededRng rng(41);
    for (int trial = 0; trial < 100; ++trial) {
        const int w = 8 + static_cast<int>(rng.below(25));
        const int h = 8 + static_cast<int>(rng.below(25));
        Raster img(w, h), tmpl(w, h);
        for (float& v : img.data) v = static_cast<float>(rng.uniform01());
        for (float& v : tmpl.data) v = static_cast<float>(rng.uniform01());
        const int dx = static_cast<int>(rng.below(61)) - 30;
        const int dy = static_cast<int>(rng.below(61)) - 30;
        const TransferCheck tc = check_transfer_condition(img, tmpl, dx, dy);
        REQUIRE(std::abs(tc.lhs - tc.rhs) < 1e-12);
    }
}

TEST_CASE("cropping shifts do not transfer", "[hw]") {
    // non-unitary move: content is clipped at the frame and replaced by
    // fill, so the two sides of the comparison genuinely differ
    SeededRng rng(43);
    Raster img(20, 20), tmpl(20, 20);
    for (float& v : img.data) v = static_cast<float>(rng.uniform01());
    for (float& v : tmpl.data) v = static_cast<float>(rng.uniform01());
    const TransferCheck tc = check_transfer_condition_cropping(img, tmpl, 6, 0, 0.5f);
    CHECK(std::abs(tc.lhs - tc.rhs) > 1e-6);
}

TEST_CASE("transfer check requires matching shapes", "[hw]") {
    const Raster a(8, 8, 0.1f);
    const Raster b(8, 9, 0.1f);
    REQUIRE_THROWS_AS(check_transfer_condition(a, b, 1, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(check_transfer_condition_cropping(a, b, 1, 1), std::invalid_argument);
}
