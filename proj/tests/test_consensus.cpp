#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "hwstack/common.hpp"
#include "hwstack/consensus.hpp"

using namespace hwstack;

namespace {

std::vector<float> random_unit(SeededRng& rng, std::size_t dim) {
    std::vector<float> v(dim);
    for (float& x : v) x = static_cast<float>(rng.normal());
    double nn = 0.0;
    for (float x : v) nn += static_cast<double>(x) * x;
    const float inv = static_cast<float>(1.0 / std::sqrt(nn));
    for (float& x : v) x *= inv;
    return v;
}

WindowBank random_bank(SeededRng& rng, std::size_t m, std::size_t dim) {
    WindowBank bank;
    bank.dim = dim;
    bank.refs.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const auto v = random_unit(rng, dim);
        bank.descs.insert(bank.descs.end(), v.begin(), v.end());
    }
    return bank;
}

}  // namespace

TEST_CASE("votes count template support and keep the top N", "[consensus]") {
    // window 2 appears in both candidate sets, window 1 in one
    const std::vector<std::vector<std::uint32_t>> cands = {{1, 2}, {2}};
    SECTION("N = 1 keeps the most-supported window") {
        const ConsensusSet cs = vote(cands, 4, 1);
        REQUIRE(cs.size() == 1);
        CHECK(cs.windows[0] == 2);
        CHECK(cs.freqs[0] == 1.0);
    }
    SECTION("N = 2 appends the weaker window") {
        const ConsensusSet cs = vote(cands, 4, 2);
        REQUIRE(cs.size() == 2);
        CHECK(cs.windows[0] == 2);
        CHECK(cs.windows[1] == 1);
        CHECK(cs.freqs[1] == 0.5);
    }
    SECTION("windows with zero support are never admitted") {
        const ConsensusSet cs = vote(cands, 4, 10);
        REQUIRE(cs.size() == 2);  // windows 0 and 3 collided with nothing
    }
}

TEST_CASE("vote ties break toward the smaller window index", "[consensus]") {
    const std::vector<std::vector<std::uint32_t>> cands = {{3, 0}, {0, 3}};
    const ConsensusSet cs = vote(cands, 5, 2);
    REQUIRE(cs.size() == 2);
    CHECK(cs.windows[0] == 0);
    CHECK(cs.windows[1] == 3);
    CHECK(cs.freqs[0] == 1.0);
    CHECK(cs.freqs[1] == 1.0);
}

TEST_CASE("vote validates its inputs", "[consensus]") {
    const std::vector<std::vector<std::uint32_t>> cands = {{7}};
    REQUIRE_THROWS_AS(vote(cands, 4, 1), std::invalid_argument);  // window 7 of 4
    REQUIRE_THROWS_AS(vote(cands, 8, 0), std::invalid_argument);  // N = 0
}

TEST_CASE("pooled responses reduce the selected windows only", "[consensus]") {
    // synthetic scorer: score(w, j) = w + 10 j
    const auto scorer = [](std::size_t w, std::size_t j) {
        return static_cast<double>(w) + 10.0 * static_cast<double>(j);
    };
    const std::vector<std::uint32_t> sel = {0, 2};
    OpCounters counters;
    const auto mx = pooled_responses(std::span<const std::uint32_t>(sel), 3, PoolKind::MAX,
                                     scorer, &counters);
    REQUIRE(mx.size() == 3);
    CHECK(mx[0] == 2.0);
    CHECK(mx[1] == 12.0);
    CHECK(mx[2] == 22.0);
    CHECK(snapshot(counters).dot_products == 6);  // 2 windows x 3 templates

    const auto mean = pooled_responses(std::span<const std::uint32_t>(sel), 3, PoolKind::MEAN,
                                       scorer);
    CHECK(mean[0] == 1.0);
    CHECK(mean[1] == 11.0);
}

TEST_CASE("an empty selection produces zero responses", "[consensus]") {
    const auto scorer = [](std::size_t, std::size_t) { return 5.0; };
    const std::vector<std::uint32_t> none;
    const auto r = pooled_responses(std::span<const std::uint32_t>(none), 4, PoolKind::MAX, scorer);
    REQUIRE(r.size() == 4);
    for (double v : r) CHECK(v == 0.0);
}

TEST_CASE("a window equal to a template scores a full response", "[consensus]") {
    SeededRng rng(7);
    const std::size_t dim = 24, n = 8;
    std::vector<float> rows;
    for (std::size_t j = 0; j < n; ++j) {
        const auto r = random_unit(rng, dim);
        rows.insert(rows.end(), r.begin(), r.end());
    }
    const TemplateMatrix tm{n, dim, rows.data()};

    WindowBank bank;
    bank.dim = dim;
    bank.refs.resize(1);
    bank.descs.assign(tm.row(5), tm.row(5) + dim);

    const ExactScorer scorer{&bank, tm};
    const auto resp = exhaustive_responses(bank, n, PoolKind::MAX, scorer);
    REQUIRE(resp.size() == n);
    CHECK(resp[5] == Catch::Approx(1.0).epsilon(1e-6));
    for (std::size_t j = 0; j < n; ++j)
        if (j != 5) CHECK(resp[j] < resp[5]);
}

TEST_CASE("N >= m disables pruning and reproduces the exhaustive pass", "[consensus]") {
    SeededRng rng(17);
    const std::size_t dim = 16, m = 12, n = 5;
    const WindowBank bank = random_bank(rng, m, dim);
    std::vector<float> rows;
    for (std::size_t j = 0; j < n; ++j) {
        const auto r = random_unit(rng, dim);
        rows.insert(rows.end(), r.begin(), r.end());
    }
    const TemplateMatrix tm{n, dim, rows.data()};
    const HashFamily fam = make_hash_family(dim, 6, 2, 3);
    const HashIndex idx = build_index(tm, fam);
    const ExactScorer scorer{&bank, tm};

    OpCounters counters;
    const auto pruned = coc_responses(bank, idx, fam, m, PoolKind::MAX, scorer, &counters);
    const auto exact = exhaustive_responses(bank, n, PoolKind::MAX, scorer);
    REQUIRE(pruned.size() == exact.size());
    for (std::size_t j = 0; j < n; ++j) CHECK(pruned[j] == exact[j]);

    const CounterSnapshot snap = snapshot(counters);
    CHECK(snap.windows_hashed == 0);  // hashing is bypassed entirely
    CHECK(snap.buckets_probed == 0);
    CHECK(snap.dot_products == m * n);
}

TEST_CASE("pruned responses never exceed the exhaustive ones", "[consensus]") {
    SeededRng rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t dim = 16, m = 30, n = 6;
        const WindowBank bank = random_bank(rng, m, dim);
        std::vector<float> rows;
        for (std::size_t j = 0; j < n; ++j) {
            const auto r = random_unit(rng, dim);
            rows.insert(rows.end(), r.begin(), r.end());
        }
        const TemplateMatrix tm{n, dim, rows.data()};
        const HashFamily fam = make_hash_family(dim, 5, 2, 1000 + trial);
        const HashIndex idx = build_index(tm, fam);
        const ExactScorer scorer{&bank, tm};

        const auto pruned = coc_responses(bank, idx, fam, 3, PoolKind::MAX, scorer);
        const auto exact = exhaustive_responses(bank, n, PoolKind::MAX, scorer);
        for (std::size_t j = 0; j < n; ++j) REQUIRE(pruned[j] <= exact[j] + 1e-9);
    }
}

TEST_CASE("consensus scoring touches at most N windows per template", "[consensus]") {
    SeededRng rng(29);
    const std::size_t dim = 16, m = 40, n = 7, N = 4;
    const WindowBank bank = random_bank(rng, m, dim);
    std::vector<float> rows;
    for (std::size_t j = 0; j < n; ++j) {
        const auto r = random_unit(rng, dim);
        rows.insert(rows.end(), r.begin(), r.end());
    }
    const TemplateMatrix tm{n, dim, rows.data()};
    const HashFamily fam = make_hash_family(dim, 4, 3, 9);
    const HashIndex idx = build_index(tm, fam);
    const ExactScorer scorer{&bank, tm};

    OpCounters counters;
    coc_responses(bank, idx, fam, N, PoolKind::MAX, scorer, &counters);
    const CounterSnapshot snap = snapshot(counters);
    CHECK(snap.windows_hashed == m);
    CHECK(snap.buckets_probed == m * 3);
    CHECK(snap.dot_products % n == 0);
    CHECK(snap.dot_products <= N * n);
}
