#include "stm/error.hpp"
#include "stm/periodicity.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <random>
#include <vector>

using namespace stm;

namespace {

TransitionSequence seq(std::vector<int> d) {
    TransitionSequence t;
    t.source_len = d.size() + 1;
    t.deltas = std::move(d);
    return t;
}

}  // namespace

TEST_CASE("alternating deltas have period two") {
    const auto r = detect_period(seq({1, -1, 1, -1, 1, -1}));
    REQUIRE(r.period);
    CHECK(*r.period == 2);
    CHECK(r.consistent == std::vector<bool>(6, true));
}

TEST_CASE("constant deltas have period one") {
    const auto r = detect_period(seq({0, 0, 0, 0}));
    REQUIRE(r.period);
    CHECK(*r.period == 1);
}

TEST_CASE("three-step cycle with a partial tail") {
    const auto r = detect_period(seq({1, 2, -3, 1, 2, -3, 1, 2}));
    REQUIRE(r.period);
    CHECK(*r.period == 3);
}

TEST_CASE("a single break removes the period at zero tolerance") {
    CHECK_FALSE(detect_period(seq({1, -1, 1, -1, 2, -1})).period);
}

TEST_CASE("tolerance admits a bounded fraction of mismatches") {
    // M = 6, eps = 0.2 allows one mismatch; T = 1 has four, T = 2 has one.
    const auto r = detect_period(seq({1, -1, 1, -1, 2, -1}), 0.2);
    REQUIRE(r.period);
    CHECK(*r.period == 2);
    CHECK(r.consistent == std::vector<bool>{true, true, true, true, false, true});
    CHECK(r.mismatch_tolerance == 0.2);
    CHECK(periodic_weight(r, 0, 0.5) == doctest::Approx(1.5));
    CHECK(periodic_weight(r, 4, 0.5) == 1.0);
}

TEST_CASE("short sequences and bad tolerances") {
    CHECK_FALSE(detect_period(seq({3})).period);
    CHECK(detect_period(seq({3})).consistent.size() == 1);
    CHECK_FALSE(detect_period(seq({})).period);
    CHECK_THROWS_AS(detect_period(seq({1, 1}), 1.0), Error);
    CHECK_THROWS_AS(detect_period(seq({1, 1}), -0.1), Error);
}

TEST_CASE("periodic weight") {
    const auto none = detect_period(seq({1, 2, 3}));
    CHECK(periodic_weight(none, 1, 0.5) == 1.0);
    const auto alt = detect_period(seq({1, -1, 1, -1}));
    CHECK(periodic_weight(alt, 3, 0.5) == doctest::Approx(1.5));
    CHECK(periodic_weight(alt, 3, 0.0) == 1.0);
    CHECK_THROWS_AS(periodic_weight(alt, 4, 0.5), Error);
}

TEST_CASE("property: reported periods are minimal and match a brute-force finder") {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> len(2, 40);
    std::uniform_int_distribution<int> sym(-2, 2);
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<int> d(static_cast<std::size_t>(len(rng)));
        // Low-entropy alphabet so periodic sequences appear by chance.
        const int alphabet = trial % 3 + 1;
        for (int& x : d) x = sym(rng) % alphabet;
        const auto r = detect_period(seq(d));
        CHECK(r.period == oracle::minimal_period(d));
        if (r.period) {
            for (std::size_t t = 0; t < d.size(); ++t) CHECK(d[t] == d[t % *r.period]);
            CHECK(*r.period <= d.size() / 2);
        }
    }
}

TEST_CASE("property: repetitions of a primitive block report the block length") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> block_len(1, 12);
    std::uniform_int_distribution<int> reps(2, 5);
    std::uniform_int_distribution<int> sym(-4, 4);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<int> block;
        do {
            block.assign(static_cast<std::size_t>(block_len(rng)), 0);
            for (int& x : block) x = sym(rng);
        } while (!oracle::is_primitive(block));
        std::vector<int> d;
        const int r = reps(rng);
        for (int i = 0; i < r; ++i) d.insert(d.end(), block.begin(), block.end());
        const auto res = detect_period(seq(d));
        REQUIRE(res.period);
        CHECK(*res.period == block.size());
        for (std::size_t t = 0; t < d.size(); ++t) {
            CHECK(periodic_weight(res, t, 0.7) == doctest::Approx(1.7));
            CHECK(periodic_weight(res, t, 0.0) == 1.0);
        }
    }
}
