#include "quant/intervals.hpp"

#include <doctest.h>

#include <algorithm>
#include <vector>

using namespace quant;

TEST_CASE("default_depth") {
    CHECK(default_depth(512) == 6);
    CHECK(default_depth(1) == 1);
    CHECK(default_depth(20) == 5);
    CHECK(default_depth(32) == 6);
    CHECK(default_depth(31) == 5);
}

TEST_CASE("interval counts at reference sizes") {
    CHECK(make_intervals(64, 6).size() == 120);
    CHECK(make_intervals(16, 4).size() == 26);

    const auto plan = make_intervals(8, 1);
    REQUIRE(plan.size() == 1);
    CHECK(plan.flat[0] == Interval{0, 8});
}

TEST_CASE("smallest interval at full depth has length max(1, n/32)") {
    const auto plan = make_intervals(32, 6);
    std::uint32_t smallest = 32;
    for (const auto& iv : plan.flat) smallest = std::min(smallest, iv.length());
    CHECK(smallest == 1);
    CHECK(plan.size() == 120);
}

TEST_CASE("count formula holds for every divisible n, d in 1..8") {
    for (int d = 1; d <= 8; ++d) {
        const std::size_t base = std::size_t(1) << (d - 1);
        for (const std::size_t factor : {1, 2, 3, 4, 8}) {
            const std::size_t n = base * factor;
            const auto plan = make_intervals(n, d);
            const std::size_t expected = base * 4 - 2 - static_cast<std::size_t>(d);
            CHECK_MESSAGE(plan.size() == expected, "n=", n, " d=", d);
        }
    }
}

TEST_CASE("base intervals tile the series at every level") {
    for (const std::size_t n : {13, 16, 100, 101}) {
        const auto plan = make_intervals(n, 5);
        for (const auto& level : plan.levels) {
            std::size_t covered = 0;
            std::uint32_t cursor = 0;
            for (const auto& iv : level.base) {
                CHECK(iv.begin == cursor);
                CHECK(iv.end > iv.begin);
                cursor = iv.end;
                covered += iv.length();
            }
            CHECK(cursor == n);
            CHECK(covered == n);
        }
    }
}

TEST_CASE("shifted intervals start half an interval after their base") {
    const auto plan = make_intervals(64, 4);
    for (const auto& level : plan.levels) {
        if (level.depth == 1) {
            CHECK(level.shifted.empty());
            continue;
        }
        const std::uint32_t m = level.base.front().length();
        REQUIRE(level.shifted.size() == level.base.size() - 1);
        for (std::size_t i = 0; i < level.shifted.size(); ++i) {
            CHECK(level.shifted[i].begin == level.base[i].begin + m / 2);
            CHECK(level.shifted[i].length() == level.base[i].length());
            CHECK(level.shifted[i].end <= 64);
        }
    }
}

TEST_CASE("non-divisible lengths keep every interval legal") {
    for (const std::size_t n : {9, 17, 33, 65, 100, 250, 251}) {
        for (int d = 1; d <= 6; ++d) {
            const auto plan = make_intervals(n, d);
            const std::size_t cap =
                (std::size_t(1) << (plan.depth - 1)) * 4 - 2 - static_cast<std::size_t>(plan.depth);
            CHECK(plan.size() <= std::max<std::size_t>(cap, 1));
            for (const auto& iv : plan.flat) {
                CHECK(iv.length() >= 1);
                CHECK(iv.end <= n);
            }
        }
    }
}

TEST_CASE("depth is clamped to the series length") {
    const auto plan = make_intervals(4, 6);
    CHECK(plan.requested_depth == 6);
    CHECK(plan.depth == 3); // 2^(3-1) = 4 <= 4
    CHECK(make_intervals(1, 6).depth == 1);
}

TEST_CASE("plans are deterministic") {
    const auto a = make_intervals(77, 5);
    const auto b = make_intervals(77, 5);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.flat[i] == b.flat[i]);
}
