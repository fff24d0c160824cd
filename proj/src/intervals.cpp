#include "quant/intervals.hpp"

#include <bit>
#include <iostream>
#include <stdexcept>

namespace quant {

namespace {

// round(num/den) with ties to even, exact in integer arithmetic
std::uint64_t round_half_even(std::uint64_t num, std::uint64_t den) {
    const std::uint64_t q = num / den;
    const std::uint64_t r2 = 2 * (num % den);
    if (r2 > den) return q + 1;
    if (r2 < den) return q;
    return q % 2 == 0 ? q : q + 1;
}

} // namespace

int default_depth(std::size_t n) {
    if (n == 0) throw std::invalid_argument("default_depth: series length must be >= 1");
    const int log2n = std::bit_width(n) - 1;
    return std::min(6, log2n + 1);
}

IntervalPlan make_intervals(std::size_t n, int depth) {
    if (n == 0) throw std::invalid_argument("make_intervals: series length must be >= 1");
    if (depth < 1) throw std::invalid_argument("make_intervals: depth must be >= 1");

    const int max_depth = std::bit_width(n) - 1 + 1; // largest d with 2^(d-1) <= n
    int d = depth;
    if (d > max_depth) {
        std::cerr << "warning: depth " << depth << " too deep for series length " << n
                  << "; clamping to " << max_depth << "\n";
        d = max_depth;
    }

    IntervalPlan plan;
    plan.series_length = n;
    plan.requested_depth = depth;
    plan.depth = d;
    plan.levels.reserve(static_cast<std::size_t>(d));

    for (int j = 1; j <= d; ++j) {
        const std::uint64_t count = std::uint64_t{1} << (j - 1);
        IntervalLevel level;
        level.depth = j;
        level.base.reserve(count);

        std::uint32_t prev = 0;
        for (std::uint64_t i = 1; i <= count; ++i) {
            const auto bound = static_cast<std::uint32_t>(round_half_even(i * n, count));
            if (bound > prev) level.base.push_back({prev, bound});
            prev = bound;
        }

        if (j > 1) {
            const auto m = round_half_even(n, count);
            const auto shift = static_cast<std::uint32_t>(m / 2);
            // all base intervals except the last; translated ones that would
            // run past n are dropped
            for (std::size_t i = 0; i + 1 < level.base.size(); ++i) {
                const Interval candidate{level.base[i].begin + shift, level.base[i].end + shift};
                if (candidate.end <= n) level.shifted.push_back(candidate);
            }
        }

        plan.levels.push_back(std::move(level));
    }

    for (const auto& level : plan.levels) {
        plan.flat.insert(plan.flat.end(), level.base.begin(), level.base.end());
        plan.flat.insert(plan.flat.end(), level.shifted.begin(), level.shifted.end());
    }
    return plan;
}

} // namespace quant
