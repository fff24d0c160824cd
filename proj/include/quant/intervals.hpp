#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace quant {

/// Half-open index interval [begin, end); length m = end - begin >= 1.
struct Interval {
    std::uint32_t begin = 0;
    std::uint32_t end = 0;

    std::uint32_t length() const noexcept { return end - begin; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Intervals at one depth level: 2^(depth-1) base intervals tiling [0, n),
/// plus (for depth > 1) the same intervals shifted by half an interval length.
struct IntervalLevel {
    int depth = 1;
    std::vector<Interval> base;
    std::vector<Interval> shifted;
};

struct IntervalPlan {
    std::size_t series_length = 0;
    int requested_depth = 1;
    int depth = 1; // after clamping to the series length
    std::vector<IntervalLevel> levels;
    std::vector<Interval> flat; // ordered by (depth, base-before-shifted, start)

    std::size_t size() const noexcept { return flat.size(); }
};

/// Default depth min(6, floor(log2 n) + 1).
int default_depth(std::size_t n);

/// Dyadic interval plan for a series of length n.
///
/// Level j = 1..d has base boundaries at round(i*n / 2^(j-1)) (round half to
/// even) and, for j > 1, a shifted group: every base interval except the last,
/// translated by floor(m_j/2) with m_j = round(n / 2^(j-1)); any translated
/// interval ending past n is dropped. For n divisible by 2^(d-1) the total
/// count is exactly 2^(d-1)*4 - 2 - d.
///
/// d is clamped (with a warning) so that 2^(d-1) <= n.
IntervalPlan make_intervals(std::size_t n, int depth);

} // namespace quant
