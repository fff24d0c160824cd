#pragma once

#include "quant/dataset_io.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace quant {

/// Two-sided Wilcoxon signed-rank test over paired differences.
struct WilcoxonResult {
    double statistic = 0.0; ///< W+: sum of ranks of the positive differences
    double p_value = 1.0;
    std::size_t n_used = 0; ///< pairs left after dropping zero differences
    bool exact = false;     ///< exact enumeration (small n) vs normal approximation
};

/// Zero differences are dropped; tied magnitudes get average ranks. With
/// n <= 25 remaining pairs the null distribution is enumerated exactly;
/// above that a normal approximation with tie and continuity corrections
/// is used. The two-sided p-value is min(1, 2 * min(P(W <= w), P(W >= w))).
WilcoxonResult wilcoxon_signed_rank(std::span<const double> differences);

/// Paired comparison of two results tables, joined on (dataset, resample).
struct ComparisonReport {
    std::size_t dataset_count = 0;
    double mean_difference = 0.0; ///< mean over datasets of (first - second) accuracy
    std::size_t wins = 0;         ///< datasets where the first method is more accurate
    std::size_t draws = 0;
    std::size_t losses = 0;
    WilcoxonResult wilcoxon; ///< test over the per-dataset accuracy differences
};

/// Accuracies are averaged over resamples within each dataset before
/// comparing. The two tables must cover exactly the same (dataset, resample)
/// keys; any mismatch is reported by name.
ComparisonReport compare_results(const std::vector<ResultRow>& first,
                                 const std::vector<ResultRow>& second);

} // namespace quant
