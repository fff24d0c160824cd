#pragma once

#include "quant/feature_matrix.hpp"
#include "quant/intervals.hpp"
#include "quant/representations.hpp"
#include "quant/series.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace quant {

/// Which quantiles get the interval mean subtracted. The default alternates,
/// leaving even indices as plain order statistics; the other two modes exist
/// for the ablation sweeps.
enum class MeanPolicy : std::uint8_t { none = 0, alternate = 1, subtract_all = 2 };

struct TransformConfig {
    int depth = 6;           // clamped per representation length
    int divisor = 4;         // quantiles per interval ~ m / divisor
    int smoothing_window = 5;
    RepSet representations = RepSet::all();
    MeanPolicy mean_policy = MeanPolicy::alternate;

    /// Reduced-compute preset: half the intervals, half the quantiles.
    static TransformConfig fast() {
        TransformConfig c;
        c.depth = 5;
        c.divisor = 8;
        return c;
    }

    void validate() const;

    friend bool operator==(const TransformConfig&, const TransformConfig&) = default;
};

/// Number of quantiles for an interval of length m: k = 1 + floor((m-1)/v).
/// v = 1 gives k = m (the sorted values); m <= v gives a single quantile.
std::size_t quantile_count(std::size_t m, std::size_t v);

/// Append the quantile features of one interval to out.
///
/// Length-1 intervals pass the value through; a single quantile is the
/// median. Otherwise quantile i sits at sorted position i*(m-1)/(k-1) with
/// linear interpolation between adjacent order statistics, and the interval
/// mean is subtracted according to policy (only when m >= 2 and k > 1).
/// scratch is sort workspace, reused across calls.
void interval_quantiles(std::span<const double> values, std::size_t divisor, MeanPolicy policy,
                        std::vector<double>& out, std::vector<double>& scratch);

/// Convenience overload returning a fresh vector.
std::vector<double> interval_quantiles(std::span<const double> values, std::size_t divisor,
                                       MeanPolicy policy = MeanPolicy::alternate);

/// Transform fitted to a series length: per-representation interval plans and
/// the resulting feature layout. Applying it to any dataset of the same
/// length yields a matrix with exactly this schema.
class FittedTransform {
public:
    const TransformConfig& config() const noexcept { return config_; }
    std::size_t series_length() const noexcept { return series_length_; }
    std::size_t feature_count() const noexcept { return schema_.size(); }
    const std::vector<FeatureColumn>& schema() const noexcept { return schema_; }

    /// Representations actually in use, in canonical order.
    const std::vector<RepresentationId>& active_representations() const noexcept {
        return active_;
    }
    /// Requested representations dropped because the series is too short.
    const std::vector<RepresentationId>& skipped_representations() const noexcept {
        return skipped_;
    }
    /// Interval plan for active representation i (parallel to
    /// active_representations()).
    const IntervalPlan& plan(std::size_t i) const noexcept { return plans_[i]; }

    friend FittedTransform fit_transform(std::size_t, const TransformConfig&);

private:
    TransformConfig config_;
    std::size_t series_length_ = 0;
    std::vector<RepresentationId> active_;
    std::vector<IntervalPlan> plans_;
    std::vector<FeatureColumn> schema_;
    std::vector<RepresentationId> skipped_;
};

FittedTransform fit_transform(std::size_t series_length, const TransformConfig& config);

inline FittedTransform fit_transform(const LabeledDataset& dataset,
                                     const TransformConfig& config) {
    return fit_transform(dataset.series_length(), config);
}

/// Row i holds the features of series[i] in schema order. Rows are computed
/// independently, so any thread count produces bit-identical output.
/// Throws if a series length differs from the fitted length.
FeatureMatrix apply_transform(const FittedTransform& transform,
                              std::span<const TimeSeries> series, int threads = 1);

inline FeatureMatrix apply_transform(const FittedTransform& transform,
                                     const LabeledDataset& dataset, int threads = 1) {
    return apply_transform(transform, dataset.all_series(), threads);
}

} // namespace quant
