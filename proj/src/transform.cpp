#include "quant/transform.hpp"

#include "quant/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <stdexcept>

namespace quant {

void TransformConfig::validate() const {
    if (depth < 1) throw std::invalid_argument("depth must be >= 1");
    if (divisor < 1) throw std::invalid_argument("quantile divisor must be >= 1");
    if (smoothing_window < 1 || smoothing_window % 2 == 0) {
        throw std::invalid_argument("smoothing window must be odd and >= 1, got " +
                                    std::to_string(smoothing_window));
    }
    if (representations.empty()) {
        throw std::invalid_argument("no input representations selected");
    }
}

std::size_t quantile_count(std::size_t m, std::size_t v) {
    if (m < 1 || v < 1) throw std::invalid_argument("quantile_count: m and v must be >= 1");
    return 1 + (m - 1) / v;
}

namespace {

bool subtract_at(std::size_t index, MeanPolicy policy) {
    switch (policy) {
    case MeanPolicy::none: return false;
    case MeanPolicy::alternate: return index % 2 == 1;
    case MeanPolicy::subtract_all: return true;
    }
    return false;
}

} // namespace

void interval_quantiles(std::span<const double> values, std::size_t divisor, MeanPolicy policy,
                        std::vector<double>& out, std::vector<double>& scratch) {
    const std::size_t m = values.size();
    if (m == 0) throw std::invalid_argument("interval_quantiles: empty interval");
    if (m == 1) {
        out.push_back(values[0]);
        return;
    }

    const std::size_t k = quantile_count(m, divisor);
    scratch.assign(values.begin(), values.end());
    std::sort(scratch.begin(), scratch.end());

    if (k == 1) {
        const double pos = static_cast<double>(m - 1) / 2.0;
        const auto lo = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(lo);
        out.push_back(frac == 0.0 ? scratch[lo]
                                  : scratch[lo] + frac * (scratch[lo + 1] - scratch[lo]));
        return;
    }

    double mean = 0.0;
    if (policy != MeanPolicy::none) {
        mean = std::accumulate(scratch.begin(), scratch.end(), 0.0) / static_cast<double>(m);
    }

    for (std::size_t i = 0; i < k; ++i) {
        const double pos =
            static_cast<double>(i) * static_cast<double>(m - 1) / static_cast<double>(k - 1);
        const auto lo = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(lo);
        double q = frac == 0.0 ? scratch[lo]
                               : scratch[lo] + frac * (scratch[lo + 1] - scratch[lo]);
        if (subtract_at(i, policy)) q -= mean;
        out.push_back(q);
    }
}

std::vector<double> interval_quantiles(std::span<const double> values, std::size_t divisor,
                                       MeanPolicy policy) {
    std::vector<double> out, scratch;
    interval_quantiles(values, divisor, policy, out, scratch);
    return out;
}

FittedTransform fit_transform(std::size_t series_length, const TransformConfig& config) {
    config.validate();
    if (series_length == 0) throw std::invalid_argument("series length must be >= 1");

    FittedTransform t;
    t.config_ = config;
    t.series_length_ = series_length;

    for (const auto id : kRepresentationOrder) {
        if (!config.representations.contains(id)) continue;
        const std::size_t len = representation_length(id, series_length);
        if (len == 0) {
            t.skipped_.push_back(id);
            std::cerr << "warning: series length " << series_length
                      << " too short for representation " << representation_name(id)
                      << "; transform will not use it\n";
            continue;
        }
        t.active_.push_back(id);
        t.plans_.push_back(make_intervals(len, config.depth));
    }
    if (t.active_.empty()) {
        throw std::invalid_argument("series length " + std::to_string(series_length) +
                                    " leaves no usable representation");
    }

    const auto v = static_cast<std::size_t>(config.divisor);
    for (std::size_t r = 0; r < t.active_.size(); ++r) {
        const auto id = t.active_[r];
        for (const auto& interval : t.plans_[r].flat) {
            const std::size_t m = interval.length();
            const std::size_t k = quantile_count(m, v);
            const bool subtractable = m >= 2 && k > 1;
            for (std::size_t i = 0; i < k; ++i) {
                t.schema_.push_back({id, interval.begin, interval.end,
                                     static_cast<std::uint32_t>(i),
                                     subtractable && subtract_at(i, config.mean_policy)});
            }
        }
    }
    return t;
}

FeatureMatrix apply_transform(const FittedTransform& transform,
                              std::span<const TimeSeries> series, int threads) {
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (series[i].size() != transform.series_length()) {
            throw std::invalid_argument(
                "series " + std::to_string(i) + " has length " +
                std::to_string(series[i].size()) + ", transform was fitted for length " +
                std::to_string(transform.series_length()));
        }
    }

    RepresentationConfig rep_config;
    rep_config.active = RepSet{};
    for (const auto id : transform.active_representations()) rep_config.active.insert(id);
    rep_config.smoothing_window = transform.config().smoothing_window;
    const auto divisor = static_cast<std::size_t>(transform.config().divisor);
    const auto policy = transform.config().mean_policy;

    FeatureMatrix features(series.size(), transform.schema());
    parallel_for(series.size(), threads, [&](std::size_t row_index) {
        const auto reps = build_representations(series[row_index], rep_config);
        std::vector<double> row;
        row.reserve(transform.feature_count());
        std::vector<double> scratch;
        const auto& active = transform.active_representations();
        for (std::size_t r = 0; r < active.size(); ++r) {
            const auto values = reps.of(active[r]);
            for (const auto& interval : transform.plan(r).flat) {
                interval_quantiles(values.subspan(interval.begin, interval.length()), divisor,
                                   policy, row, scratch);
            }
        }
        std::copy(row.begin(), row.end(), features.row(row_index).begin());
    });
    return features;
}

} // namespace quant
