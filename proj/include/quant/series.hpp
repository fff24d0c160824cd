#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace quant {

/// Equal-spaced univariate series. Nonempty, all values finite.
class TimeSeries {
public:
    explicit TimeSeries(std::vector<double> values);

    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

    friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

private:
    std::vector<double> values_;
};

/// Map raw label strings to contiguous class ids.
///
/// Ids follow the lexicographic order of the distinct label strings, so the
/// mapping does not depend on example order. Returns (ids, class_names) with
/// class_names[id] the original string.
std::pair<std::vector<int>, std::vector<std::string>>
relabel(const std::vector<std::string>& raw_labels);

/// Classification dataset: q series of identical length plus class ids.
class LabeledDataset {
public:
    /// labels must already be contiguous ids consistent with class_names.
    LabeledDataset(std::vector<TimeSeries> series, std::vector<int> labels,
                   std::vector<std::string> class_names);

    /// Convenience: run relabel() over raw label strings.
    static LabeledDataset from_raw_labels(std::vector<TimeSeries> series,
                                          const std::vector<std::string>& raw_labels);

    std::size_t size() const noexcept { return series_.size(); }
    std::size_t series_length() const noexcept { return series_.front().size(); }
    std::size_t num_classes() const noexcept { return class_names_.size(); }

    const TimeSeries& series(std::size_t i) const noexcept { return series_[i]; }
    const std::vector<TimeSeries>& all_series() const noexcept { return series_; }
    int label(std::size_t i) const noexcept { return labels_[i]; }
    const std::vector<int>& labels() const noexcept { return labels_; }
    const std::vector<std::string>& class_names() const noexcept { return class_names_; }

private:
    std::vector<TimeSeries> series_;
    std::vector<int> labels_;
    std::vector<std::string> class_names_;
};

} // namespace quant
