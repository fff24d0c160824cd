#include "quant/series.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace quant {

TimeSeries::TimeSeries(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw std::invalid_argument("time series must be nonempty");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw std::invalid_argument("time series value at index " + std::to_string(i) +
                                        " is not finite");
        }
    }
}

std::pair<std::vector<int>, std::vector<std::string>>
relabel(const std::vector<std::string>& raw_labels) {
    if (raw_labels.empty()) throw std::invalid_argument("relabel: no labels given");
    std::map<std::string, int> id_of;
    for (const auto& s : raw_labels) id_of.emplace(s, 0);
    std::vector<std::string> names;
    names.reserve(id_of.size());
    for (auto& [name, id] : id_of) {
        id = static_cast<int>(names.size());
        names.push_back(name);
    }
    std::vector<int> ids;
    ids.reserve(raw_labels.size());
    for (const auto& s : raw_labels) ids.push_back(id_of.at(s));
    return {std::move(ids), std::move(names)};
}

LabeledDataset::LabeledDataset(std::vector<TimeSeries> series, std::vector<int> labels,
                               std::vector<std::string> class_names)
    : series_(std::move(series)), labels_(std::move(labels)),
      class_names_(std::move(class_names)) {
    if (series_.empty()) throw std::invalid_argument("dataset must contain at least one series");
    if (series_.size() != labels_.size()) {
        throw std::invalid_argument("dataset has " + std::to_string(series_.size()) +
                                    " series but " + std::to_string(labels_.size()) + " labels");
    }
    const std::size_t n = series_.front().size();
    for (std::size_t i = 1; i < series_.size(); ++i) {
        if (series_[i].size() != n) {
            throw std::invalid_argument("series " + std::to_string(i) + " has length " +
                                        std::to_string(series_[i].size()) +
                                        ", expected " + std::to_string(n));
        }
    }
    if (class_names_.empty()) throw std::invalid_argument("dataset has no classes");
    const int c = static_cast<int>(class_names_.size());
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] < 0 || labels_[i] >= c) {
            throw std::invalid_argument("label of series " + std::to_string(i) +
                                        " out of range [0, " + std::to_string(c) + ")");
        }
    }
}

LabeledDataset LabeledDataset::from_raw_labels(std::vector<TimeSeries> series,
                                               const std::vector<std::string>& raw_labels) {
    auto [ids, names] = relabel(raw_labels);
    return LabeledDataset(std::move(series), std::move(ids), std::move(names));
}

} // namespace quant
