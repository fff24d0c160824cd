#pragma once

#include "quant/representations.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace quant {

/// Provenance of one feature column: which representation, which interval,
/// which quantile, and whether the interval mean was subtracted.
struct FeatureColumn {
    RepresentationId representation = RepresentationId::raw;
    std::uint32_t interval_begin = 0;
    std::uint32_t interval_end = 0;
    std::uint32_t quantile_index = 0;
    bool mean_subtracted = false;

    friend bool operator==(const FeatureColumn&, const FeatureColumn&) = default;
};

/// Dense row-major q x p matrix of features.
///
/// Matrices produced by the transform carry the full column schema; matrices
/// built directly (tests, synthetic data) may have an empty schema.
class FeatureMatrix {
public:
    FeatureMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    FeatureMatrix(std::size_t rows, std::vector<FeatureColumn> schema)
        : rows_(rows), cols_(schema.size()), data_(rows * schema.size(), 0.0),
          schema_(std::move(schema)) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const noexcept {
        return {data_.data() + i * cols_, cols_};
    }

    double at(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }
    double& at(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }

    std::span<const double> data() const noexcept { return data_; }
    const std::vector<FeatureColumn>& schema() const noexcept { return schema_; }

    friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
    std::vector<FeatureColumn> schema_;
};

} // namespace quant
