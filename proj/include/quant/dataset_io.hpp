#pragma once

#include "quant/series.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace quant {

/// Load a tab-separated dataset: one example per line, label string first,
/// then the series values. Values must parse as finite decimal or scientific
/// floating point; any malformed line is reported with its line number.
LabeledDataset load_tsv(const std::filesystem::path& path);

/// Write in the same layout; values are printed with enough digits to
/// round-trip bit-exactly.
void write_tsv(const std::filesystem::path& path, const LabeledDataset& dataset);

/// Remap both datasets onto the union of their class names so that ids agree.
std::pair<LabeledDataset, LabeledDataset> align_labels(const LabeledDataset& a,
                                                       const LabeledDataset& b);

/// Resample r of a train/test pair. r = 0 is the original split; r >= 1
/// reshuffles the pooled examples class by class with the (seed, r) stream,
/// keeping each side's per-class counts. Both returned datasets share the
/// union label mapping. Throws if some class is missing from either side.
std::pair<LabeledDataset, LabeledDataset> stratified_resample(const LabeledDataset& train,
                                                              const LabeledDataset& test,
                                                              std::uint64_t seed,
                                                              std::uint32_t resample_index);

/// Stratified k-fold assignment: returns k disjoint index sets covering the
/// dataset, with per-class sizes differing by at most one across folds.
/// Throws if any class has fewer than k examples.
std::vector<std::vector<std::size_t>> stratified_kfold(const LabeledDataset& dataset, int k,
                                                       std::uint64_t seed);

/// Subset of a dataset by example index (keeps the full class name table).
LabeledDataset take_examples(const LabeledDataset& dataset,
                             const std::vector<std::size_t>& indices);

/// One row of a results file: header dataset,resample,accuracy,
/// train_seconds,test_seconds.
struct ResultRow {
    std::string dataset;
    std::uint32_t resample = 0;
    double accuracy = 0.0;
    double train_seconds = 0.0;
    double test_seconds = 0.0;
};

void write_results_csv(const std::filesystem::path& path, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_results_csv(const std::filesystem::path& path);

} // namespace quant
