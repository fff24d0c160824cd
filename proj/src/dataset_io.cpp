#include "quant/dataset_io.hpp"

#include "quant/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

namespace quant {

namespace {

[[noreturn]] void parse_error(const std::filesystem::path& path, std::size_t line,
                              const std::string& what) {
    throw std::runtime_error(path.string() + ": line " + std::to_string(line) + ": " + what);
}

double parse_value(std::string_view field, const std::filesystem::path& path, std::size_t line) {
    double value = 0.0;
    const auto* begin = field.data();
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        parse_error(path, line, "cannot parse value '" + std::string(field) + "'");
    }
    if (!std::isfinite(value)) {
        parse_error(path, line, "non-finite value '" + std::string(field) + "'");
    }
    return value;
}

std::vector<std::string_view> split_tabs(std::string_view text) {
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (true) {
        const std::size_t tab = text.find('\t', pos);
        if (tab == std::string_view::npos) {
            fields.push_back(text.substr(pos));
            return fields;
        }
        fields.push_back(text.substr(pos, tab - pos));
        pos = tab + 1;
    }
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

LabeledDataset load_tsv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset file " + path.string());

    std::vector<TimeSeries> series;
    std::vector<std::string> raw_labels;
    std::size_t expected_values = 0;

    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            // allow trailing blank lines, reject gaps in the middle
            const std::size_t blank_at = line_number;
            std::string rest;
            while (std::getline(in, rest)) {
                if (!rest.empty() && rest.back() == '\r') rest.pop_back();
                if (!rest.empty()) parse_error(path, blank_at, "blank line inside dataset");
            }
            break;
        }

        const auto fields = split_tabs(line);
        if (fields.size() < 2) {
            parse_error(path, line_number, "expected a label and at least one value");
        }
        const std::size_t value_count = fields.size() - 1;
        if (series.empty()) {
            expected_values = value_count;
        } else if (value_count != expected_values) {
            parse_error(path, line_number,
                        "expected " + std::to_string(expected_values) + " values, found " +
                            std::to_string(value_count));
        }

        std::vector<double> values;
        values.reserve(value_count);
        for (std::size_t i = 1; i < fields.size(); ++i) {
            values.push_back(parse_value(fields[i], path, line_number));
        }
        series.emplace_back(std::move(values));
        raw_labels.emplace_back(fields[0]);
    }

    if (series.empty()) throw std::runtime_error("empty dataset file " + path.string());
    return LabeledDataset::from_raw_labels(std::move(series), raw_labels);
}

void write_tsv(const std::filesystem::path& path, const LabeledDataset& dataset) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write dataset file " + path.string());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        out << dataset.class_names()[static_cast<std::size_t>(dataset.label(i))];
        for (const double v : dataset.series(i).values()) out << '\t' << format_double(v);
        out << '\n';
    }
    if (!out) throw std::runtime_error("failed writing dataset file " + path.string());
}

namespace {

LabeledDataset remap_to(const LabeledDataset& dataset, const std::vector<std::string>& names) {
    std::map<std::string, int> id_of;
    for (std::size_t i = 0; i < names.size(); ++i) id_of[names[i]] = static_cast<int>(i);
    std::vector<int> labels;
    labels.reserve(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        labels.push_back(
            id_of.at(dataset.class_names()[static_cast<std::size_t>(dataset.label(i))]));
    }
    return LabeledDataset(dataset.all_series(), std::move(labels), names);
}

} // namespace

std::pair<LabeledDataset, LabeledDataset> align_labels(const LabeledDataset& a,
                                                       const LabeledDataset& b) {
    if (a.class_names() == b.class_names()) return {a, b};
    std::vector<std::string> names;
    std::merge(a.class_names().begin(), a.class_names().end(), b.class_names().begin(),
               b.class_names().end(), std::back_inserter(names));
    names.erase(std::unique(names.begin(), names.end()), names.end());
    return {remap_to(a, names), remap_to(b, names)};
}

std::pair<LabeledDataset, LabeledDataset> stratified_resample(const LabeledDataset& train,
                                                              const LabeledDataset& test,
                                                              std::uint64_t seed,
                                                              std::uint32_t resample_index) {
    if (train.series_length() != test.series_length()) {
        throw std::invalid_argument("train series length " +
                                    std::to_string(train.series_length()) +
                                    " differs from test series length " +
                                    std::to_string(test.series_length()));
    }
    auto [a, b] = align_labels(train, test);

    const std::size_t num_classes = a.num_classes();
    std::vector<std::size_t> train_per_class(num_classes, 0), test_per_class(num_classes, 0);
    for (std::size_t i = 0; i < a.size(); ++i) ++train_per_class[a.label(i)];
    for (std::size_t i = 0; i < b.size(); ++i) ++test_per_class[b.label(i)];
    for (std::size_t c = 0; c < num_classes; ++c) {
        if (train_per_class[c] == 0 || test_per_class[c] == 0) {
            throw std::runtime_error("class '" + a.class_names()[c] +
                                     "' is absent from the " +
                                     (train_per_class[c] == 0 ? "train" : "test") +
                                     " side; stratified resampling is impossible");
        }
    }

    if (resample_index == 0) return {std::move(a), std::move(b)};

    // pooled view: indices < train size refer to the train side
    const std::size_t pool_size = a.size() + b.size();
    auto pooled_label = [&](std::size_t i) {
        return i < a.size() ? a.label(i) : b.label(i - a.size());
    };
    auto pooled_series = [&](std::size_t i) -> const TimeSeries& {
        return i < a.size() ? a.series(i) : b.series(i - a.size());
    };

    auto engine = make_engine(seed, resample_index);
    std::vector<TimeSeries> new_train_series, new_test_series;
    std::vector<int> new_train_labels, new_test_labels;
    new_train_series.reserve(a.size());
    new_test_series.reserve(b.size());

    for (std::size_t c = 0; c < num_classes; ++c) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < pool_size; ++i) {
            if (static_cast<std::size_t>(pooled_label(i)) == c) members.push_back(i);
        }
        std::shuffle(members.begin(), members.end(), engine);
        for (std::size_t j = 0; j < members.size(); ++j) {
            if (j < train_per_class[c]) {
                new_train_series.push_back(pooled_series(members[j]));
                new_train_labels.push_back(static_cast<int>(c));
            } else {
                new_test_series.push_back(pooled_series(members[j]));
                new_test_labels.push_back(static_cast<int>(c));
            }
        }
    }

    return {LabeledDataset(std::move(new_train_series), std::move(new_train_labels),
                           a.class_names()),
            LabeledDataset(std::move(new_test_series), std::move(new_test_labels),
                           a.class_names())};
}

std::vector<std::vector<std::size_t>> stratified_kfold(const LabeledDataset& dataset, int k,
                                                       std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("k must be >= 2");
    const std::size_t num_classes = dataset.num_classes();
    std::vector<std::vector<std::size_t>> per_class(num_classes);
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        per_class[static_cast<std::size_t>(dataset.label(i))].push_back(i);
    }
    for (std::size_t c = 0; c < num_classes; ++c) {
        if (per_class[c].size() < static_cast<std::size_t>(k)) {
            throw std::runtime_error("class '" + dataset.class_names()[c] + "' has only " +
                                     std::to_string(per_class[c].size()) +
                                     " examples; cannot build " + std::to_string(k) + " folds");
        }
    }

    auto engine = make_engine(seed, 0);
    std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
    for (std::size_t c = 0; c < num_classes; ++c) {
        std::shuffle(per_class[c].begin(), per_class[c].end(), engine);
        for (std::size_t j = 0; j < per_class[c].size(); ++j) {
            folds[j % static_cast<std::size_t>(k)].push_back(per_class[c][j]);
        }
    }
    for (auto& fold : folds) std::sort(fold.begin(), fold.end());
    return folds;
}

LabeledDataset take_examples(const LabeledDataset& dataset,
                             const std::vector<std::size_t>& indices) {
    if (indices.empty()) throw std::invalid_argument("take_examples: empty index set");
    std::vector<TimeSeries> series;
    std::vector<int> labels;
    series.reserve(indices.size());
    for (const auto i : indices) {
        if (i >= dataset.size()) throw std::out_of_range("take_examples: index out of range");
        series.push_back(dataset.series(i));
        labels.push_back(dataset.label(i));
    }
    return LabeledDataset(std::move(series), std::move(labels), dataset.class_names());
}

void write_results_csv(const std::filesystem::path& path, const std::vector<ResultRow>& rows) {
    std::ofstream out(path, std::ios::binary); // LF endings on every platform
    if (!out) throw std::runtime_error("cannot write results file " + path.string());
    out << "dataset,resample,accuracy,train_seconds,test_seconds\n";
    char buf[128];
    for (const auto& row : rows) {
        if (row.dataset.find_first_of(",\n\r") != std::string::npos) {
            throw std::invalid_argument("dataset name '" + row.dataset +
                                        "' may not contain commas or newlines");
        }
        std::snprintf(buf, sizeof(buf), ",%u,%.10g,%.6f,%.6f\n", row.resample, row.accuracy,
                      row.train_seconds, row.test_seconds);
        out << row.dataset << buf;
    }
    if (!out) throw std::runtime_error("failed writing results file " + path.string());
}

std::vector<ResultRow> read_results_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open results file " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty results file " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "dataset,resample,accuracy,train_seconds,test_seconds") {
        throw std::runtime_error(path.string() + ": unexpected results header '" + line + "'");
    }

    std::vector<ResultRow> rows;
    std::size_t line_number = 1;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 5) {
            parse_error(path, line_number, "expected 5 comma-separated fields");
        }

        ResultRow row;
        row.dataset = fields[0];
        try {
            row.resample = static_cast<std::uint32_t>(std::stoul(fields[1]));
            row.accuracy = std::stod(fields[2]);
            row.train_seconds = std::stod(fields[3]);
            row.test_seconds = std::stod(fields[4]);
        } catch (const std::exception&) {
            parse_error(path, line_number, "cannot parse numeric fields");
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace quant
