#include "quant/dataset_io.hpp"
#include "quant/forest.hpp"
#include "quant/model.hpp"
#include "quant/rng.hpp"
#include "quant/stats.hpp"
#include "quant/transform.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace {

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

struct CommonOptions {
    int depth = 6;
    int divisor = 4;
    int trees = 200;
    std::string split_frac = "0.1";
    std::string reps = "raw,diff1,diff2,fft";
    int smooth_window = 5;
    std::uint64_t seed = 0;
    int threads = 1;
    std::string preset = "default";
    bool no_mean_subtract = false;
    bool all_mean_subtract = false;
    bool verbose = false;
};

void add_common_flags(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--depth", opt.depth, "interval depth d; levels 1..d of dyadic intervals")
        ->check(CLI::Range(1, 16));
    cmd->add_option("--div", opt.divisor, "quantile divisor v; ~m/v quantiles per interval")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--trees", opt.trees, "number of trees")->check(CLI::PositiveNumber);
    cmd->add_option("--split-frac", opt.split_frac,
                    "candidate features per split: 'sqrt' or a fraction in (0,1]");
    cmd->add_option("--reps", opt.reps, "representations, comma list of raw,diff1,diff2,fft");
    cmd->add_option("--smooth-window", opt.smooth_window,
                    "moving-average window for diff1 (odd)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", opt.seed, "master random seed");
    cmd->add_option("--threads", opt.threads, "worker threads (0 = all hardware threads)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--preset", opt.preset, "parameter preset")
        ->check(CLI::IsMember({"default", "fast"}));
    auto* none = cmd->add_flag("--no-mean-subtract", opt.no_mean_subtract,
                               "never subtract the interval mean");
    cmd->add_flag("--all-mean-subtract", opt.all_mean_subtract,
                  "subtract the interval mean from every quantile")
        ->excludes(none);
    cmd->add_flag("--verbose", opt.verbose, "print per-phase details");
}

quant::SplitCandidates parse_split_candidates(const std::string& text) {
    quant::SplitCandidates sc;
    if (text == "sqrt") {
        sc.mode = quant::SplitCandidates::Mode::sqrt_total;
        return sc;
    }
    double f = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, f);
    if (ec != std::errc{} || ptr != end || !(f > 0.0) || f > 1.0) {
        throw std::invalid_argument("split fraction must be 'sqrt' or a decimal in (0, 1], got '" +
                                    text + "'");
    }
    sc.mode = quant::SplitCandidates::Mode::fraction;
    sc.fraction = f;
    return sc;
}

quant::TransformConfig make_transform_config(const CLI::App* cmd, const CommonOptions& opt) {
    quant::TransformConfig config;
    if (opt.preset == "fast") config = quant::TransformConfig::fast();
    if (cmd->count("--depth") > 0) config.depth = opt.depth;
    if (cmd->count("--div") > 0) config.divisor = opt.divisor;
    if (cmd->count("--smooth-window") > 0) config.smoothing_window = opt.smooth_window;
    config.representations = quant::parse_representation_set(opt.reps);
    if (opt.no_mean_subtract) config.mean_policy = quant::MeanPolicy::none;
    if (opt.all_mean_subtract) config.mean_policy = quant::MeanPolicy::subtract_all;
    config.validate();
    return config;
}

quant::TrainConfig make_train_config(const CommonOptions& opt, std::uint64_t master_seed) {
    quant::TrainConfig config;
    config.num_trees = opt.trees;
    config.features_per_split = parse_split_candidates(opt.split_frac);
    config.master_seed = master_seed;
    config.validate();
    return config;
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

std::string dataset_name_from_path(const std::filesystem::path& path) {
    std::string stem = path.stem().string();
    for (const std::string_view suffix : {"_TRAIN", "_train"}) {
        if (stem.size() > suffix.size() && stem.ends_with(suffix)) {
            stem.resize(stem.size() - suffix.size());
            break;
        }
    }
    return stem;
}

void require_csv_safe_names(const std::vector<std::string>& names) {
    for (const auto& name : names) {
        if (name.find_first_of(",\r\n") != std::string::npos) {
            throw std::runtime_error("class label '" + name +
                                     "' cannot be written to CSV (contains comma or newline)");
        }
    }
}

// ---------------------------------------------------------------------------
// fit

struct FitArgs {
    std::string train_path;
    std::string model_path = "model.qnt";
    CommonOptions common;
};

void run_fit(const CLI::App* cmd, const FitArgs& args) {
    const auto train = quant::load_tsv(args.train_path);
    const auto config = make_transform_config(cmd, args.common);
    const auto train_config = make_train_config(args.common, args.common.seed);
    const int threads = resolve_threads(args.common.threads);

    quant::Model model;
    model.transform = quant::fit_transform(train, config);
    model.class_names = train.class_names();

    Stopwatch transform_watch;
    const auto features = quant::apply_transform(model.transform, train, threads);
    const double transform_seconds = transform_watch.seconds();

    Stopwatch classifier_watch;
    model.forest = quant::fit_forest(features, train.labels(), train.num_classes(), train_config,
                                     threads);
    const double classifier_seconds = classifier_watch.seconds();

    std::cout << "q = " << train.size() << " examples of length " << train.series_length()
              << ", " << train.num_classes() << " classes\n";
    std::cout << "p = " << model.transform.feature_count() << " features\n";
    std::cout << "transform time: " << fmt("%.3f", transform_seconds) << " s\n";
    std::cout << "classifier time: " << fmt("%.3f", classifier_seconds) << " s\n";

    quant::save_model(args.model_path, model);
    std::cout << "wrote " << args.model_path << "\n";
}

// ---------------------------------------------------------------------------
// predict

struct PredictArgs {
    std::string model_path;
    std::string data_path;
    std::string out_path; // empty = stdout
    int threads = 1;
};

void run_predict(const PredictArgs& args) {
    const auto model = quant::load_model(args.model_path);
    const auto data = quant::load_tsv(args.data_path);
    const int threads = resolve_threads(args.threads);
    require_csv_safe_names(model.class_names);

    const auto features = quant::apply_transform(model.transform, data, threads);
    const auto proba = quant::predict_proba(model.forest, features, threads);
    const std::size_t num_classes = model.forest.num_classes;

    std::ofstream file;
    if (!args.out_path.empty()) {
        file.open(args.out_path, std::ios::binary);
        if (!file) throw std::runtime_error("cannot write predictions file " + args.out_path);
    }
    std::ostream& out = args.out_path.empty() ? std::cout : file;

    out << "row,predicted";
    for (const auto& name : model.class_names) out << ",p_" << name;
    out << "\n";
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double* row = proba.data() + i * num_classes;
        std::size_t best = 0;
        for (std::size_t c = 1; c < num_classes; ++c) {
            if (row[c] > row[best]) best = c;
        }
        out << i << ',' << model.class_names[best];
        for (std::size_t c = 0; c < num_classes; ++c) out << ',' << fmt("%.17g", row[c]);
        out << "\n";
    }
    if (!out) throw std::runtime_error("failed writing predictions");
    if (!args.out_path.empty()) {
        std::cout << "wrote " << args.out_path << " (" << data.size() << " rows)\n";
    }
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
    std::string train_path;
    std::string test_path;
    std::string out_path = "results.csv";
    std::string name; // empty = derive from train path
    int resamples = 1;
    bool stable_timings = false;
    CommonOptions common;
};

void run_eval(const CLI::App* cmd, const EvalArgs& args) {
    const auto train = quant::load_tsv(args.train_path);
    const auto test = quant::load_tsv(args.test_path);
    const auto config = make_transform_config(cmd, args.common);
    const int threads = resolve_threads(args.common.threads);
    const std::string name =
        args.name.empty() ? dataset_name_from_path(args.train_path) : args.name;

    if (train.series_length() != test.series_length()) {
        throw std::runtime_error("train series length " + std::to_string(train.series_length()) +
                                 " differs from test series length " +
                                 std::to_string(test.series_length()));
    }
    const auto transform = quant::fit_transform(train, config);

    std::vector<quant::ResultRow> rows;
    std::vector<double> accuracies;
    Stopwatch total_watch;
    for (int r = 0; r < args.resamples; ++r) {
        const auto index = static_cast<std::uint32_t>(r);
        std::optional<std::pair<quant::LabeledDataset, quant::LabeledDataset>> split;
        try {
            split = quant::stratified_resample(train, test, args.common.seed, index);
        } catch (const std::exception& e) {
            std::cerr << "warning: resample " << r << " skipped: " << e.what() << "\n";
            continue;
        }
        const auto& tr = split->first;
        const auto& te = split->second;

        const std::uint64_t forest_seed =
            quant::derive_stream(quant::derive_stream(args.common.seed, index), 1);
        const auto train_config = make_train_config(args.common, forest_seed);

        Stopwatch train_transform_watch;
        const auto train_features = quant::apply_transform(transform, tr, threads);
        const double train_transform_seconds = train_transform_watch.seconds();

        Stopwatch classifier_watch;
        const auto forest = quant::fit_forest(train_features, tr.labels(), tr.num_classes(),
                                              train_config, threads);
        const double classifier_seconds = classifier_watch.seconds();

        Stopwatch test_transform_watch;
        const auto test_features = quant::apply_transform(transform, te, threads);
        const double test_transform_seconds = test_transform_watch.seconds();

        Stopwatch predict_watch;
        const auto predictions = quant::predict(forest, test_features, threads);
        const double predict_seconds = predict_watch.seconds();

        std::size_t correct = 0;
        for (std::size_t i = 0; i < te.size(); ++i) {
            if (predictions[i] == te.label(i)) ++correct;
        }
        const double accuracy = static_cast<double>(correct) / static_cast<double>(te.size());
        accuracies.push_back(accuracy);

        const double train_seconds = train_transform_seconds + classifier_seconds;
        const double test_seconds = test_transform_seconds + predict_seconds;
        if (args.common.verbose) {
            std::cout << name << " resample " << r << ": accuracy " << fmt("%.4f", accuracy)
                      << ", train " << fmt("%.3f", train_seconds) << " s (transform "
                      << fmt("%.3f", train_transform_seconds) << " s, classifier "
                      << fmt("%.3f", classifier_seconds) << " s), test "
                      << fmt("%.3f", test_seconds) << " s (transform "
                      << fmt("%.3f", test_transform_seconds) << " s, classifier "
                      << fmt("%.3f", predict_seconds) << " s)\n";
        }

        quant::ResultRow row;
        row.dataset = name;
        row.resample = index;
        row.accuracy = accuracy;
        row.train_seconds = args.stable_timings ? 0.0 : train_seconds;
        row.test_seconds = args.stable_timings ? 0.0 : test_seconds;
        rows.push_back(std::move(row));
    }

    if (rows.empty()) throw std::runtime_error("no resamples were evaluated");
    quant::write_results_csv(args.out_path, rows);

    const double n = static_cast<double>(accuracies.size());
    const double mean = std::accumulate(accuracies.begin(), accuracies.end(), 0.0) / n;
    double var = 0.0;
    for (const double a : accuracies) var += (a - mean) * (a - mean);
    const double std_dev = accuracies.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;

    std::cout << name << ": mean accuracy " << fmt("%.4f", mean) << " +/- "
              << fmt("%.4f", std_dev) << " over " << rows.size() << " resample"
              << (rows.size() == 1 ? "" : "s") << "\n";
    std::cout << "total time: " << fmt("%.3f", total_watch.seconds()) << " s\n";
    std::cout << "wrote " << args.out_path << "\n";
}

// ---------------------------------------------------------------------------
// sweep

struct SweepArgs {
    std::string axis;
    std::vector<std::string> values;
    std::vector<std::string> dataset_paths;
    std::string out_path = "sweep.csv";
    int folds = 5;
    CommonOptions common;
};

struct SweepValue {
    std::string text;
    std::function<void(quant::TransformConfig&, quant::TrainConfig&)> apply;
};

int parse_int_token(const std::string& text) {
    int v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
        throw std::invalid_argument("'" + text + "' is not an integer");
    }
    return v;
}

SweepValue make_sweep_value(const std::string& axis, const std::string& token) {
    SweepValue value;
    value.text = token;
    if (axis == "depth") {
        const int d = parse_int_token(token);
        if (d < 1 || d > 16) throw std::invalid_argument("depth must be in 1..16");
        value.apply = [d](quant::TransformConfig& t, quant::TrainConfig&) { t.depth = d; };
    } else if (axis == "divisor") {
        const int v = parse_int_token(token);
        if (v < 1) throw std::invalid_argument("divisor must be >= 1");
        value.apply = [v](quant::TransformConfig& t, quant::TrainConfig&) { t.divisor = v; };
    } else if (axis == "representations") {
        const auto set = quant::parse_representation_set(token); // '+'-separated inside a value
        value.apply = [set](quant::TransformConfig& t, quant::TrainConfig&) {
            t.representations = set;
        };
    } else if (axis == "trees") {
        const int n = parse_int_token(token);
        if (n < 1) throw std::invalid_argument("trees must be >= 1");
        value.apply = [n](quant::TransformConfig&, quant::TrainConfig& f) { f.num_trees = n; };
    } else if (axis == "split_fraction") {
        const auto sc = parse_split_candidates(token);
        value.apply = [sc](quant::TransformConfig&, quant::TrainConfig& f) {
            f.features_per_split = sc;
        };
    } else if (axis == "smoothing") {
        const int w = parse_int_token(token);
        if (w < 1 || w % 2 == 0) throw std::invalid_argument("smoothing window must be odd and >= 1");
        value.apply = [w](quant::TransformConfig& t, quant::TrainConfig&) {
            t.smoothing_window = w;
        };
    } else {
        throw std::invalid_argument("unknown axis '" + axis + "'");
    }
    return value;
}

std::vector<SweepValue> parse_sweep_values(const std::string& axis,
                                           const std::vector<std::string>& tokens) {
    std::vector<SweepValue> values;
    std::string problems;
    for (const auto& token : tokens) {
        try {
            values.push_back(make_sweep_value(axis, token));
        } catch (const std::exception& e) {
            problems += std::string("\n  ") + axis + " value '" + token + "': " + e.what();
        }
    }
    if (!problems.empty()) throw std::runtime_error("illegal sweep values:" + problems);
    return values;
}

void run_sweep(const CLI::App* cmd, const SweepArgs& args) {
    // validate every axis value before touching any dataset
    const auto values = parse_sweep_values(args.axis, args.values);
    const auto base_transform_config = make_transform_config(cmd, args.common);
    const auto base_train_config = make_train_config(args.common, 0);
    const int threads = resolve_threads(args.common.threads);

    std::ofstream out(args.out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write sweep file " + args.out_path);
    out << "dataset,value,fold,accuracy,seconds\n";

    std::size_t rows = 0;
    for (std::size_t di = 0; di < args.dataset_paths.size(); ++di) {
        const auto& path = args.dataset_paths[di];
        const auto dataset = quant::load_tsv(path);
        const std::string name = dataset_name_from_path(path);
        if (name.find_first_of(",\r\n") != std::string::npos) {
            throw std::runtime_error("dataset name '" + name + "' cannot be written to CSV");
        }
        const auto folds =
            quant::stratified_kfold(dataset, args.folds, args.common.seed);

        for (const auto& value : values) {
            auto transform_config = base_transform_config;
            auto train_config = base_train_config;
            value.apply(transform_config, train_config);
            transform_config.validate();
            train_config.validate();

            for (std::size_t f = 0; f < folds.size(); ++f) {
                std::vector<std::size_t> train_indices;
                for (std::size_t g = 0; g < folds.size(); ++g) {
                    if (g == f) continue;
                    train_indices.insert(train_indices.end(), folds[g].begin(), folds[g].end());
                }
                std::sort(train_indices.begin(), train_indices.end());
                const auto tr = quant::take_examples(dataset, train_indices);
                const auto va = quant::take_examples(dataset, folds[f]);

                // same forest stream for every axis value: paired comparisons
                train_config.master_seed = quant::derive_stream(
                    quant::derive_stream(args.common.seed, di), f);

                Stopwatch watch;
                const auto transform = quant::fit_transform(tr, transform_config);
                const auto train_features = quant::apply_transform(transform, tr, threads);
                const auto forest = quant::fit_forest(train_features, tr.labels(),
                                                      tr.num_classes(), train_config, threads);
                const auto val_features = quant::apply_transform(transform, va, threads);
                const auto predictions = quant::predict(forest, val_features, threads);
                const double seconds = watch.seconds();

                std::size_t correct = 0;
                for (std::size_t i = 0; i < va.size(); ++i) {
                    if (predictions[i] == va.label(i)) ++correct;
                }
                const double accuracy =
                    static_cast<double>(correct) / static_cast<double>(va.size());

                out << name << ',' << value.text << ',' << f << ',' << fmt("%.10g", accuracy)
                    << ',' << fmt("%.6f", seconds) << "\n";
                ++rows;
                if (args.common.verbose) {
                    std::cout << name << " " << args.axis << "=" << value.text << " fold " << f
                              << ": accuracy " << fmt("%.4f", accuracy) << " ("
                              << fmt("%.3f", seconds) << " s)\n";
                }
            }
        }
    }
    if (!out) throw std::runtime_error("failed writing sweep file " + args.out_path);
    std::cout << "wrote " << args.out_path << " (" << rows << " rows)\n";
}

// ---------------------------------------------------------------------------
// compare

struct CompareArgs {
    std::string first_path;
    std::string second_path;
};

void run_compare(const CompareArgs& args) {
    const auto first = quant::read_results_csv(args.first_path);
    const auto second = quant::read_results_csv(args.second_path);
    const auto report = quant::compare_results(first, second);

    std::cout << "datasets: " << report.dataset_count << "\n";
    std::cout << "mean accuracy difference: " << fmt("%.10g", report.mean_difference) << "\n";
    std::cout << "wins/draws/losses: " << report.wins << "/" << report.draws << "/"
              << report.losses << "\n";
    std::cout << "wilcoxon p-value: " << fmt("%.10g", report.wilcoxon.p_value) << " ("
              << (report.wilcoxon.exact ? "exact" : "normal approximation")
              << ", n=" << report.wilcoxon.n_used << ")\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantile-feature time series classification"};
    app.require_subcommand(1);

    FitArgs fit_args;
    auto* fit = app.add_subcommand("fit", "train a model on a TSV dataset");
    fit->add_option("train", fit_args.train_path, "training TSV file")->required();
    fit->add_option("--model", fit_args.model_path, "output model path");
    add_common_flags(fit, fit_args.common);
    fit->callback([&] { run_fit(fit, fit_args); });

    PredictArgs predict_args;
    auto* predict = app.add_subcommand("predict", "predict labels with a saved model");
    predict->add_option("model", predict_args.model_path, "model file")->required();
    predict->add_option("data", predict_args.data_path, "TSV file to classify")->required();
    predict->add_option("--out", predict_args.out_path, "predictions CSV (default stdout)");
    predict->add_option("--threads", predict_args.threads,
                        "worker threads (0 = all hardware threads)")
        ->check(CLI::NonNegativeNumber);
    predict->callback([&] { run_predict(predict_args); });

    EvalArgs eval_args;
    auto* eval = app.add_subcommand("eval", "evaluate on a train/test split with resamples");
    eval->add_option("train", eval_args.train_path, "training TSV file")->required();
    eval->add_option("test", eval_args.test_path, "test TSV file")->required();
    eval->add_option("--resamples", eval_args.resamples, "number of resamples (r = 0 is the original split)")
        ->check(CLI::PositiveNumber);
    eval->add_option("--out", eval_args.out_path, "results CSV path");
    eval->add_option("--name", eval_args.name, "dataset name for the results CSV");
    eval->add_flag("--stable-timings", eval_args.stable_timings,
                   "write 0 in the timing columns (reproducible output)");
    add_common_flags(eval, eval_args.common);
    eval->callback([&] { run_eval(eval, eval_args); });

    SweepArgs sweep_args;
    auto* sweep = app.add_subcommand("sweep", "cross-validated parameter sensitivity sweep");
    sweep->add_option("--axis", sweep_args.axis, "parameter to sweep")
        ->required()
        ->check(CLI::IsMember(
            {"depth", "divisor", "representations", "trees", "split_fraction", "smoothing"}));
    sweep->add_option("--values", sweep_args.values,
                      "comma list of axis values ('+'-separated representation sets)")
        ->required()
        ->delimiter(',');
    sweep->add_option("datasets", sweep_args.dataset_paths, "TSV dataset files")
        ->required()
        ->expected(-1);
    sweep->add_option("--out", sweep_args.out_path, "sweep CSV path");
    sweep->add_option("--folds", sweep_args.folds, "cross-validation folds")
        ->check(CLI::Range(2, 100));
    add_common_flags(sweep, sweep_args.common);
    sweep->callback([&] { run_sweep(sweep, sweep_args); });

    CompareArgs compare_args;
    auto* compare = app.add_subcommand("compare", "compare two results CSVs");
    compare->add_option("first", compare_args.first_path, "results CSV A")->required();
    compare->add_option("second", compare_args.second_path, "results CSV B")->required();
    compare->callback([&] { run_compare(compare_args); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
