// Acceptance gate: one [PASS]/[FAIL] line per criterion, nonzero exit on any
// failure. Library criteria run in-process; CLI criteria drive the quant
// binary through a temp directory.

#include "quant/dataset_io.hpp"
#include "quant/forest.hpp"
#include "quant/intervals.hpp"
#include "quant/representations.hpp"
#include "quant/rng.hpp"
#include "quant/series.hpp"
#include "quant/transform.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <thread>
#include <vector>

namespace fs = std::filesystem;

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw std::runtime_error(message);
}

std::string num(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

int worker_threads() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

int g_failures = 0;

void criterion(int number, const std::string& title, const std::function<std::string()>& body) {
    Stopwatch watch;
    bool ok = true;
    std::string detail;
    try {
        detail = body();
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    std::printf("[%s] criterion %d: %s%s%s (%.2f s)\n", ok ? "PASS" : "FAIL", number,
                title.c_str(), detail.empty() ? "" : " -- ", detail.c_str(), watch.seconds());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

// ---------------------------------------------------------------------------
// synthetic data

quant::LabeledDataset scale_dataset(std::size_t per_class, std::size_t length,
                                    std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> unit(0.0, 1.0), wide(0.0, 1.5);
    std::vector<quant::TimeSeries> series;
    std::vector<int> labels;
    for (int c = 0; c < 2; ++c) {
        for (std::size_t i = 0; i < per_class; ++i) {
            std::vector<double> values(length);
            for (auto& v : values) v = c == 0 ? unit(rng) : wide(rng);
            series.emplace_back(std::move(values));
            labels.push_back(c);
        }
    }
    return {std::move(series), std::move(labels), {"0", "1"}};
}

quant::LabeledDataset bump_dataset(std::size_t per_class, std::size_t length,
                                   std::size_t center0, std::size_t center1,
                                   std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> unit(0.0, 1.0);
    std::vector<quant::TimeSeries> series;
    std::vector<int> labels;
    for (int c = 0; c < 2; ++c) {
        const std::size_t center = c == 0 ? center0 : center1;
        for (std::size_t i = 0; i < per_class; ++i) {
            std::vector<double> values(length);
            for (auto& v : values) v = unit(rng);
            for (std::size_t t = center - 4; t < center + 4; ++t) values[t] += 1.0;
            series.emplace_back(std::move(values));
            labels.push_back(c);
        }
    }
    return {std::move(series), std::move(labels), {"0", "1"}};
}

double forest_accuracy(const quant::LabeledDataset& train, const quant::LabeledDataset& test,
                       const quant::FittedTransform& transform, std::uint64_t forest_seed,
                       const quant::TrainConfig& base_config) {
    const int threads = worker_threads();
    auto config = base_config;
    config.master_seed = forest_seed;
    const auto train_features = quant::apply_transform(transform, train, threads);
    const auto forest = quant::fit_forest(train_features, train.labels(), train.num_classes(),
                                          config, threads);
    const auto test_features = quant::apply_transform(transform, test, threads);
    const auto predictions = quant::predict(forest, test_features, threads);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
        if (predictions[i] == test.label(i)) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(test.size());
}

using DatasetFactory = std::function<quant::LabeledDataset(std::uint64_t seed)>;

std::string synthetic_task(const DatasetFactory& make, double floor_accuracy,
                           double budget_seconds) {
    Stopwatch watch;
    const auto transform = quant::fit_transform(128, quant::TransformConfig{});
    const quant::TrainConfig defaults;
    double sum = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto train = make(2 * seed);
        const auto test = make(2 * seed + 1);
        sum += forest_accuracy(train, test, transform, seed, defaults);
    }
    const double mean = sum / 10.0;
    const double elapsed = watch.seconds();
    require(mean >= floor_accuracy, "mean accuracy " + num("%.4f", mean) + " below " +
                                        num("%.2f", floor_accuracy));
    require(elapsed < budget_seconds,
            "took " + num("%.1f", elapsed) + " s, budget " + num("%.0f", budget_seconds) + " s");
    return "mean accuracy " + num("%.4f", mean) + " over 10 seeds";
}

// ---------------------------------------------------------------------------
// oracles

std::vector<double> oracle_quantiles(std::vector<double> values, std::size_t v) {
    std::sort(values.begin(), values.end());
    const std::size_t m = values.size();
    const std::size_t k = 1 + (m - 1) / v;
    std::vector<double> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double pos = k == 1 ? 0.5 * static_cast<double>(m - 1)
                                  : static_cast<double>(i) * static_cast<double>(m - 1) /
                                        static_cast<double>(k - 1);
        const auto lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, m - 1);
        const double frac = pos - static_cast<double>(lo);
        out.push_back(values[lo] + frac * (values[hi] - values[lo]));
    }
    return out;
}

std::vector<double> naive_dft_magnitude(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<double> out(n / 2 + 1);
    for (std::size_t k = 0; k < out.size(); ++k) {
        double re = 0.0, im = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) *
                                 static_cast<double>(t) / static_cast<double>(n);
            re += x[t] * std::cos(angle);
            im += x[t] * std::sin(angle);
        }
        out[k] = std::hypot(re, im);
    }
    return out;
}

// ---------------------------------------------------------------------------
// CLI plumbing

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run_cli(const fs::path& dir, const std::string& args) {
    const fs::path out = dir / "stdout.txt";
    const fs::path err = dir / "stderr.txt";
    const std::string command =
        std::string(QUANT_CLI_PATH) + " " + args + " > " + out.string() + " 2> " + err.string();
    const int status = std::system(command.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = slurp(out);
    result.err = slurp(err);
    return result;
}

void require_success(const RunResult& r, const std::string& what) {
    require(r.exit_code == 0, what + " exited with " + std::to_string(r.exit_code) +
                                  (r.err.empty() ? "" : ": " + r.err));
}

double parse_p_value(const std::string& output) {
    const std::string key = "wilcoxon p-value: ";
    const auto pos = output.find(key);
    require(pos != std::string::npos, "no 'wilcoxon p-value:' line in compare output");
    return std::stod(output.substr(pos + key.size()));
}

} // namespace

int main() {
    const fs::path work =
        fs::temp_directory_path() /
        ("quant_acceptance_" + std::to_string(std::random_device{}()));
    fs::create_directories(work);

    criterion(1, "interval count 120 at n=64 d=6; formula 2^(d-1)*4-2-d for d in 1..8", [] {
        Stopwatch watch;
        require(quant::make_intervals(64, 6).size() == 120,
                "n=64 d=6 gave " + std::to_string(quant::make_intervals(64, 6).size()));
        for (int d = 1; d <= 8; ++d) {
            for (const std::size_t factor : {1, 2, 3, 4, 8}) {
                const std::size_t n = factor << (d - 1);
                const std::size_t want = (std::size_t{4} << (d - 1)) - 2 - std::size_t(d);
                const auto got = quant::make_intervals(n, d).size();
                require(got == want, "n=" + std::to_string(n) + " d=" + std::to_string(d) +
                                         " gave " + std::to_string(got) + ", want " +
                                         std::to_string(want));
            }
        }
        require(watch.seconds() < 1.0, "took " + num("%.2f", watch.seconds()) + " s, budget 1 s");
        return "";
    });

    criterion(2, "v=1 without mean subtraction reproduces the sorted values (1000 intervals)", [] {
        std::mt19937_64 rng(99);
        std::normal_distribution<double> normal;
        std::uniform_int_distribution<std::size_t> length(1, 256);
        for (int trial = 0; trial < 1000; ++trial) {
            std::vector<double> values(length(rng));
            for (auto& v : values) {
                v = normal(rng);
                if (rng() % 3 == 0) v = std::round(v * 2.0) / 2.0; // force ties
            }
            auto sorted = values;
            std::sort(sorted.begin(), sorted.end());
            const auto got = quant::interval_quantiles(values, 1, quant::MeanPolicy::none);
            require(got == sorted, "mismatch at trial " + std::to_string(trial) + " (length " +
                                       std::to_string(values.size()) + ")");
        }
        return "";
    });

    criterion(3, "quantiles match a brute-force oracle within 1e-12 (10000 cases)", [] {
        std::mt19937_64 rng(7);
        std::normal_distribution<double> normal;
        std::uniform_int_distribution<std::size_t> length(1, 64), divisor(1, 8);
        for (int trial = 0; trial < 10000; ++trial) {
            std::vector<double> values(length(rng));
            for (auto& v : values) {
                v = normal(rng);
                if (rng() % 4 == 0) v = std::round(v * 4.0) / 4.0;
            }
            const std::size_t v = divisor(rng);
            const auto got = quant::interval_quantiles(values, v, quant::MeanPolicy::none);
            const auto want = oracle_quantiles(values, v);
            require(got.size() == want.size(), "count mismatch at trial " + std::to_string(trial));
            for (std::size_t i = 0; i < got.size(); ++i) {
                require(std::abs(got[i] - want[i]) <= 1e-12,
                        "trial " + std::to_string(trial) + " quantile " + std::to_string(i) +
                            ": " + num("%.17g", got[i]) + " vs " + num("%.17g", want[i]));
            }
        }
        return "";
    });

    criterion(4, "DFT magnitude matches the naive oracle within 1e-9 relative (200 series)", [] {
        std::vector<std::size_t> lengths = {2,  3,  5,  7,  11, 13, 17, 19, 23,  29,  31,
                                            37, 41, 43, 47, 53, 59, 61, 67, 71,  73,  79,
                                            83, 89, 97, 101, 103, 107, 109, 113, 127};
        std::mt19937_64 rng(21);
        std::uniform_int_distribution<std::size_t> length(1, 128);
        while (lengths.size() < 200) lengths.push_back(length(rng));
        std::normal_distribution<double> normal;
        for (std::size_t s = 0; s < lengths.size(); ++s) {
            std::vector<double> x(lengths[s]);
            for (auto& v : x) v = normal(rng);
            const auto got = quant::dft_magnitude(x);
            const auto want = naive_dft_magnitude(x);
            require(got.size() == want.size(), "length mismatch at series " + std::to_string(s));
            double scale = 1.0;
            for (const double w : want) scale = std::max(scale, std::abs(w));
            for (std::size_t k = 0; k < got.size(); ++k) {
                require(std::abs(got[k] - want[k]) <= 1e-9 * scale,
                        "series " + std::to_string(s) + " (n=" + std::to_string(x.size()) +
                            ") bin " + std::to_string(k) + ": " + num("%.17g", got[k]) + " vs " +
                            num("%.17g", want[k]));
            }
        }
        return "";
    });

    criterion(5, "scale task N(0,1) vs N(0,1.5^2): mean accuracy >= 0.95 over 10 seeds", [] {
        return synthetic_task(
            [](std::uint64_t seed) { return scale_dataset(250, 128, 1000 + seed); }, 0.95, 30.0);
    });

    criterion(6, "location task (bump at 32 vs 96): mean accuracy >= 0.95 over 10 seeds", [] {
        return synthetic_task(
            [](std::uint64_t seed) { return bump_dataset(250, 128, 32, 96, 2000 + seed); }, 0.95,
            30.0);
    });

    criterion(7, "100% training accuracy on consistent data with defaults", [] {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> uniform(0.0, 1.0);
        quant::FeatureMatrix features(200, 20);
        std::vector<int> labels(200);
        for (std::size_t i = 0; i < 200; ++i) {
            for (std::size_t j = 0; j < 20; ++j) features.at(i, j) = uniform(rng);
            labels[i] = i < 3 ? static_cast<int>(i) : static_cast<int>(rng() % 3);
        }
        quant::TrainConfig config;
        config.master_seed = 5;
        const auto forest = quant::fit_forest(features, labels, 3, config, worker_threads());
        const auto predictions = quant::predict(forest, features, worker_threads());
        std::size_t correct = 0;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (predictions[i] == labels[i]) ++correct;
        }
        require(correct == labels.size(),
                std::to_string(correct) + "/" + std::to_string(labels.size()) + " rows correct");
        return std::to_string(correct) + "/" + std::to_string(labels.size()) + " rows correct";
    });

    criterion(8, "eval results CSV byte-identical at --threads 1 and --threads 8", [&work] {
        const fs::path dir = work / "c8";
        fs::create_directories(dir);
        quant::write_tsv(dir / "train.tsv", scale_dataset(12, 32, 81));
        quant::write_tsv(dir / "test.tsv", scale_dataset(12, 32, 82));
        const std::string base = "eval " + (dir / "train.tsv").string() + " " +
                                 (dir / "test.tsv").string() +
                                 " --resamples 5 --trees 30 --seed 11 --name mini";

        const auto t1 = run_cli(dir, base + " --stable-timings --threads 1 --out " +
                                         (dir / "t1.csv").string());
        const auto t8 = run_cli(dir, base + " --stable-timings --threads 8 --out " +
                                         (dir / "t8.csv").string());
        require_success(t1, "eval --threads 1");
        require_success(t8, "eval --threads 8");
        const auto bytes1 = slurp(dir / "t1.csv");
        require(!bytes1.empty(), "empty results CSV");
        require(bytes1 == slurp(dir / "t8.csv"), "CSV bytes differ between thread counts");

        // without --stable-timings the accuracy column must still agree
        require_success(run_cli(dir, base + " --threads 1 --out " + (dir / "w1.csv").string()),
                        "eval --threads 1 (timed)");
        require_success(run_cli(dir, base + " --threads 8 --out " + (dir / "w8.csv").string()),
                        "eval --threads 8 (timed)");
        const auto w1 = quant::read_results_csv(dir / "w1.csv");
        const auto w8 = quant::read_results_csv(dir / "w8.csv");
        require(w1.size() == w8.size(), "row count differs between thread counts");
        for (std::size_t i = 0; i < w1.size(); ++i) {
            require(w1[i].dataset == w8[i].dataset && w1[i].resample == w8[i].resample &&
                        w1[i].accuracy == w8[i].accuracy,
                    "accuracy differs at row " + std::to_string(i));
        }
        return "5 resamples, " + std::to_string(bytes1.size()) + " CSV bytes";
    });

    criterion(9, "transform of 1000 series of length 512 single-threaded within 2 s", [] {
        const auto transform = quant::fit_transform(512, quant::TransformConfig{});
        std::mt19937_64 rng(3);
        std::normal_distribution<double> normal;
        std::vector<quant::TimeSeries> series;
        series.reserve(1000);
        for (int i = 0; i < 1000; ++i) {
            std::vector<double> values(512);
            for (auto& v : values) v = normal(rng);
            series.emplace_back(std::move(values));
        }
        Stopwatch watch;
        const auto features = quant::apply_transform(transform, series, 1);
        const double elapsed = watch.seconds();
        require(features.rows() == 1000, "wrong row count");
        require(elapsed <= 2.0, "took " + num("%.2f", elapsed) + " s, budget 2 s");
        return "p = " + std::to_string(features.cols()) + ", " + num("%.2f", elapsed) + " s";
    });

    criterion(10, "classifier fit time ratio for v=4 -> v=2 within [1.5, 3.0]", [] {
        const auto train = scale_dataset(250, 128, 77);
        quant::TransformConfig four, two;
        two.divisor = 2;
        const auto features4 =
            quant::apply_transform(quant::fit_transform(128, four), train, worker_threads());
        const auto features2 =
            quant::apply_transform(quant::fit_transform(128, two), train, worker_threads());
        quant::TrainConfig config;
        config.master_seed = 7;

        const auto fit_seconds = [&](const quant::FeatureMatrix& features) {
            Stopwatch watch;
            const auto forest =
                quant::fit_forest(features, train.labels(), train.num_classes(), config, 1);
            require(!forest.trees.empty(), "empty forest");
            return watch.seconds();
        };
        double best4 = 1e30, best2 = 1e30;
        for (int run = 0; run < 3; ++run) {
            best4 = std::min(best4, fit_seconds(features4));
            best2 = std::min(best2, fit_seconds(features2));
        }
        const double ratio = best2 / best4;
        require(ratio >= 1.5 && ratio <= 3.0,
                "ratio " + num("%.2f", ratio) + " outside [1.5, 3.0] (v=4: " +
                    num("%.2f", best4) + " s, v=2: " + num("%.2f", best2) + " s)");
        return "ratio " + num("%.2f", ratio) + " (p " + std::to_string(features4.cols()) +
               " -> " + std::to_string(features2.cols()) + ")";
    });

    criterion(11, "compare reports the exact p-value 0.001953125 on the all-wins fixture",
              [&work] {
                  const fs::path dir = work / "c11";
                  fs::create_directories(dir);
                  std::vector<quant::ResultRow> a, b;
                  for (int i = 0; i < 10; ++i) {
                      quant::ResultRow row;
                      row.dataset = "d" + std::to_string(i);
                      row.accuracy = 0.91;
                      a.push_back(row);
                      row.accuracy = 0.90;
                      b.push_back(row);
                  }
                  quant::write_results_csv(dir / "a.csv", a);
                  quant::write_results_csv(dir / "b.csv", b);
                  const auto result = run_cli(dir, "compare " + (dir / "a.csv").string() + " " +
                                                       (dir / "b.csv").string());
                  require_success(result, "compare");
                  require(result.out.find("(exact, n=10)") != std::string::npos,
                          "expected an exact n=10 report, got: " + result.out);
                  const double p = parse_p_value(result.out);
                  require(std::abs(p - 0.001953125) < 1e-6,
                          "p-value " + num("%.10g", p) + " not within 1e-6 of 0.001953125");
                  return "p = " + num("%.10g", p);
              });

    criterion(12, "eval + compare execute the full 30-resample protocol mechanically", [&work] {
        const fs::path dir = work / "c12";
        fs::create_directories(dir);
        quant::write_tsv(dir / "alpha_TRAIN.tsv", scale_dataset(12, 32, 301));
        quant::write_tsv(dir / "alpha_TEST.tsv", scale_dataset(12, 32, 302));
        quant::write_tsv(dir / "beta_TRAIN.tsv", bump_dataset(12, 64, 16, 48, 303));
        quant::write_tsv(dir / "beta_TEST.tsv", bump_dataset(12, 64, 16, 48, 304));

        const auto evaluate = [&](const std::string& config_flags, const std::string& tag) {
            std::vector<quant::ResultRow> merged;
            for (const std::string name : {"alpha", "beta"}) {
                const fs::path out = dir / (tag + "_" + name + ".csv");
                const auto result = run_cli(
                    dir, "eval " + (dir / (name + "_TRAIN.tsv")).string() + " " +
                             (dir / (name + "_TEST.tsv")).string() +
                             " --resamples 30 --seed 3 --stable-timings --trees 25 --name " +
                             name + " --out " + out.string() + " " + config_flags);
                require_success(result, "eval " + name + " (" + tag + ")");
                const auto rows = quant::read_results_csv(out);
                require(rows.size() == 30, name + " (" + tag + ") produced " +
                                               std::to_string(rows.size()) + " rows, want 30");
                merged.insert(merged.end(), rows.begin(), rows.end());
            }
            const fs::path merged_path = dir / (tag + ".csv");
            quant::write_results_csv(merged_path, merged);
            return merged_path;
        };

        const auto a = evaluate("", "a");
        const auto b = evaluate("--preset fast", "b");
        const auto compare = run_cli(dir, "compare " + a.string() + " " + b.string());
        require_success(compare, "compare");
        require(compare.out.find("datasets: 2") != std::string::npos,
                "compare did not report 2 datasets: " + compare.out);
        require(compare.out.find("wins/draws/losses:") != std::string::npos,
                "no win/draw/loss line: " + compare.out);
        parse_p_value(compare.out); // must be present and numeric
        return "2 datasets x 30 resamples per config";
    });

    fs::remove_all(work);
    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all 12 criteria passed\n");
    return 0;
}
