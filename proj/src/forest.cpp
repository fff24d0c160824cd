#include "quant/forest.hpp"

#include "quant/parallel.hpp"
#include "quant/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace quant {

std::size_t SplitCandidates::count_for(std::size_t num_features) const {
    if (num_features == 0) return 0;
    std::size_t k = 0;
    if (mode == Mode::sqrt_total) {
        k = static_cast<std::size_t>(std::sqrt(static_cast<double>(num_features)));
    } else {
        k = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(num_features)));
    }
    return std::clamp<std::size_t>(k, 1, num_features);
}

void TrainConfig::validate() const {
    if (num_trees < 1) throw std::invalid_argument("num_trees must be >= 1");
    if (features_per_split.mode == SplitCandidates::Mode::fraction &&
        (features_per_split.fraction <= 0.0 || features_per_split.fraction > 1.0)) {
        throw std::invalid_argument("features-per-split fraction must be in (0, 1]");
    }
    if (min_samples_to_split < 2) throw std::invalid_argument("min_samples_to_split must be >= 2");
    if (max_depth < 0) throw std::invalid_argument("max_depth must be >= 0 (0 = unlimited)");
}

double gini(std::span<const std::uint32_t> counts) {
    std::uint64_t total = 0;
    for (const auto c : counts) total += c;
    if (total == 0) throw std::invalid_argument("gini: empty count vector");
    double sum_sq = 0.0;
    for (const auto c : counts) {
        const double f = static_cast<double>(c) / static_cast<double>(total);
        sum_sq += f * f;
    }
    return 1.0 - sum_sq;
}

namespace {

struct TreeBuilder {
    const FeatureMatrix& features;
    std::span<const int> labels;
    std::size_t num_classes;
    const TrainConfig& config;
    std::mt19937_64 rng;

    std::vector<std::uint32_t> sample_order; // permuted in place by splits
    std::vector<std::size_t> feature_pool;   // partial Fisher-Yates source
    std::vector<std::uint32_t> node_counts;
    std::vector<std::uint32_t> left_counts;
    Tree tree;

    struct Work {
        std::int32_t node;
        std::uint32_t lo;
        std::uint32_t hi;
        std::uint32_t depth;
    };

    explicit TreeBuilder(const FeatureMatrix& x, std::span<const int> y, std::size_t c,
                         const TrainConfig& cfg, std::uint64_t seed)
        : features(x), labels(y), num_classes(c), config(cfg), rng(seed) {
        sample_order.resize(x.rows());
        std::iota(sample_order.begin(), sample_order.end(), 0u);
        feature_pool.resize(x.cols());
        std::iota(feature_pool.begin(), feature_pool.end(), std::size_t{0});
        node_counts.resize(c);
        left_counts.resize(c);
    }

    // threshold strictly inside (lo_val, hi_val); false when no double fits
    bool draw_threshold(double lo_val, double hi_val, double& out) {
        const double u = std::uniform_real_distribution<double>{0.0, 1.0}(rng);
        double t = lo_val + u * (hi_val - lo_val);
        if (!(t > lo_val)) t = std::nextafter(lo_val, hi_val);
        if (!(t < hi_val)) t = std::nextafter(hi_val, lo_val);
        if (!(t > lo_val && t < hi_val)) return false;
        out = t;
        return true;
    }

    std::int32_t add_leaf() {
        const auto leaf_index =
            static_cast<std::int32_t>(tree.leaf_counts.size() / num_classes);
        tree.leaf_counts.insert(tree.leaf_counts.end(), node_counts.begin(), node_counts.end());
        return leaf_index;
    }

    void build() {
        tree.nodes.emplace_back();
        std::vector<Work> stack;
        stack.push_back({0, 0, static_cast<std::uint32_t>(features.rows()), 0});

        while (!stack.empty()) {
            const Work w = stack.back();
            stack.pop_back();
            const std::uint32_t n = w.hi - w.lo;

            std::fill(node_counts.begin(), node_counts.end(), 0u);
            for (std::uint32_t i = w.lo; i < w.hi; ++i) {
                ++node_counts[static_cast<std::size_t>(labels[sample_order[i]])];
            }
            const bool pure =
                std::count_if(node_counts.begin(), node_counts.end(),
                              [](std::uint32_t c) { return c > 0; }) <= 1;
            const bool depth_capped =
                config.max_depth > 0 && w.depth >= static_cast<std::uint32_t>(config.max_depth);

            if (pure || n < static_cast<std::uint32_t>(config.min_samples_to_split) ||
                depth_capped) {
                tree.nodes[static_cast<std::size_t>(w.node)].leaf = add_leaf();
                continue;
            }

            const std::size_t num_candidates =
                config.features_per_split.count_for(features.cols());
            bool have_best = false;
            double best_score = 0.0;
            std::size_t best_feature = 0;
            double best_threshold = 0.0;

            for (std::size_t j = 0; j < num_candidates; ++j) {
                const std::size_t swap_with = std::uniform_int_distribution<std::size_t>{
                    j, feature_pool.size() - 1}(rng);
                std::swap(feature_pool[j], feature_pool[swap_with]);
                const std::size_t f = feature_pool[j];

                double lo_val = features.at(sample_order[w.lo], f);
                double hi_val = lo_val;
                for (std::uint32_t i = w.lo + 1; i < w.hi; ++i) {
                    const double v = features.at(sample_order[i], f);
                    lo_val = std::min(lo_val, v);
                    hi_val = std::max(hi_val, v);
                }
                if (!(lo_val < hi_val)) continue; // constant here; no rng used

                double threshold = 0.0;
                if (!draw_threshold(lo_val, hi_val, threshold)) continue;

                std::fill(left_counts.begin(), left_counts.end(), 0u);
                std::uint32_t n_left = 0;
                for (std::uint32_t i = w.lo; i < w.hi; ++i) {
                    const auto row = sample_order[i];
                    if (features.at(row, f) <= threshold) {
                        ++left_counts[static_cast<std::size_t>(labels[row])];
                        ++n_left;
                    }
                }
                const std::uint32_t n_right = n - n_left;

                double left_sq = 0.0, right_sq = 0.0;
                for (std::size_t c = 0; c < num_classes; ++c) {
                    const double l = static_cast<double>(left_counts[c]);
                    const double r = static_cast<double>(node_counts[c] - left_counts[c]);
                    left_sq += l * l;
                    right_sq += r * r;
                }
                const double gini_left =
                    static_cast<double>(n_left) - left_sq / static_cast<double>(n_left);
                const double gini_right =
                    static_cast<double>(n_right) - right_sq / static_cast<double>(n_right);
                const double score = (gini_left + gini_right) / static_cast<double>(n);

                const bool better =
                    !have_best || score < best_score ||
                    (score == best_score &&
                     (f < best_feature || (f == best_feature && threshold < best_threshold)));
                if (better) {
                    have_best = true;
                    best_score = score;
                    best_feature = f;
                    best_threshold = threshold;
                }
            }

            if (!have_best) {
                // every candidate was constant on this node
                tree.nodes[static_cast<std::size_t>(w.node)].leaf = add_leaf();
                continue;
            }

            const auto mid_it = std::partition(
                sample_order.begin() + w.lo, sample_order.begin() + w.hi,
                [&](std::uint32_t row) {
                    return features.at(row, best_feature) <= best_threshold;
                });
            const auto mid =
                static_cast<std::uint32_t>(mid_it - sample_order.begin());

            const auto left_id = static_cast<std::int32_t>(tree.nodes.size());
            tree.nodes.emplace_back();
            const auto right_id = static_cast<std::int32_t>(tree.nodes.size());
            tree.nodes.emplace_back();

            auto& node = tree.nodes[static_cast<std::size_t>(w.node)];
            node.feature = static_cast<std::int32_t>(best_feature);
            node.threshold = best_threshold;
            node.left = left_id;
            node.right = right_id;

            stack.push_back({right_id, mid, w.hi, w.depth + 1});
            stack.push_back({left_id, w.lo, mid, w.depth + 1});
        }
    }
};

const std::uint32_t* tree_leaf_for(const Tree& tree, std::span<const double> row,
                                   std::size_t num_classes) {
    std::size_t node = 0;
    while (!tree.nodes[node].is_leaf()) {
        const auto& n = tree.nodes[node];
        node = static_cast<std::size_t>(
            row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
    }
    return tree.leaf_counts.data() +
           static_cast<std::size_t>(tree.nodes[node].leaf) * num_classes;
}

} // namespace

Tree fit_tree(const FeatureMatrix& features, std::span<const int> labels,
              std::size_t num_classes, const TrainConfig& config, std::uint64_t stream_seed) {
    config.validate();
    if (features.rows() == 0) throw std::invalid_argument("cannot train on an empty dataset");
    if (features.cols() == 0) throw std::invalid_argument("cannot train with zero features");
    if (labels.size() != features.rows()) {
        throw std::invalid_argument("label count does not match feature rows");
    }
    if (num_classes == 0) throw std::invalid_argument("num_classes must be >= 1");
    for (const int y : labels) {
        if (y < 0 || static_cast<std::size_t>(y) >= num_classes) {
            throw std::invalid_argument("class id " + std::to_string(y) + " out of range [0, " +
                                        std::to_string(num_classes) + ")");
        }
    }

    TreeBuilder builder(features, labels, num_classes, config, stream_seed);
    builder.build();
    return std::move(builder.tree);
}

Forest fit_forest(const FeatureMatrix& features, std::span<const int> labels,
                  std::size_t num_classes, const TrainConfig& config, int threads) {
    config.validate();
    Forest forest;
    forest.num_classes = num_classes;
    forest.num_features = features.cols();
    forest.config = config;
    forest.trees.resize(static_cast<std::size_t>(config.num_trees));
    parallel_for(forest.trees.size(), threads, [&](std::size_t t) {
        forest.trees[t] = fit_tree(features, labels, num_classes, config,
                                   derive_stream(config.master_seed, t));
    });
    return forest;
}

std::vector<double> predict_proba(const Forest& forest, const FeatureMatrix& features,
                                  int threads) {
    if (features.cols() != forest.num_features) {
        throw std::invalid_argument("feature matrix has " + std::to_string(features.cols()) +
                                    " columns, forest expects " +
                                    std::to_string(forest.num_features));
    }
    const std::size_t c = forest.num_classes;
    std::vector<double> proba(features.rows() * c, 0.0);
    parallel_for(features.rows(), threads, [&](std::size_t i) {
        const auto row = features.row(i);
        double* out = proba.data() + i * c;
        for (const auto& tree : forest.trees) {
            const std::uint32_t* counts = tree_leaf_for(tree, row, c);
            std::uint64_t total = 0;
            for (std::size_t j = 0; j < c; ++j) total += counts[j];
            for (std::size_t j = 0; j < c; ++j) {
                out[j] += static_cast<double>(counts[j]) / static_cast<double>(total);
            }
        }
        const double inv = 1.0 / static_cast<double>(forest.trees.size());
        for (std::size_t j = 0; j < c; ++j) out[j] *= inv;
    });
    return proba;
}

std::vector<int> predict(const Forest& forest, const FeatureMatrix& features, int threads) {
    const auto proba = predict_proba(forest, features, threads);
    const std::size_t c = forest.num_classes;
    std::vector<int> labels(features.rows());
    for (std::size_t i = 0; i < features.rows(); ++i) {
        const double* row = proba.data() + i * c;
        std::size_t best = 0;
        for (std::size_t j = 1; j < c; ++j) {
            if (row[j] > row[best]) best = j; // ties keep the lowest id
        }
        labels[i] = static_cast<int>(best);
    }
    return labels;
}

} // namespace quant
