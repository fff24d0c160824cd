#pragma once

#include "quant/feature_matrix.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace quant {

/// Candidate features examined at each split: a linear fraction of the total
/// (the default, 10%), or sqrt(p) for comparison runs.
struct SplitCandidates {
    enum class Mode : std::uint8_t { fraction = 0, sqrt_total = 1 };
    Mode mode = Mode::fraction;
    double fraction = 0.10;

    std::size_t count_for(std::size_t num_features) const;

    friend bool operator==(const SplitCandidates&, const SplitCandidates&) = default;
};

struct TrainConfig {
    int num_trees = 200;
    SplitCandidates features_per_split;
    int min_samples_to_split = 2;
    int max_depth = 0; // 0 = unlimited
    std::uint64_t master_seed = 0;

    void validate() const;

    friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// One extremely randomised tree, stored as flat arrays. Internal nodes have
/// feature >= 0 and children; leaves reference a row of class counts.
struct Tree {
    struct Node {
        std::int32_t feature = -1;
        double threshold = 0.0;
        std::int32_t left = -1;
        std::int32_t right = -1;
        std::int32_t leaf = -1;

        bool is_leaf() const noexcept { return feature < 0; }
        friend bool operator==(const Node&, const Node&) = default;
    };

    std::vector<Node> nodes;                 // nodes[0] is the root
    std::vector<std::uint32_t> leaf_counts;  // leaf l spans [l*C, (l+1)*C)

    friend bool operator==(const Tree&, const Tree&) = default;
};

struct Forest {
    std::vector<Tree> trees;
    std::size_t num_classes = 0;
    std::size_t num_features = 0;
    TrainConfig config;
};

/// Gini impurity 1 - sum_c (n_c/N)^2 of a class-count vector; total must be
/// >= 1.
double gini(std::span<const std::uint32_t> counts);

/// Grow one tree on the full training set (no bagging). Each node draws its
/// candidate features without replacement and one uniform threshold in the
/// open (min, max) of each non-constant candidate; the split minimising
/// weighted Gini wins, ties broken by lowest feature index then lowest
/// threshold. stream_seed fixes the tree's private random stream.
Tree fit_tree(const FeatureMatrix& features, std::span<const int> labels,
              std::size_t num_classes, const TrainConfig& config, std::uint64_t stream_seed);

/// Train config.num_trees trees, tree t on stream derive_stream(master_seed, t).
/// Output is bit-identical for a fixed seed regardless of thread count.
Forest fit_forest(const FeatureMatrix& features, std::span<const int> labels,
                  std::size_t num_classes, const TrainConfig& config, int threads = 1);

/// Row-major q x C matrix; row i is the average over trees of the normalised
/// leaf class counts reached by example i. Rows sum to 1.
std::vector<double> predict_proba(const Forest& forest, const FeatureMatrix& features,
                                  int threads = 1);

/// Argmax of predict_proba per row; ties resolve to the lowest class id.
std::vector<int> predict(const Forest& forest, const FeatureMatrix& features, int threads = 1);

} // namespace quant
