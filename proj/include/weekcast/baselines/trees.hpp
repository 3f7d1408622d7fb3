#pragma once

#include "weekcast/baselines/labeled.hpp"
#include "weekcast/random.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace weekcast::baselines {

struct CartConfig {
    std::size_t max_depth = 6;
    std::size_t min_leaf = 5;
    /// Features examined per split; 0 means all of them.
    std::size_t features_per_split = 0;
};

/// Internal nodes route `x[feature] <= threshold` left; leaves have feature -1.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    double value = 0.0;  // majority class or mean target
    int left = -1;
    int right = -1;
    std::size_t samples = 0;

    bool is_leaf() const { return feature < 0; }
};

struct DecisionTree {
    TaskMode mode = TaskMode::classify;
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    double predict(std::span<const double> x) const;
    std::size_t depth() const;
    std::size_t leaf_count() const;
};

/// Greedy CART: Gini impurity for classification, squared-error reduction for
/// regression; thresholds at midpoints between sorted distinct values; ties
/// prefer the lowest feature index, then the lowest threshold. A node becomes
/// a leaf when pure, at max_depth, or when no split leaves min_leaf samples on
/// both sides. `weights` (classification only) are per-sample; `rng` is
/// required when features_per_split > 0.
DecisionTree fit_cart(const LabeledDataset& data, const CartConfig& config = {},
                      std::span<const double> weights = {}, Rng* rng = nullptr);

enum class EnsembleKind { bagging, random_forest, adaboost };

struct EnsembleModel {
    EnsembleKind kind = EnsembleKind::bagging;
    TaskMode mode = TaskMode::classify;
    std::vector<DecisionTree> members;
    std::vector<double> weights;  // vote weights; 1 for bagging and forests
    std::vector<std::uint64_t> seeds;

    /// Majority (or weighted) vote with ties to class 0, or mean for regression.
    double predict(std::span<const double> x) const;
};

struct EnsembleConfig {
    std::size_t n_models = 100;
    bool bootstrap = true;
    CartConfig tree;
    std::uint64_t seed = 0;
};

/// Bagging or random forest. Forests examine floor(sqrt(features)) randomly
/// drawn features at each split. Members are fitted in parallel from
/// independent seeded generators.
EnsembleModel fit_ensemble(const LabeledDataset& data, EnsembleKind kind, const EnsembleConfig& config = {});

struct AdaBoostConfig {
    std::size_t rounds = 100;
};

/// Discrete AdaBoost over depth-1 stumps. Throws DataError when the first
/// stump's weighted error is already >= 0.5.
EnsembleModel fit_adaboost(const LabeledDataset& data, const AdaBoostConfig& config = {});

nlohmann::json to_json(const DecisionTree& tree);
nlohmann::json to_json(const EnsembleModel& model);

} // namespace weekcast::baselines
