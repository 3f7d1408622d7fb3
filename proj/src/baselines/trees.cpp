#include "weekcast/baselines/trees.hpp"

#include "weekcast/error.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <stdexcept>

namespace weekcast::baselines {

double DecisionTree::predict(std::span<const double> x) const {
    int i = 0;
    while (!nodes[static_cast<std::size_t>(i)].is_leaf()) {
        const auto& n = nodes[static_cast<std::size_t>(i)];
        i = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(i)].value;
}

std::size_t DecisionTree::depth() const {
    std::vector<std::size_t> d(nodes.size(), 0);
    std::size_t best = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        best = std::max(best, d[i]);
        if (!nodes[i].is_leaf()) {
            d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
            d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
        }
    }
    return best;
}

std::size_t DecisionTree::leaf_count() const {
    return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

namespace {

struct Split {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

class CartBuilder {
public:
    CartBuilder(const LabeledDataset& data, const CartConfig& config, std::span<const double> weights, Rng* rng)
        : data_(data), config_(config), rng_(rng), weights_(data.size(), 1.0) {
        if (!weights.empty()) {
            if (weights.size() != data.size()) throw std::invalid_argument("cart: weight count mismatch");
            std::copy(weights.begin(), weights.end(), weights_.begin());
        }
        if (config.features_per_split > 0 && rng == nullptr) {
            throw std::invalid_argument("cart: feature subsampling needs a generator");
        }
    }

    DecisionTree build() {
        tree_.mode = data_.mode;
        std::vector<std::size_t> idx(data_.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        grow(std::move(idx), 0);
        return std::move(tree_);
    }

private:
    double leaf_value(const std::vector<std::size_t>& idx) const {
        if (data_.mode == TaskMode::classify) {
            double w1 = 0.0, w0 = 0.0;
            for (auto i : idx) (data_.label(i) ? w1 : w0) += weights_[i];
            return w1 > w0 ? 1.0 : 0.0;
        }
        double sum = 0.0, w = 0.0;
        for (auto i : idx) {
            sum += weights_[i] * data_.targets[i];
            w += weights_[i];
        }
        return sum / w;
    }

    bool is_pure(const std::vector<std::size_t>& idx) const {
        const double first = data_.targets[idx.front()];
        return std::all_of(idx.begin(), idx.end(), [&](std::size_t i) { return data_.targets[i] == first; });
    }

    // Impurity scaled by node weight: weighted Gini * W, or sum of squared
    // deviations for regression.
    struct Acc {
        double w = 0.0, w1 = 0.0, sum = 0.0, sumsq = 0.0;

        void add(double weight, double y, bool positive) {
            w += weight;
            if (positive) w1 += weight;
            sum += weight * y;
            sumsq += weight * y * y;
        }
        void remove(double weight, double y, bool positive) {
            w -= weight;
            if (positive) w1 -= weight;
            sum -= weight * y;
            sumsq -= weight * y * y;
        }
        double impurity(TaskMode mode) const {
            if (w <= 0.0) return 0.0;
            if (mode == TaskMode::classify) {
                const double p = w1 / w;
                return w * (1.0 - p * p - (1.0 - p) * (1.0 - p));
            }
            return std::max(0.0, sumsq - sum * sum / w);
        }
    };

    std::vector<std::size_t> candidate_features() {
        const std::size_t d = data_.features.cols;
        std::vector<std::size_t> f(d);
        std::iota(f.begin(), f.end(), std::size_t{0});
        const std::size_t m = config_.features_per_split;
        if (m == 0 || m >= d) return f;
        for (std::size_t i = 0; i < m; ++i) std::swap(f[i], f[i + rng_->below(d - i)]);
        f.resize(m);
        std::sort(f.begin(), f.end());
        return f;
    }

    Split best_split(const std::vector<std::size_t>& idx) {
        Acc total;
        for (auto i : idx) total.add(weights_[i], data_.targets[i], data_.label(i) == 1);
        const double parent = total.impurity(data_.mode);

        Split best;
        std::vector<std::size_t> order = idx;
        for (std::size_t f : candidate_features()) {
            const auto value = [&](std::size_t i) { return data_.features.at(i, f); };
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return value(a) < value(b) || (value(a) == value(b) && a < b);
            });
            Acc left;
            Acc right = total;
            for (std::size_t pos = 0; pos + 1 < order.size(); ++pos) {
                const std::size_t i = order[pos];
                left.add(weights_[i], data_.targets[i], data_.label(i) == 1);
                right.remove(weights_[i], data_.targets[i], data_.label(i) == 1);
                const double lo = value(i);
                const double hi = value(order[pos + 1]);
                if (lo == hi) continue;
                const std::size_t n_left = pos + 1;
                if (n_left < config_.min_leaf || order.size() - n_left < config_.min_leaf) continue;
                const double gain = parent - left.impurity(data_.mode) - right.impurity(data_.mode);
                if (gain > best.gain) {
                    double mid = lo + (hi - lo) / 2.0;
                    if (!(mid < hi)) mid = lo;
                    best = {static_cast<int>(f), mid, gain};
                }
            }
        }
        // Guard against splits that only shave rounding noise off the impurity.
        if (best.gain <= 1e-12 * std::max(parent, 1e-300)) best.feature = -1;
        return best;
    }

    int grow(std::vector<std::size_t> idx, std::size_t depth) {
        const int id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.push_back({});
        tree_.nodes.back().value = leaf_value(idx);
        tree_.nodes.back().samples = idx.size();
        const std::size_t min_leaf = std::max<std::size_t>(config_.min_leaf, 1);
        if (depth >= config_.max_depth || is_pure(idx) || idx.size() < 2 * min_leaf) return id;
        const Split s = best_split(idx);
        if (s.feature < 0) return id;

        std::vector<std::size_t> left, right;
        for (auto i : idx) (data_.features.at(i, static_cast<std::size_t>(s.feature)) <= s.threshold ? left : right).push_back(i);
        idx.clear();
        idx.shrink_to_fit();
        const int l = grow(std::move(left), depth + 1);
        const int r = grow(std::move(right), depth + 1);
        auto& node = tree_.nodes[static_cast<std::size_t>(id)];
        node.feature = s.feature;
        node.threshold = s.threshold;
        node.left = l;
        node.right = r;
        return id;
    }

    const LabeledDataset& data_;
    CartConfig config_;
    Rng* rng_;
    std::vector<double> weights_;
    DecisionTree tree_;
};

} // namespace

DecisionTree fit_cart(const LabeledDataset& data, const CartConfig& config, std::span<const double> weights, Rng* rng) {
    if (data.size() == 0) throw std::invalid_argument("cart: empty dataset");
    return CartBuilder(data, config, weights, rng).build();
}

double EnsembleModel::predict(std::span<const double> x) const {
    if (mode == TaskMode::regress) {
        double sum = 0.0;
        for (const auto& m : members) sum += m.predict(x);
        return sum / static_cast<double>(members.size());
    }
    double vote1 = 0.0, vote0 = 0.0;
    for (std::size_t i = 0; i < members.size(); ++i) (members[i].predict(x) > 0.5 ? vote1 : vote0) += weights[i];
    return vote1 > vote0 ? 1.0 : 0.0;
}

EnsembleModel fit_ensemble(const LabeledDataset& data, EnsembleKind kind, const EnsembleConfig& config) {
    if (data.size() == 0) throw std::invalid_argument("ensemble: empty dataset");
    if (config.n_models == 0) throw std::invalid_argument("ensemble: n_models must be positive");
    if (kind == EnsembleKind::adaboost) throw std::invalid_argument("use fit_adaboost for boosting");

    EnsembleModel model;
    model.kind = kind;
    model.mode = data.mode;
    model.members.resize(config.n_models);
    model.weights.assign(config.n_models, 1.0);
    model.seeds.resize(config.n_models);

    CartConfig tree = config.tree;
    if (kind == EnsembleKind::random_forest) {
        tree.features_per_split = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(data.features.cols)))));
    }

    std::exception_ptr failure;
    const auto n_models = static_cast<std::int64_t>(config.n_models);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t mi = 0; mi < n_models; ++mi) {
        try {
            const auto m = static_cast<std::size_t>(mi);
            const std::uint64_t seed = mix_seed(config.seed, m);
            Rng rng(seed);
            const std::size_t n = data.size();
            std::vector<double> counts(n, 1.0);
            if (config.bootstrap) {
                std::fill(counts.begin(), counts.end(), 0.0);
                for (std::size_t i = 0; i < n; ++i) counts[rng.below(n)] += 1.0;
            }
            // A bootstrap replicate is materialised so unweighted split rules
            // (min_leaf counts) see duplicated rows.
            LabeledDataset sample;
            sample.mode = data.mode;
            sample.features = Matrix(0, data.features.cols);
            for (std::size_t i = 0; i < n; ++i) {
                for (int c = 0; c < static_cast<int>(counts[i]); ++c) {
                    const auto row = data.features.row(i);
                    sample.features.data.insert(sample.features.data.end(), row.begin(), row.end());
                    sample.targets.push_back(data.targets[i]);
                }
            }
            sample.features.rows = sample.targets.size();
            model.members[m] = fit_cart(sample, tree, {}, &rng);
            model.seeds[m] = seed;
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return model;
}

EnsembleModel fit_adaboost(const LabeledDataset& data, const AdaBoostConfig& config) {
    if (data.mode != TaskMode::classify) throw std::invalid_argument("adaboost is classification only");
    if (data.size() == 0) throw std::invalid_argument("adaboost: empty dataset");
    const std::size_t n = data.size();
    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    const CartConfig stump{1, 1, 0};

    EnsembleModel model;
    model.kind = EnsembleKind::adaboost;
    model.mode = TaskMode::classify;
    for (std::size_t round = 0; round < config.rounds; ++round) {
        DecisionTree tree = fit_cart(data, stump, w);
        std::vector<bool> wrong(n);
        double err = 0.0, total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            wrong[i] = (tree.predict(data.features.row(i)) > 0.5 ? 1 : 0) != data.label(i);
            if (wrong[i]) err += w[i];
            total += w[i];
        }
        err /= total;
        if (err >= 0.5) {
            if (round == 0) throw DataError("adaboost: first stump is no better than chance (weighted error " + std::to_string(err) + ")");
            break;
        }
        const double clamped = std::max(err, 1e-10);
        const double alpha = std::log((1.0 - clamped) / clamped);
        model.members.push_back(std::move(tree));
        model.weights.push_back(alpha);
        model.seeds.push_back(round);
        if (err == 0.0) break;
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (wrong[i]) w[i] *= std::exp(alpha);
            norm += w[i];
        }
        for (auto& v : w) v /= norm;
    }
    return model;
}

nlohmann::json to_json(const DecisionTree& tree) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : tree.nodes) {
        if (n.is_leaf()) {
            nodes.push_back({{"leaf", true}, {"value", n.value}, {"samples", n.samples}});
        } else {
            nodes.push_back({{"leaf", false},
                             {"feature", n.feature},
                             {"threshold", n.threshold},
                             {"left", n.left},
                             {"right", n.right},
                             {"samples", n.samples}});
        }
    }
    return {{"mode", tree.mode == TaskMode::classify ? "classify" : "regress"}, {"depth", tree.depth()}, {"nodes", nodes}};
}

nlohmann::json to_json(const EnsembleModel& model) {
    const char* kind = model.kind == EnsembleKind::bagging ? "bagging"
                       : model.kind == EnsembleKind::random_forest ? "random_forest"
                                                                    : "adaboost";
    nlohmann::json out = {{"type", kind},
                          {"mode", model.mode == TaskMode::classify ? "classify" : "regress"},
                          {"members", model.members.size()},
                          {"weights", model.weights},
                          {"seeds", model.seeds}};
    std::vector<std::size_t> depths;
    for (const auto& m : model.members) depths.push_back(m.depth());
    out["member_depths"] = depths;
    return out;
}

} // namespace weekcast::baselines
