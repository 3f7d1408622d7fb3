#include "doctest.h"

#include "support/generators.hpp"
#include "weekcast/baselines/ann.hpp"
#include "weekcast/baselines/knn.hpp"
#include "weekcast/baselines/labeled.hpp"
#include "weekcast/baselines/linear_models.hpp"
#include "weekcast/baselines/trees.hpp"
#include "weekcast/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace weekcast;
using namespace weekcast::baselines;

namespace {

LabeledDataset make(std::size_t cols, std::vector<double> x, std::vector<double> y, TaskMode mode) {
    LabeledDataset d;
    d.mode = mode;
    d.features.rows = y.size();
    d.features.cols = cols;
    d.features.data = std::move(x);
    d.targets = std::move(y);
    return d;
}

LabeledDataset make_random(Rng& rng, std::size_t n, std::size_t d, TaskMode mode) {
    std::vector<double> x(n * d), y(n);
    for (auto& v : x) v = std::round(rng.normal() * 4.0) / 4.0;  // coarse grid: ties happen
    for (std::size_t i = 0; i < n; ++i) {
        const double s = x[i * d] - 0.5 * x[i * d + (d > 1 ? 1 : 0)] + 0.3 * rng.normal();
        y[i] = mode == TaskMode::classify ? (s > 0 ? 1.0 : 0.0) : s;
    }
    return make(d, std::move(x), std::move(y), mode);
}

double accuracy(const LabeledDataset& d, const auto& predict) {
    std::size_t hit = 0;
    for (std::size_t i = 0; i < d.size(); ++i) hit += (predict(d.features.row(i)) > 0.5 ? 1 : 0) == d.label(i);
    return 100.0 * static_cast<double>(hit) / static_cast<double>(d.size());
}

FeatureRow row_with_close(double close_perc) {
    FeatureRow r;
    r.date = testing::day(2015, 1, 5);
    r.calendar = {1, 5, 1};
    r.percent.close_perc = close_perc;
    return r;
}

// Brute-force neighbour scan: every distance, stable sort on (distance, index).
double knn_oracle(const LabeledDataset& train, std::span<const double> q, std::size_t k) {
    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t i = 0; i < train.size(); ++i) {
        double d = 0.0;
        for (std::size_t j = 0; j < q.size(); ++j) d += (train.features.at(i, j) - q[j]) * (train.features.at(i, j) - q[j]);
        all.emplace_back(d, i);
    }
    std::sort(all.begin(), all.end());
    if (train.mode == TaskMode::regress) {
        double s = 0.0;
        for (std::size_t i = 0; i < k; ++i) s += train.targets[all[i].second];
        return s / static_cast<double>(k);
    }
    std::size_t ones = 0;
    for (std::size_t i = 0; i < k; ++i) ones += train.label(all[i].second);
    return 2 * ones > k ? 1.0 : 0.0;
}

void check_tree_structure(const DecisionTree& t, std::size_t max_depth) {
    CHECK(t.depth() <= max_depth);
    std::vector<int> parents(t.nodes.size(), 0);
    for (const auto& n : t.nodes) {
        if (n.is_leaf()) {
            CHECK(n.left == -1);
            CHECK(n.right == -1);
        } else {
            REQUIRE(n.left > 0);
            REQUIRE(n.right > 0);
            ++parents[static_cast<std::size_t>(n.left)];
            ++parents[static_cast<std::size_t>(n.right)];
        }
    }
    CHECK(parents[0] == 0);
    for (std::size_t i = 1; i < parents.size(); ++i) CHECK(parents[i] == 1);
}

} // namespace

TEST_SUITE("baseline_models") {

TEST_CASE("labeled dataset framing") {
    FeatureTable t{row_with_close(1.0), row_with_close(-0.5)};
    auto d = build_labeled_dataset(t, TaskMode::classify);
    REQUIRE(d.size() == 1);
    CHECK(d.label(0) == 0);
    CHECK(d.features.at(0, 3) == 1.0);

    t = {row_with_close(1.0), row_with_close(0.0)};
    CHECK(build_labeled_dataset(t, TaskMode::classify).label(0) == 0);
    t = {row_with_close(-1.0), row_with_close(1e-9)};
    CHECK(build_labeled_dataset(t, TaskMode::classify).label(0) == 1);

    Rng rng(2);
    const auto table = testing::random_feature_table(rng, 37);
    d = build_labeled_dataset(table, TaskMode::regress);
    CHECK(d.size() == 36);
    CHECK(d.features.cols == 9);
    for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(d.targets[i] == table[i + 1].percent.close_perc);
        for (std::size_t j = 0; j < 9; ++j) CHECK(d.features.at(i, j) == table[i].value(kAllFeatures[j]));
    }
    CHECK_THROWS_AS(build_labeled_dataset(FeatureTable{row_with_close(1.0)}, TaskMode::classify), DataError);
}

TEST_CASE("column scaler") {
    const auto d = make(2, {1, 5, 3, 5, 5, 5}, {0, 1, 0}, TaskMode::classify);
    const auto s = ColumnScaler::fit(d.features);
    const auto z = s.apply(d.features);
    CHECK(z.at(0, 0) == doctest::Approx(-std::sqrt(1.5)));
    CHECK(z.at(0, 1) == 0.0);  // constant column is centred only
    CHECK(s.columns()[1].sd == 1.0);
}

TEST_CASE("logistic regression") {
    LogisticModel zero;
    zero.weights = {0.0, 0.0};
    const std::vector<double> q{3.0, -7.0};
    CHECK(predict_logistic(zero, q).probability == 0.5);
    CHECK(predict_logistic(zero, q, 0.5).label == 1);

    Rng rng(1);
    std::vector<double> x, y;
    for (int i = 0; i < 60; ++i) {
        const double a = rng.normal(), b = rng.normal();
        const double side = a + b > 0 ? 1.0 : -1.0;
        x.push_back(a + 0.5 * side);
        x.push_back(b + 0.5 * side);
        y.push_back(side > 0 ? 1.0 : 0.0);
    }
    const auto d = make(2, x, y, TaskMode::classify);
    const auto m = fit_logistic_regression(d, {0.5, 3000});
    CHECK(accuracy(d, [&](auto r) { return static_cast<double>(predict_logistic(m, r).label); }) == 100.0);
    CHECK(fit_logistic_regression(d, {0.5, 3000}).weights == m.weights);

    // Scaling features by c and weights by 1/c leaves classes unchanged.
    for (double c : {0.1, 3.0, 250.0}) {
        LogisticModel scaled_model = m;
        for (auto& w : scaled_model.weights) w /= c;
        for (std::size_t i = 0; i < d.size(); ++i) {
            std::vector<double> r(d.features.row(i).begin(), d.features.row(i).end());
            const int before = predict_logistic(m, r).label;
            for (auto& v : r) v *= c;
            CHECK(predict_logistic(scaled_model, r).label == before);
        }
    }
}

TEST_CASE("knn") {
    const auto d = make(1, {0, 1, 2, 3}, {5, 6, 7, 8}, TaskMode::regress);
    const std::vector<double> q{2.0};
    CHECK(knn_predict(d, q, 1) == 7.0);
    CHECK(knn_predict(d, q, 4) == 6.5);
    // Equidistant neighbours: the lower index wins.
    const std::vector<double> mid{1.5};
    CHECK(knn_predict(d, mid, 1) == 6.0);
    CHECK_THROWS_AS(knn_predict(make(1, {}, {}, TaskMode::regress), q, 1), std::invalid_argument);
    CHECK_THROWS_AS(knn_predict(d, q, 5), std::invalid_argument);

    const auto tie = make(1, {0, 1}, {1, 0}, TaskMode::classify);
    const std::vector<double> half{0.5};
    CHECK(knn_predict(tie, half, 2) == 0.0);
}

TEST_CASE("property: knn equals a brute-force scan") {
    Rng rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        const auto mode = trial % 2 ? TaskMode::classify : TaskMode::regress;
        const auto d = make_random(rng, 20, 1 + rng.below(3), mode);
        const std::size_t k = 1 + rng.below(20);
        std::vector<double> q(d.features.cols);
        for (auto& v : q) v = std::round(rng.normal() * 4.0) / 4.0;
        CHECK(knn_predict(d, q, k) == knn_oracle(d, q, k));
    }
}

TEST_CASE("cart basics") {
    const auto pure = make(1, {1, 2, 3, 4}, {1, 1, 1, 1}, TaskMode::classify);
    auto t = fit_cart(pure);
    CHECK(t.nodes.size() == 1);
    CHECK(t.nodes[0].value == 1.0);

    const auto sep = make(1, {-3, -2, -1, -0.5, 0.5, 1, 2, 3, 4, 5}, {0, 0, 0, 0, 1, 1, 1, 1, 1, 1}, TaskMode::classify);
    t = fit_cart(sep, {6, 1, 0});
    CHECK(t.nodes.size() == 3);
    CHECK(t.nodes[0].feature == 0);
    CHECK(t.nodes[0].threshold == 0.0);
    CHECK(accuracy(sep, [&](auto r) { return t.predict(r); }) == 100.0);

    t = fit_cart(sep, {0, 1, 0});
    CHECK(t.nodes.size() == 1);
    CHECK(t.nodes[0].value == 1.0);
    const auto reg = make(1, {1, 2, 3}, {1, 2, 6}, TaskMode::regress);
    CHECK(fit_cart(reg, {0, 1, 0}).nodes[0].value == 3.0);

    // min_leaf: no split may leave fewer samples on a side.
    t = fit_cart(sep, {6, 5, 0});
    for (const auto& n : t.nodes) CHECK(n.samples >= 5);
}

TEST_CASE("property: cart split equals an exhaustive search on one feature") {
    Rng rng(12);
    for (int trial = 0; trial < 60; ++trial) {
        const auto d = make_random(rng, 8 + rng.below(20), 1, TaskMode::classify);
        const auto t = fit_cart(d, {1, 1, 0});
        // Oracle: every threshold between distinct sorted values, weighted Gini.
        std::vector<double> xs(d.features.data);
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        const auto gini = [](double n1, double n) { return n == 0 ? 0.0 : n * (1 - (n1 / n) * (n1 / n) - (1 - n1 / n) * (1 - n1 / n)); };
        double n1 = 0;
        for (std::size_t i = 0; i < d.size(); ++i) n1 += d.label(i);
        const double parent = gini(n1, static_cast<double>(d.size()));
        const auto gain_at = [&](double thr) {
            double l = 0, l1 = 0;
            for (std::size_t s = 0; s < d.size(); ++s)
                if (d.features.data[s] <= thr) {
                    ++l;
                    l1 += d.label(s);
                }
            return parent - gini(l1, l) - gini(n1 - l1, static_cast<double>(d.size()) - l);
        };
        double best = 0.0;
        for (std::size_t i = 0; i + 1 < xs.size(); ++i) best = std::max(best, gain_at(xs[i] + (xs[i + 1] - xs[i]) / 2.0));
        if (best <= 1e-9 * std::max(parent, 1.0)) {
            CHECK(t.nodes.size() == 1);
        } else {
            // Ties between equally good thresholds may resolve either way.
            REQUIRE(t.nodes.size() == 3);
            CHECK(gain_at(t.nodes[0].threshold) == doctest::Approx(best).epsilon(1e-9));
        }
    }
}

TEST_CASE("property: cart structure and monotone-transform invariance") {
    Rng rng(13);
    for (int trial = 0; trial < 30; ++trial) {
        const auto mode = trial % 2 ? TaskMode::classify : TaskMode::regress;
        auto d = make_random(rng, 40 + rng.below(40), 3, mode);
        const CartConfig cfg{1 + rng.below(6), 1 + rng.below(4), 0};
        const auto t = fit_cart(d, cfg);
        check_tree_structure(t, cfg.max_depth);

        LabeledDataset warped = d;
        const std::size_t col = rng.below(3);
        for (std::size_t i = 0; i < warped.size(); ++i) {
            double& v = warped.features.at(i, col);
            v = std::exp(v) * 3.0 + 1.0;
        }
        const auto tw = fit_cart(warped, cfg);
        for (std::size_t i = 0; i < d.size(); ++i) CHECK(t.predict(d.features.row(i)) == tw.predict(warped.features.row(i)));
    }
}

TEST_CASE("ensembles") {
    Rng rng(21);
    const auto d = make_random(rng, 60, 9, TaskMode::classify);
    EnsembleConfig one;
    one.n_models = 1;
    one.bootstrap = false;
    const auto bag = fit_ensemble(d, EnsembleKind::bagging, one);
    const auto tree = fit_cart(d, one.tree);
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(bag.predict(d.features.row(i)) == tree.predict(d.features.row(i)));

    const auto forest = fit_ensemble(d, EnsembleKind::random_forest, one);
    CartConfig restricted = one.tree;
    restricted.features_per_split = 3;
    Rng member(mix_seed(one.seed, 0));
    const auto rtree = fit_cart(d, restricted, {}, &member);
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(forest.predict(d.features.row(i)) == rtree.predict(d.features.row(i)));

    EnsembleConfig cfg;
    cfg.n_models = 15;
    cfg.seed = 4;
    for (auto kind : {EnsembleKind::bagging, EnsembleKind::random_forest}) {
        const auto a = fit_ensemble(d, kind, cfg);
        const auto b = fit_ensemble(d, kind, cfg);
        CHECK(a.members.size() == 15);
        CHECK(a.seeds == b.seeds);
        CHECK(to_json(a) == to_json(b));
        for (std::size_t m = 0; m < 15; ++m) CHECK(to_json(a.members[m]) == to_json(b.members[m]));
    }

    const auto reg = make_random(rng, 50, 3, TaskMode::regress);
    const auto mean_model = fit_ensemble(reg, EnsembleKind::bagging, cfg);
    const auto q = reg.features.row(0);
    double s = 0.0;
    for (const auto& m : mean_model.members) s += m.predict(q);
    CHECK(mean_model.predict(q) == doctest::Approx(s / 15.0).epsilon(1e-15));
    CHECK_THROWS_AS(fit_ensemble(d, EnsembleKind::adaboost, cfg), std::invalid_argument);
}

TEST_CASE("bagging keeps training accuracy near a single tree") {
    Rng rng(5);
    const auto toy = make_random(rng, 20, 2, TaskMode::classify);
    EnsembleConfig cfg;
    cfg.tree = {6, 1, 0};
    cfg.seed = 0;
    const auto tree = fit_cart(toy, cfg.tree);
    const auto bag = fit_ensemble(toy, EnsembleKind::bagging, cfg);
    const double single = accuracy(toy, [&](auto r) { return tree.predict(r); });
    const double bagged = accuracy(toy, [&](auto r) { return bag.predict(r); });
    CHECK(bagged >= single - 5.0);
}

TEST_CASE("adaboost") {
    const auto sep = make(1, {-3, -2, -1, 1, 2, 3}, {0, 0, 0, 1, 1, 1}, TaskMode::classify);
    const auto m = fit_adaboost(sep);
    CHECK(m.members.size() == 1);
    CHECK(accuracy(sep, [&](auto r) { return m.predict(r); }) == 100.0);

    const auto coin = make(1, {1, 1, 1, 1}, {0, 1, 0, 1}, TaskMode::classify);
    CHECK_THROWS_AS(fit_adaboost(coin), DataError);

    Rng rng(6);
    const auto d = make_random(rng, 80, 3, TaskMode::classify);
    const auto b = fit_adaboost(d, {40});
    CHECK(!b.members.empty());
    for (std::size_t i = 0; i < b.weights.size(); ++i) {
        CHECK(b.weights[i] > 0.0);
        CHECK(std::isfinite(b.weights[i]));
        CHECK(b.members[i].depth() <= 1);
    }
    CHECK_THROWS_AS(fit_adaboost(make_random(rng, 10, 2, TaskMode::regress)), std::invalid_argument);
}

TEST_CASE("adaboost weights follow the log-odds of the round error") {
    // Round 1 misclassifies exactly one of five points: err = 0.2, alpha = ln 4.
    const auto d = make(1, {1, 2, 3, 4, 5}, {0, 0, 1, 1, 0}, TaskMode::classify);
    const auto m = fit_adaboost(d, {1});
    REQUIRE(m.weights.size() == 1);
    CHECK(m.weights[0] == doctest::Approx(std::log(4.0)).epsilon(1e-14));
}

TEST_CASE("linear regression") {
    const auto exact = make(1, {1, 2, 3, 4}, {2, 4, 6, 8}, TaskMode::regress);
    auto m = fit_linear_regression(exact);
    CHECK(std::abs(m.slopes[0] - 2.0) < 1e-9);
    CHECK(std::abs(m.intercept) < 1e-9);
    CHECK(!m.rank_deficient);

    const auto flat = make(2, {1, 0, 2, 5, 3, 1, 4, 2}, {7, 7, 7, 7}, TaskMode::regress);
    m = fit_linear_regression(flat);
    CHECK(std::abs(m.intercept - 7.0) < 1e-9);
    for (double s : m.slopes) CHECK(std::abs(s) < 1e-9);

    const auto dup = make(2, {1, 1, 2, 2, 3, 3, 4, 4}, {1, 2, 3, 5}, TaskMode::regress);
    m = fit_linear_regression(dup);
    CHECK(m.rank_deficient);
    CHECK(std::isfinite(m.slopes[0]));
}

TEST_CASE("property: linear regression matches a QR least-squares oracle") {
    Rng rng(14);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 10, p = 3;
        std::vector<double> x(n * p), y(n);
        for (auto& v : x) v = rng.normal();
        for (auto& v : y) v = rng.normal();
        const auto m = fit_linear_regression(make(p, x, y, TaskMode::regress));

        Eigen::MatrixXd a(n, p + 1);
        Eigen::VectorXd b(n);
        for (std::size_t i = 0; i < n; ++i) {
            a(static_cast<Eigen::Index>(i), 0) = 1.0;
            for (std::size_t j = 0; j < p; ++j) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j + 1)) = x[i * p + j];
            b(static_cast<Eigen::Index>(i)) = y[i];
        }
        const Eigen::VectorXd beta = a.colPivHouseholderQr().solve(b);
        CHECK(m.intercept == doctest::Approx(beta(0)).epsilon(1e-9));
        for (std::size_t j = 0; j < p; ++j) CHECK(m.slopes[j] == doctest::Approx(beta(static_cast<Eigen::Index>(j + 1))).epsilon(1e-9));
    }
}

TEST_CASE("ann baseline") {
    for (auto mode : {TaskMode::classify, TaskMode::regress}) {
        const auto spec = build_ann_baseline(mode);
        CHECK(spec.output_shape() == nn::Shape{1});
    }
    AnnModel zero{TaskMode::classify, build_ann_baseline(TaskMode::classify), {}};
    zero.params = nn::zero_params(zero.spec);
    const std::vector<double> q(9, 1.0);
    CHECK(ann_output(zero, q) == 0.5);
    CHECK(ann_predict(zero, q) == 1.0);

    // XOR-style quadrants.
    Rng rng(0);
    std::vector<double> x, y;
    for (int i = 0; i < 80; ++i) {
        const double a = rng.uniform(-1, 1), b = rng.uniform(-1, 1);
        x.push_back(a);
        x.push_back(b);
        y.push_back(a * b > 0 ? 1.0 : 0.0);
    }
    const auto xor_data = make(2, x, y, TaskMode::classify);
    AnnConfig cfg;
    cfg.epochs = 2000;
    cfg.seed = 0;
    const auto fitted = fit_ann(xor_data, cfg);
    CHECK(accuracy(xor_data, [&](auto r) { return ann_predict(fitted, r); }) > 90.0);
}

}
