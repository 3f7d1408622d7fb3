#pragma once

// Brute-force metric recomputation. Written against the textbook formulas in
// long double, sharing nothing with the library code.

#include "weekcast/metrics.hpp"
#include "weekcast/random.hpp"

#include <cmath>
#include <optional>
#include <vector>

namespace weekcast::testing {

struct OracleCounts {
    long double tp = 0, fp = 0, tn = 0, fn = 0;
};

inline OracleCounts count_pairs(const std::vector<int>& labels, const std::vector<int>& predicted) {
    OracleCounts c;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == 1 && predicted[i] == 1) c.tp += 1;
        if (labels[i] == 0 && predicted[i] == 1) c.fp += 1;
        if (labels[i] == 0 && predicted[i] == 0) c.tn += 1;
        if (labels[i] == 1 && predicted[i] == 0) c.fn += 1;
    }
    return c;
}

inline std::optional<double> oracle_ratio(long double num, long double den) {
    if (den == 0) return std::nullopt;
    return static_cast<double>(100.0L * num / den);
}

inline std::vector<double> oracle_rmse_by_day(const std::vector<std::vector<double>>& pred,
                                              const std::vector<std::vector<double>>& act) {
    const std::size_t days = pred.front().size();
    std::vector<double> out(days);
    for (std::size_t d = 0; d < days; ++d) {
        long double s = 0;
        for (std::size_t w = 0; w < pred.size(); ++w) {
            const long double r = static_cast<long double>(pred[w][d]) - act[w][d];
            s += r * r;
        }
        out[d] = static_cast<double>(std::sqrt(s / pred.size()));
    }
    return out;
}

inline double oracle_rmse_flat(const std::vector<double>& pred, const std::vector<double>& act) {
    long double s = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const long double r = static_cast<long double>(pred[i]) - act[i];
        s += r * r;
    }
    return static_cast<double>(std::sqrt(s / pred.size()));
}

// Two-pass covariance form.
inline std::optional<double> oracle_pearson(const std::vector<double>& x, const std::vector<double>& y) {
    long double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= x.size();
    my /= y.size();
    long double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0 || syy == 0) return std::nullopt;
    return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

inline double oracle_matched(const std::vector<double>& pred, const std::vector<double>& act) {
    std::size_t same = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) same += (pred[i] >= 0) == (act[i] >= 0);
    return 100.0 * static_cast<double>(same) / static_cast<double>(pred.size());
}

inline double rel_error(double a, double b) {
    if (a == b) return 0.0;
    return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

inline double rel_error(std::optional<double> a, std::optional<double> b) {
    if (a.has_value() != b.has_value()) return INFINITY;
    return a ? rel_error(*a, *b) : 0.0;
}

// Relative errors of each metric family on one random instance.
struct MetricOracleResult {
    double classification = 0.0;
    double rmse = 0.0;
    double pearson = 0.0;
    double matched = 0.0;
};

inline MetricOracleResult metric_oracle_trial(Rng& rng) {
    MetricOracleResult r;
    const std::size_t n = 1 + rng.below(40);
    std::vector<int> labels(n), predicted(n);
    for (std::size_t i = 0; i < n; ++i) {
        labels[i] = static_cast<int>(rng.below(2));
        predicted[i] = static_cast<int>(rng.below(2));
    }
    const auto cm = confusion_matrix(labels, predicted);
    const auto m = classification_metrics(cm);
    const auto c = count_pairs(labels, predicted);
    for (auto [got, want] : {std::pair{m.recall, oracle_ratio(c.tp, c.tp + c.fn)},
                             std::pair{m.specificity, oracle_ratio(c.tn, c.tn + c.fp)},
                             std::pair{m.precision, oracle_ratio(c.tp, c.tp + c.fp)},
                             std::pair{m.npv, oracle_ratio(c.tn, c.tn + c.fn)},
                             std::pair{m.ca, oracle_ratio(c.tp + c.tn, c.tp + c.fp + c.tn + c.fn)}})
        r.classification = std::max(r.classification, rel_error(got, want));

    const std::size_t weeks = 1 + rng.below(12);
    nn::Tensor pred({weeks, 5}), act({weeks, 5});
    std::vector<std::vector<double>> pw(weeks, std::vector<double>(5)), aw = pw;
    for (std::size_t w = 0; w < weeks; ++w)
        for (std::size_t d = 0; d < 5; ++d) {
            // Occasional exact zeros exercise the sign rule.
            pw[w][d] = rng.below(8) == 0 ? 0.0 : 2.0 * rng.normal();
            aw[w][d] = rng.below(8) == 0 ? 0.0 : 2.0 * rng.normal();
            pred.values[w * 5 + d] = pw[w][d];
            act.values[w * 5 + d] = aw[w][d];
        }
    const auto rep = rmse_report(pred, act);
    const auto days = oracle_rmse_by_day(pw, aw);
    for (std::size_t d = 0; d < 5; ++d) r.rmse = std::max(r.rmse, rel_error(rep.per_day[d], days[d]));
    r.rmse = std::max(r.rmse, rel_error(rep.overall, oracle_rmse_flat(pred.values, act.values)));

    if (pred.values.size() >= 2)
        r.pearson = rel_error(pearson_correlation(pred.values, act.values), oracle_pearson(pred.values, act.values));
    r.matched = rel_error(matched_cases(pred.values, act.values), oracle_matched(pred.values, act.values));
    return r;
}

} // namespace weekcast::testing
