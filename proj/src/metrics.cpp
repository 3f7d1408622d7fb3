#include "weekcast/metrics.hpp"

#include "weekcast/error.hpp"
#include "weekcast/text.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace weekcast {

ConfusionMatrix confusion_matrix(std::span<const int> labels, std::span<const int> predicted) {
    if (labels.size() != predicted.size()) throw std::invalid_argument("confusion matrix: length mismatch");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const bool actual = labels[i] != 0;
        const bool pred = predicted[i] != 0;
        if (actual && pred) ++cm.tp;
        else if (!actual && pred) ++cm.fp;
        else if (!actual && !pred) ++cm.tn;
        else ++cm.fn;
    }
    return cm;
}

namespace {

std::optional<double> ratio(std::size_t num, std::size_t den) {
    if (den == 0) return std::nullopt;
    return 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

} // namespace

ClassificationMetrics classification_metrics(const ConfusionMatrix& cm) {
    return {ratio(cm.tp, cm.tp + cm.fn), ratio(cm.tn, cm.tn + cm.fp), ratio(cm.tp, cm.tp + cm.fp),
            ratio(cm.tn, cm.tn + cm.fn), ratio(cm.tp + cm.tn, cm.total())};
}

RmseBreakdown rmse_report(const nn::Tensor& predictions, const nn::Tensor& actuals) {
    nn::require_same_shape(predictions, actuals, "rmse_report");
    if (predictions.rank() != 2 || predictions.shape[0] == 0 || predictions.shape[1] == 0) {
        throw ShapeError("rmse_report expects [weeks, days] with at least one week");
    }
    const std::size_t weeks = predictions.shape[0];
    const std::size_t days = predictions.shape[1];
    RmseBreakdown out;
    out.per_day.assign(days, 0.0);
    double total = 0.0;
    for (std::size_t w = 0; w < weeks; ++w)
        for (std::size_t d = 0; d < days; ++d) {
            const double e = predictions[w * days + d] - actuals[w * days + d];
            out.per_day[d] += e * e;
            total += e * e;
        }
    for (auto& v : out.per_day) v = std::sqrt(v / static_cast<double>(weeks));
    out.overall = std::sqrt(total / static_cast<double>(weeks * days));
    return out;
}

std::optional<double> pearson_correlation(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("pearson_correlation: length mismatch");
    if (x.size() < 2) throw std::invalid_argument("pearson_correlation needs at least 2 points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    const double r = sxy / std::sqrt(sxx * syy);
    return std::clamp(r, -1.0, 1.0);
}

double matched_cases(std::span<const double> predictions, std::span<const double> actuals) {
    if (predictions.size() != actuals.size()) throw std::invalid_argument("matched_cases: length mismatch");
    if (predictions.empty()) throw std::invalid_argument("matched_cases: no cells");
    std::size_t matched = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if ((predictions[i] >= 0.0) == (actuals[i] >= 0.0)) ++matched;
    }
    return 100.0 * static_cast<double>(matched) / static_cast<double>(predictions.size());
}

ForecastReport forecast_report(const nn::Tensor& predictions, const nn::Tensor& actuals) {
    const auto rmse = rmse_report(predictions, actuals);
    if (rmse.per_day.size() != 5) throw ShapeError("forecast_report expects five days per week");
    ForecastReport r;
    std::copy(rmse.per_day.begin(), rmse.per_day.end(), r.per_day_rmse.begin());
    r.overall_rmse = rmse.overall;
    if (predictions.size() >= 2) r.pearson_r = pearson_correlation(predictions.values, actuals.values);
    r.matched_pct = matched_cases(predictions.values, actuals.values);
    return r;
}

MetricRows metric_rows(const ForecastReport& report, const std::string& prefix) {
    MetricRows rows;
    for (std::size_t d = 0; d < 5; ++d) rows.emplace_back(prefix + "rmse_" + kDayNames[d], report.per_day_rmse[d]);
    rows.emplace_back(prefix + "rmse_overall", report.overall_rmse);
    rows.emplace_back(prefix + "pearson_r", report.pearson_r);
    rows.emplace_back(prefix + "matched_pct", report.matched_pct);
    return rows;
}

MetricRows metric_rows(const ClassificationMetrics& m, const std::string& prefix) {
    return {{prefix + "recall", m.recall},
            {prefix + "specificity", m.specificity},
            {prefix + "precision", m.precision},
            {prefix + "npv", m.npv},
            {prefix + "ca", m.ca}};
}

nlohmann::json metrics_json(const MetricRows& rows) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [name, value] : rows) out[name] = value ? nlohmann::json(*value) : nlohmann::json(nullptr);
    return out;
}

std::string metrics_csv(const MetricRows& rows) {
    std::string out = "metric,value\n";
    for (const auto& [name, value] : rows) {
        out += name + ',' + (value ? format_double(*value) : std::string()) + '\n';
    }
    return out;
}

std::string format_percent(std::optional<double> v) {
    if (!v) return "undefined";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", *v);
    return buf;
}

} // namespace weekcast
