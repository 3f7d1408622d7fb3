#pragma once

#include "weekcast/nn/tensor.hpp"

#include "json.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace weekcast {

struct ConfusionMatrix {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    std::size_t total() const { return tp + fp + tn + fn; }
    bool operator==(const ConfusionMatrix&) const = default;
};

/// Labels and predictions in {0, 1}; 1 is the positive class.
ConfusionMatrix confusion_matrix(std::span<const int> labels, std::span<const int> predicted);

/// Percentages. A metric whose denominator is zero is nullopt (undefined),
/// never 0.
struct ClassificationMetrics {
    std::optional<double> recall;
    std::optional<double> specificity;
    std::optional<double> precision;
    std::optional<double> npv;
    std::optional<double> ca;
};

ClassificationMetrics classification_metrics(const ConfusionMatrix& cm);

struct RmseBreakdown {
    std::vector<double> per_day;  // one entry per column (day of week)
    double overall = 0.0;
};

/// predictions and actuals are [weeks, days]; per-day RMSE is over weeks,
/// overall RMSE is over every cell.
RmseBreakdown rmse_report(const nn::Tensor& predictions, const nn::Tensor& actuals);

/// Product-moment correlation; nullopt when either input is constant.
/// Throws std::invalid_argument for mismatched lengths or fewer than 2 points.
std::optional<double> pearson_correlation(std::span<const double> x, std::span<const double> y);

/// Percentage of cells whose signs agree, with sign(0) taken as positive.
double matched_cases(std::span<const double> predictions, std::span<const double> actuals);

struct ForecastReport {
    std::array<double, 5> per_day_rmse{};
    double overall_rmse = 0.0;
    std::optional<double> pearson_r;
    double matched_pct = 0.0;
};

/// Full report for [weeks, 5] forecasts.
ForecastReport forecast_report(const nn::Tensor& predictions, const nn::Tensor& actuals);

/// Flat (name, value) rows; undefined values are nullopt.
using MetricRows = std::vector<std::pair<std::string, std::optional<double>>>;

MetricRows metric_rows(const ForecastReport& report, const std::string& prefix);
MetricRows metric_rows(const ClassificationMetrics& metrics, const std::string& prefix);

nlohmann::json metrics_json(const MetricRows& rows);
/// `metric,value` with an empty value for undefined metrics.
std::string metrics_csv(const MetricRows& rows);

/// Presentation rounding to 2 decimals.
std::string format_percent(std::optional<double> v);

inline constexpr std::array<const char*, 5> kDayNames = {"mon", "tue", "wed", "thu", "fri"};

} // namespace weekcast
