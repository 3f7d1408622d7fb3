#pragma once

#include "weekcast/date.hpp"
#include "weekcast/market_data.hpp"

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace weekcast {

/// The nine derived variables, in export column order.
enum class Feature { month, day_month, day_week, close_perc, open_perc, high_perc, low_perc, vol_perc, range_perc };

inline constexpr std::array<Feature, 9> kAllFeatures = {
    Feature::month,     Feature::day_month, Feature::day_week, Feature::close_perc, Feature::open_perc,
    Feature::high_perc, Feature::low_perc,  Feature::vol_perc, Feature::range_perc};

std::string_view feature_name(Feature f);
Feature parse_feature(std::string_view name);
bool is_percent_feature(Feature f);

struct CalendarFeatures {
    int month = 0;
    int day_month = 0;
    int day_week = 0;

    bool operator==(const CalendarFeatures&) const = default;
};

/// Percent changes between two successive days, 100 * (v2 - v1) / v1.
struct PercentFeatures {
    double close_perc = 0.0;
    double open_perc = 0.0;
    double high_perc = 0.0;
    double low_perc = 0.0;
    double vol_perc = 0.0;
    double range_perc = 0.0;

    bool operator==(const PercentFeatures&) const = default;
};

/// Row flags raised when a previous-day denominator is zero.
enum FeatureFlag : unsigned {
    kFlagZeroPrevVolume = 1u << 0,
    kFlagZeroPrevRange = 1u << 1,
};

struct PercentDerivation {
    PercentFeatures values;
    unsigned flags = 0;
};

/// Degenerate volume or range denominators produce 0.0 and set a flag.
PercentDerivation derive_percent_features(const OhlcvBar& prev, const OhlcvBar& curr);

/// Throws std::invalid_argument unless position_in_week is in [1, 5].
CalendarFeatures derive_calendar_features(int position_in_week, const Date& date);

struct FeatureRow {
    Date date;
    CalendarFeatures calendar;
    PercentFeatures percent;
    unsigned flags = 0;

    double value(Feature f) const;
    /// Only percent features are writable.
    void set(Feature f, double v);

    bool operator==(const FeatureRow&) const = default;
};

using FeatureTable = std::vector<FeatureRow>;

/// One row per day after the first. day_week is the position inside the
/// sequential 5-row chunk of the feature rows.
FeatureTable build_feature_table(const ValidatedSeries& series);

std::vector<double> feature_column(std::span<const FeatureRow> table, Feature f);

struct ZScore {
    double mean = 0.0;
    double sd = 0.0;  // population standard deviation
};

/// Throws DataError on empty input or zero standard deviation.
ZScore fit_zscore(std::span<const double> values, std::string_view what = "feature");

struct StandardizerStats {
    std::vector<Feature> features;
    std::vector<ZScore> stats;
};

/// Fits per-feature mean / population sd. Only percent features may be selected.
StandardizerStats fit_standardizer(std::span<const FeatureRow> training_rows, std::span<const Feature> features);
FeatureTable apply_standardizer(std::span<const FeatureRow> table, const StandardizerStats& stats);
FeatureTable invert_standardizer(std::span<const FeatureRow> table, const StandardizerStats& stats);

inline constexpr std::string_view kFeatureCsvHeader =
    "date,month,day_month,day_week,close_perc,open_perc,high_perc,low_perc,vol_perc,range_perc,flags";

std::string feature_table_csv(std::span<const FeatureRow> table);

} // namespace weekcast
