#include "weekcast/features.hpp"

#include "weekcast/error.hpp"
#include "weekcast/text.hpp"

#include <cmath>
#include <stdexcept>

namespace weekcast {

std::string_view feature_name(Feature f) {
    switch (f) {
    case Feature::month: return "month";
    case Feature::day_month: return "day_month";
    case Feature::day_week: return "day_week";
    case Feature::close_perc: return "close_perc";
    case Feature::open_perc: return "open_perc";
    case Feature::high_perc: return "high_perc";
    case Feature::low_perc: return "low_perc";
    case Feature::vol_perc: return "vol_perc";
    case Feature::range_perc: return "range_perc";
    }
    return "?";
}

Feature parse_feature(std::string_view name) {
    for (Feature f : kAllFeatures) {
        if (feature_name(f) == name) return f;
    }
    throw std::invalid_argument("unknown feature '" + std::string(name) + "'");
}

bool is_percent_feature(Feature f) {
    return f != Feature::month && f != Feature::day_month && f != Feature::day_week;
}

namespace {

double percent_change(double before, double after) { return 100.0 * (after - before) / before; }

} // namespace

PercentDerivation derive_percent_features(const OhlcvBar& prev, const OhlcvBar& curr) {
    PercentDerivation out;
    auto& p = out.values;
    p.close_perc = percent_change(prev.close, curr.close);
    p.open_perc = percent_change(prev.open, curr.open);
    p.high_perc = percent_change(prev.high, curr.high);
    p.low_perc = percent_change(prev.low, curr.low);
    if (prev.volume == 0.0) {
        out.flags |= kFlagZeroPrevVolume;
    } else {
        p.vol_perc = percent_change(prev.volume, curr.volume);
    }
    const double prev_range = prev.high - prev.low;
    if (prev_range == 0.0) {
        out.flags |= kFlagZeroPrevRange;
    } else {
        p.range_perc = percent_change(prev_range, curr.high - curr.low);
    }
    return out;
}

CalendarFeatures derive_calendar_features(int position_in_week, const Date& date) {
    if (position_in_week < 1 || position_in_week > 5) {
        throw std::invalid_argument("position_in_week must be in [1, 5], got " + std::to_string(position_in_week));
    }
    return {static_cast<int>(static_cast<unsigned>(date.month())),
            static_cast<int>(static_cast<unsigned>(date.day())), position_in_week};
}

double FeatureRow::value(Feature f) const {
    switch (f) {
    case Feature::month: return calendar.month;
    case Feature::day_month: return calendar.day_month;
    case Feature::day_week: return calendar.day_week;
    case Feature::close_perc: return percent.close_perc;
    case Feature::open_perc: return percent.open_perc;
    case Feature::high_perc: return percent.high_perc;
    case Feature::low_perc: return percent.low_perc;
    case Feature::vol_perc: return percent.vol_perc;
    case Feature::range_perc: return percent.range_perc;
    }
    return 0.0;
}

void FeatureRow::set(Feature f, double v) {
    switch (f) {
    case Feature::close_perc: percent.close_perc = v; return;
    case Feature::open_perc: percent.open_perc = v; return;
    case Feature::high_perc: percent.high_perc = v; return;
    case Feature::low_perc: percent.low_perc = v; return;
    case Feature::vol_perc: percent.vol_perc = v; return;
    case Feature::range_perc: percent.range_perc = v; return;
    default: throw std::invalid_argument("calendar feature '" + std::string(feature_name(f)) + "' is read-only");
    }
}

FeatureTable build_feature_table(const ValidatedSeries& series) {
    if (series.size() < 2) {
        throw DataError("feature table needs at least 2 bars, got " + std::to_string(series.size()));
    }
    FeatureTable table;
    table.reserve(series.size() - 1);
    for (std::size_t i = 1; i < series.size(); ++i) {
        const auto derived = derive_percent_features(series[i - 1], series[i]);
        const int position = static_cast<int>((i - 1) % kDaysPerWeek) + 1;
        table.push_back({series[i].date, derive_calendar_features(position, series[i].date), derived.values,
                         derived.flags});
    }
    return table;
}

std::vector<double> feature_column(std::span<const FeatureRow> table, Feature f) {
    std::vector<double> out;
    out.reserve(table.size());
    for (const auto& row : table) out.push_back(row.value(f));
    return out;
}

ZScore fit_zscore(std::span<const double> values, std::string_view what) {
    if (values.empty()) throw DataError("cannot standardize " + std::string(what) + ": no rows");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(values.size()));
    if (!(sd > 0.0) || !std::isfinite(sd)) {
        throw DataError("cannot standardize " + std::string(what) + ": zero standard deviation");
    }
    return {mean, sd};
}

StandardizerStats fit_standardizer(std::span<const FeatureRow> training_rows, std::span<const Feature> features) {
    StandardizerStats out;
    for (Feature f : features) {
        if (!is_percent_feature(f)) {
            throw std::invalid_argument("only percent features can be standardized, got " +
                                        std::string(feature_name(f)));
        }
        const auto col = feature_column(training_rows, f);
        out.features.push_back(f);
        out.stats.push_back(fit_zscore(col, feature_name(f)));
    }
    return out;
}

FeatureTable apply_standardizer(std::span<const FeatureRow> table, const StandardizerStats& stats) {
    FeatureTable out(table.begin(), table.end());
    for (auto& row : out) {
        for (std::size_t i = 0; i < stats.features.size(); ++i) {
            const auto f = stats.features[i];
            row.set(f, (row.value(f) - stats.stats[i].mean) / stats.stats[i].sd);
        }
    }
    return out;
}

FeatureTable invert_standardizer(std::span<const FeatureRow> table, const StandardizerStats& stats) {
    FeatureTable out(table.begin(), table.end());
    for (auto& row : out) {
        for (std::size_t i = 0; i < stats.features.size(); ++i) {
            const auto f = stats.features[i];
            row.set(f, row.value(f) * stats.stats[i].sd + stats.stats[i].mean);
        }
    }
    return out;
}

std::string feature_table_csv(std::span<const FeatureRow> table) {
    std::string out(kFeatureCsvHeader);
    out += '\n';
    for (const auto& row : table) {
        out += format_iso_date(row.date);
        out += ',' + std::to_string(row.calendar.month);
        out += ',' + std::to_string(row.calendar.day_month);
        out += ',' + std::to_string(row.calendar.day_week);
        for (double v : {row.percent.close_perc, row.percent.open_perc, row.percent.high_perc, row.percent.low_perc,
                         row.percent.vol_perc, row.percent.range_perc}) {
            out += ',';
            out += format_double(v);
        }
        out += ',' + std::to_string(row.flags);
        out += '\n';
    }
    return out;
}

} // namespace weekcast
