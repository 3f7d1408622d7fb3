#include "doctest.h"

#include "support/feature_oracle.hpp"
#include "support/generators.hpp"
#include "weekcast/error.hpp"
#include "weekcast/features.hpp"
#include "weekcast/text.hpp"

#include <cmath>

using namespace weekcast;
using weekcast::testing::day;

namespace {

OhlcvBar bar(double open, double high, double low, double close, double volume = 100.0) {
    return {day(2015, 1, 5), open, high, low, close, close, volume};
}

} // namespace

TEST_SUITE("feature_pipeline") {

TEST_CASE("percent features") {
    auto d = derive_percent_features(bar(100, 100, 100, 100), bar(102, 102, 102, 102));
    CHECK(d.values.close_perc == 2.0);

    const OhlcvBar same = bar(100, 110, 95, 105, 1000);
    d = derive_percent_features(same, same);
    CHECK(d.values == PercentFeatures{});
    CHECK(d.flags == 0);

    d = derive_percent_features(bar(104, 108, 100, 104), bar(105, 110, 100, 105));
    CHECK(d.values.range_perc == 25.0);
}

TEST_CASE("degenerate denominators give zero and a flag") {
    auto d = derive_percent_features(bar(100, 100, 100, 100, 0.0), bar(100, 101, 99, 100, 50.0));
    CHECK(d.values.vol_perc == 0.0);
    CHECK(d.values.range_perc == 0.0);
    CHECK(d.flags == (kFlagZeroPrevVolume | kFlagZeroPrevRange));
}

TEST_CASE("calendar features") {
    CHECK(derive_calendar_features(3, day(2015, 2, 14)) == CalendarFeatures{2, 14, 3});
    CHECK(derive_calendar_features(1, day(2015, 1, 5)) == CalendarFeatures{1, 5, 1});
    CHECK(derive_calendar_features(5, day(2018, 12, 28)) == CalendarFeatures{12, 28, 5});
    CHECK_THROWS_AS(derive_calendar_features(0, day(2015, 1, 5)), std::invalid_argument);
    CHECK_THROWS_AS(derive_calendar_features(6, day(2015, 1, 5)), std::invalid_argument);
}

TEST_CASE("feature table sizes") {
    const auto s = generate_synthetic_series(1041, SyntheticPattern::random_walk, 0);
    CHECK(build_feature_table(s).size() == 1040);

    const OhlcvBar b = bar(100, 110, 95, 105);
    OhlcvBar b2 = b;
    b2.date = day(2015, 1, 6);
    const auto t = build_feature_table(ValidatedSeries({b, b2}));
    REQUIRE(t.size() == 1);
    CHECK(t[0].percent == PercentFeatures{});

    CHECK_THROWS_AS(build_feature_table(ValidatedSeries({b})), DataError);
    CHECK_THROWS_AS(build_feature_table(ValidatedSeries()), DataError);
}

TEST_CASE("fixture matches the independent oracle exactly") {
    const std::string csv = read_text_file(WEEKCAST_FIXTURE_DIR "/thirty_days.csv");
    const auto parsed = parse_ohlcv_csv(csv);
    CHECK(parsed.skipped_null_rows == 1);
    const auto table = build_feature_table(parsed.series);
    const auto expect = testing::oracle_features(testing::oracle_bars(csv));
    REQUIRE(table.size() == 29);
    REQUIRE(expect.size() == 29);
    unsigned any_flags = 0;
    for (std::size_t i = 0; i < table.size(); ++i) {
        const auto& r = table[i];
        const auto& e = expect[i];
        CHECK(format_iso_date(r.date) == e.date);
        CHECK(r.calendar.month == e.month);
        CHECK(r.calendar.day_month == e.day_month);
        CHECK(r.calendar.day_week == e.day_week);
        CHECK(r.percent.close_perc == e.close_perc);
        CHECK(r.percent.open_perc == e.open_perc);
        CHECK(r.percent.high_perc == e.high_perc);
        CHECK(r.percent.low_perc == e.low_perc);
        CHECK(r.percent.vol_perc == e.vol_perc);
        CHECK(r.percent.range_perc == e.range_perc);
        CHECK(r.flags == e.flags);
        any_flags |= r.flags;
    }
    CHECK(any_flags == 3u);
}

TEST_CASE("property: table invariants on random series") {
    Rng rng(17);
    for (int trial = 0; trial < 40; ++trial) {
        const auto bars = testing::random_bars(rng, 2 + rng.below(80));
        const ValidatedSeries series(bars);
        const auto table = build_feature_table(series);
        REQUIRE(table.size() == series.size() - 1);
        for (std::size_t i = 0; i < table.size(); ++i) {
            const auto& prev = series[i];
            const auto& curr = series[i + 1];
            const auto& r = table[i];
            CHECK(r.percent.close_perc == 100.0 * (curr.close - prev.close) / prev.close);
            CHECK(r.percent.open_perc == 100.0 * (curr.open - prev.open) / prev.open);
            const int sign_feature = (r.percent.close_perc > 0) - (r.percent.close_perc < 0);
            const int sign_raw = (curr.close > prev.close) - (curr.close < prev.close);
            CHECK(sign_feature == sign_raw);
            CHECK(r.calendar.day_week == static_cast<int>(i % 5) + 1);
            if (i > 0) CHECK(table[i - 1].date < r.date);
        }
    }
}

TEST_CASE("z-scores") {
    const std::vector<double> sym{-1.0, 1.0};
    auto z = fit_zscore(sym);
    CHECK(z.mean == 0.0);
    CHECK(z.sd == 1.0);

    const std::vector<double> ten{0.0, 10.0};
    z = fit_zscore(ten);
    CHECK(z.mean == 5.0);
    CHECK(z.sd == 5.0);
    CHECK((0.0 - z.mean) / z.sd == -1.0);
    CHECK((10.0 - z.mean) / z.sd == 1.0);

    const std::vector<double> flat{3.0, 3.0, 3.0};
    CHECK_THROWS_AS(fit_zscore(flat), DataError);
}

TEST_CASE("property: standardize then invert recovers the table") {
    Rng rng(23);
    std::vector<Feature> percent;
    for (Feature f : kAllFeatures)
        if (is_percent_feature(f)) percent.push_back(f);
    for (int trial = 0; trial < 20; ++trial) {
        const auto table = testing::random_feature_table(rng, 20 + rng.below(50));
        const std::span<const FeatureRow> train(table.data(), table.size() / 2 + 2);
        StandardizerStats stats;
        try {
            stats = fit_standardizer(train, percent);
        } catch (const DataError&) {
            continue;  // a random column can be constant on the training half
        }
        const auto z = apply_standardizer(table, stats);
        const auto back = invert_standardizer(z, stats);
        for (std::size_t i = 0; i < table.size(); ++i) {
            CHECK(back[i].calendar == table[i].calendar);
            for (Feature f : percent) {
                const double a = table[i].value(f), b = back[i].value(f);
                CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
            }
        }
        // Training rows standardize to mean 0.
        for (Feature f : percent) {
            double mean = 0.0;
            for (std::size_t i = 0; i < train.size(); ++i) mean += z[i].value(f);
            CHECK(std::abs(mean / static_cast<double>(train.size())) < 1e-12);
        }
    }
}

TEST_CASE("calendar features cannot be standardized") {
    const auto table = build_feature_table(generate_synthetic_series(30, SyntheticPattern::random_walk, 1));
    const std::vector<Feature> bad{Feature::month};
    CHECK_THROWS(fit_standardizer(table, bad));
}

TEST_CASE("csv export") {
    const auto table = build_feature_table(generate_synthetic_series(12, SyntheticPattern::linear, 1));
    const auto csv = feature_table_csv(table);
    CHECK(csv.starts_with("date,month,day_month,day_week,close_perc,open_perc,high_perc,low_perc,vol_perc,range_perc,flags\n"));
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 12);
}

TEST_CASE("feature names round-trip") {
    for (Feature f : kAllFeatures) CHECK(parse_feature(feature_name(f)) == f);
}

}
