#pragma once

#include "weekcast/date.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace weekcast {

/// One trading day of index data.
struct OhlcvBar {
    Date date;
    double open = 0.0;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;
    double adj_close = 0.0;  // parsed and re-emitted, never used by features
    double volume = 0.0;

    bool operator==(const OhlcvBar&) const = default;
};

/// Throws DataError naming the bar's date if any price invariant fails.
void validate_bar(const OhlcvBar& bar);

/// Bars strictly ascending by date, each satisfying the OHLC invariants.
class ValidatedSeries {
public:
    ValidatedSeries() = default;
    /// Sorts by date, then validates; throws DataError on duplicates or bad bars.
    explicit ValidatedSeries(std::vector<OhlcvBar> bars);

    std::span<const OhlcvBar> bars() const noexcept { return bars_; }
    std::size_t size() const noexcept { return bars_.size(); }
    bool empty() const noexcept { return bars_.empty(); }
    const OhlcvBar& operator[](std::size_t i) const { return bars_[i]; }

    bool operator==(const ValidatedSeries&) const = default;

private:
    std::vector<OhlcvBar> bars_;
};

struct ParseResult {
    ValidatedSeries series;
    std::size_t skipped_null_rows = 0;
};

inline constexpr std::string_view kYahooHeader = "Date,Open,High,Low,Close,Adj Close,Volume";

/// Parses a Yahoo Finance daily-history CSV. Rows containing a literal `null`
/// field are skipped and counted.
ParseResult parse_ohlcv_csv(std::string_view text);
ParseResult read_ohlcv_csv(const std::string& path);

/// Re-emits a series with the Yahoo header; parse(serialize(s)) == s.
std::string serialize_ohlcv_csv(const ValidatedSeries& series);

/// Five consecutive records; `index` is the ordinal week number from 0.
template <typename Row>
struct TradingWeek {
    std::size_t index = 0;
    std::vector<Row> rows;
};

template <typename Row>
struct WeekChunks {
    std::vector<TradingWeek<Row>> weeks;
    std::size_t dropped_trailing = 0;
};

inline constexpr std::size_t kDaysPerWeek = 5;

/// Groups records into consecutive non-overlapping blocks of five. A trailing
/// partial block is dropped and its size reported.
template <typename Row>
WeekChunks<Row> chunk_into_weeks(std::span<const Row> records) {
    WeekChunks<Row> out;
    const std::size_t full = records.size() / kDaysPerWeek;
    out.weeks.reserve(full);
    for (std::size_t w = 0; w < full; ++w) {
        auto first = records.begin() + static_cast<std::ptrdiff_t>(w * kDaysPerWeek);
        out.weeks.push_back({w, std::vector<Row>(first, first + kDaysPerWeek)});
    }
    out.dropped_trailing = records.size() - full * kDaysPerWeek;
    return out;
}

enum class SyntheticPattern { constant, linear, sine, random_walk };

/// Throws std::invalid_argument for unknown names.
SyntheticPattern parse_synthetic_pattern(std::string_view name);

/// Deterministic test series on consecutive weekdays starting at `start`.
/// High/low form an envelope around open and close; volume is positive.
ValidatedSeries generate_synthetic_series(std::size_t length, SyntheticPattern pattern,
                                          std::uint64_t seed,
                                          Date start = Date{std::chrono::year{2015},
                                                            std::chrono::January,
                                                            std::chrono::day{5}});

} // namespace weekcast
