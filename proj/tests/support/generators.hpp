#pragma once

// Hand-rolled generators for property tests.

#include "weekcast/date.hpp"
#include "weekcast/features.hpp"
#include "weekcast/market_data.hpp"
#include "weekcast/random.hpp"

#include <vector>

namespace weekcast::testing {

inline Date day(int y, unsigned m, unsigned d) {
    return Date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
}

// Prices on a coarse grid so that text round-trips and hand arithmetic are exact
// enough to compare; occasional zero volume and zero range exercise the flags.
inline std::vector<OhlcvBar> random_bars(Rng& rng, std::size_t n, Date start = day(2016, 3, 7)) {
    std::vector<OhlcvBar> bars;
    Date date = start;
    double close = 50.0 + 100.0 * rng.uniform01();
    for (std::size_t i = 0; i < n; ++i) {
        OhlcvBar b;
        b.date = date;
        const double open = std::round(close * (1.0 + 0.02 * rng.normal()) * 100.0) / 100.0;
        close = std::round(open * (1.0 + 0.02 * rng.normal()) * 100.0) / 100.0;
        close = std::max(close, 1.0);
        b.open = std::max(open, 1.0);
        b.close = close;
        const bool flat = rng.below(10) == 0;
        b.high = flat ? std::max(b.open, b.close) : std::max(b.open, b.close) + std::round(100.0 * rng.uniform01()) / 100.0;
        b.low = flat ? std::min(b.open, b.close) : std::max(0.5, std::min(b.open, b.close) - std::round(100.0 * rng.uniform01()) / 100.0);
        if (flat) b.open = b.close = b.high = b.low;
        b.adj_close = b.close;
        b.volume = rng.below(8) == 0 ? 0.0 : static_cast<double>(1000 + rng.below(100000));
        bars.push_back(b);
        date = add_days(date, 1 + static_cast<int>(rng.below(3)));
    }
    return bars;
}

inline FeatureTable random_feature_table(Rng& rng, std::size_t rows) {
    return build_feature_table(ValidatedSeries(random_bars(rng, rows + 1)));
}

} // namespace weekcast::testing
