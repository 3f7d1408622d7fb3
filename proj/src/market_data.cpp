#include "weekcast/market_data.hpp"

#include "weekcast/error.hpp"
#include "weekcast/random.hpp"
#include "weekcast/text.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace weekcast {

void validate_bar(const OhlcvBar& bar) {
    const auto fail = [&](const std::string& why) {
        throw DataError("invalid bar on " + format_iso_date(bar.date) + ": " + why);
    };
    for (double v : {bar.open, bar.high, bar.low, bar.close, bar.adj_close, bar.volume}) {
        if (!std::isfinite(v)) fail("non-finite value");
    }
    if (bar.open <= 0 || bar.high <= 0 || bar.low <= 0 || bar.close <= 0) fail("non-positive price");
    if (bar.low > bar.high) fail("low above high");
    if (bar.open < bar.low || bar.open > bar.high) fail("open outside [low, high]");
    if (bar.close < bar.low || bar.close > bar.high) fail("close outside [low, high]");
    if (bar.volume < 0) fail("negative volume");
}

ValidatedSeries::ValidatedSeries(std::vector<OhlcvBar> bars) : bars_(std::move(bars)) {
    std::stable_sort(bars_.begin(), bars_.end(),
                     [](const OhlcvBar& a, const OhlcvBar& b) { return a.date < b.date; });
    for (std::size_t i = 0; i < bars_.size(); ++i) {
        if (i > 0 && bars_[i].date == bars_[i - 1].date) {
            throw DataError("duplicate date " + format_iso_date(bars_[i].date));
        }
        validate_bar(bars_[i]);
    }
}

ParseResult parse_ohlcv_csv(std::string_view text) {
    ParseResult result;
    std::vector<OhlcvBar> bars;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        const auto line = trim(text.substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        if (line.empty()) continue;
        if (!header_seen) {
            if (line != kYahooHeader) {
                throw DataError("malformed header: expected '" + std::string(kYahooHeader) + "'");
            }
            header_seen = true;
            continue;
        }
        const auto fields = split(line, ',');
        const auto where = "line " + std::to_string(line_no);
        if (fields.size() != 7) throw DataError(where + ": expected 7 fields");
        if (std::any_of(fields.begin(), fields.end(), [](std::string_view f) { return trim(f) == "null"; })) {
            ++result.skipped_null_rows;
            continue;
        }
        OhlcvBar bar;
        const auto date = parse_iso_date(trim(fields[0]));
        if (!date) throw DataError(where + ": unparseable date '" + std::string(fields[0]) + "'");
        bar.date = *date;
        double* targets[] = {&bar.open, &bar.high, &bar.low, &bar.close, &bar.adj_close, &bar.volume};
        for (std::size_t i = 0; i < 6; ++i) {
            const auto v = parse_double(trim(fields[i + 1]));
            if (!v) throw DataError(where + ": unparseable number '" + std::string(fields[i + 1]) + "'");
            *targets[i] = *v;
        }
        bars.push_back(bar);
    }
    if (!header_seen) throw DataError("malformed header: empty document");
    result.series = ValidatedSeries(std::move(bars));
    return result;
}

ParseResult read_ohlcv_csv(const std::string& path) {
    return parse_ohlcv_csv(read_text_file(path));
}

std::string serialize_ohlcv_csv(const ValidatedSeries& series) {
    std::string out(kYahooHeader);
    out += '\n';
    for (const auto& b : series.bars()) {
        out += format_iso_date(b.date);
        for (double v : {b.open, b.high, b.low, b.close, b.adj_close, b.volume}) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

SyntheticPattern parse_synthetic_pattern(std::string_view name) {
    if (name == "constant") return SyntheticPattern::constant;
    if (name == "linear") return SyntheticPattern::linear;
    if (name == "sine") return SyntheticPattern::sine;
    if (name == "random_walk" || name == "seeded-random-walk") return SyntheticPattern::random_walk;
    throw std::invalid_argument("unknown synthetic pattern '" + std::string(name) + "'");
}

ValidatedSeries generate_synthetic_series(std::size_t length, SyntheticPattern pattern,
                                          std::uint64_t seed, Date start) {
    Rng rng(seed);
    const double phase = 2.0 * std::numbers::pi * rng.uniform01();

    std::vector<OhlcvBar> bars;
    bars.reserve(length);
    Date date = start;
    while (iso_weekday(date) > 5) date = add_days(date, 1);

    double close = 100.0;
    for (std::size_t t = 0; t < length; ++t) {
        const double prev_close = close;
        switch (pattern) {
        case SyntheticPattern::constant: close = 100.0; break;
        case SyntheticPattern::linear: close = 100.0 + static_cast<double>(t); break;
        case SyntheticPattern::sine:
            close = 100.0 + 10.0 * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / 20.0 + phase);
            break;
        case SyntheticPattern::random_walk:
            if (t > 0) close = std::max(1.0, close * (1.0 + 0.01 * rng.normal()));
            break;
        }
        OhlcvBar bar;
        bar.date = date;
        bar.close = close;
        bar.adj_close = close;
        bar.open = t == 0 ? close : prev_close;
        double envelope = 0.002 * close;
        double volume = 1.0e5;
        if (pattern == SyntheticPattern::random_walk) {
            envelope *= 0.5 + rng.uniform01();
            volume *= 0.5 + rng.uniform01();
        } else if (pattern != SyntheticPattern::constant) {
            volume *= 1.0 + 0.25 * std::sin(0.3 * static_cast<double>(t));
        }
        bar.high = std::max(bar.open, bar.close) + envelope;
        bar.low = std::min(bar.open, bar.close) - envelope;
        bar.volume = volume;
        bars.push_back(bar);

        do {
            date = add_days(date, 1);
        } while (iso_weekday(date) > 5);
    }
    return ValidatedSeries(std::move(bars));
}

} // namespace weekcast
