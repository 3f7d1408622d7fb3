#include "doctest.h"

#include "support/generators.hpp"
#include "weekcast/error.hpp"
#include "weekcast/market_data.hpp"
#include "weekcast/text.hpp"

#include <numeric>

using namespace weekcast;
using weekcast::testing::day;

namespace {

const std::string kHeader = "Date,Open,High,Low,Close,Adj Close,Volume\n";

} // namespace

TEST_SUITE("market_data") {

TEST_CASE("single row maps fields directly") {
    const auto r = parse_ohlcv_csv(kHeader + "2015-01-05,100,110,95,105,104,1000\n");
    REQUIRE(r.series.size() == 1);
    const auto& b = r.series[0];
    CHECK(b.date == day(2015, 1, 5));
    CHECK(b.open == 100);
    CHECK(b.high == 110);
    CHECK(b.low == 95);
    CHECK(b.close == 105);
    CHECK(b.adj_close == 104);
    CHECK(b.volume == 1000);
    CHECK(r.skipped_null_rows == 0);
}

TEST_CASE("rows out of order come back sorted") {
    const auto r = parse_ohlcv_csv(kHeader + "2015-01-06,1,2,1,2,2,5\n2015-01-05,1,2,1,1,1,5\n");
    REQUIRE(r.series.size() == 2);
    CHECK(r.series[0].date == day(2015, 1, 5));
    CHECK(r.series[1].date == day(2015, 1, 6));
}

TEST_CASE("null rows are skipped and counted") {
    const auto r = parse_ohlcv_csv(kHeader + "2015-01-23,1,2,1,2,2,5\n2015-01-26,null,null,null,null,null,null\n");
    CHECK(r.series.size() == 1);
    CHECK(r.skipped_null_rows == 1);
}

TEST_CASE("crlf line endings and a missing trailing newline parse") {
    const auto r = parse_ohlcv_csv("Date,Open,High,Low,Close,Adj Close,Volume\r\n2015-01-05,1,2,1,2,2,5");
    CHECK(r.series.size() == 1);
}

TEST_CASE("malformed input is rejected") {
    CHECK_THROWS_AS(parse_ohlcv_csv("Date,Open,High,Low,Close,Volume\n"), DataError);
    CHECK_THROWS_AS(parse_ohlcv_csv(""), DataError);
    CHECK_THROWS_AS(parse_ohlcv_csv(kHeader + "2015-01-05,abc,2,1,2,2,5\n"), DataError);
    CHECK_THROWS_AS(parse_ohlcv_csv(kHeader + "05/01/2015,1,2,1,2,2,5\n"), DataError);
    CHECK_THROWS_AS(parse_ohlcv_csv(kHeader + "2015-01-05,1,2,1,2,2\n"), DataError);
    CHECK_THROWS_AS(parse_ohlcv_csv(kHeader + "2015-01-05,1,2,1,2,2,5\n2015-01-05,1,2,1,2,2,5\n"), DataError);
}

TEST_CASE("invariant violations name the offending date") {
    try {
        parse_ohlcv_csv(kHeader + "2015-03-02,1,2,1.5,2,2,5\n");
        FAIL("expected a DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("2015-03-02") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_ohlcv_csv(kHeader + "2015-03-02,3,2,1,2,2,5\n"), DataError);
    CHECK_THROWS_AS(parse_ohlcv_csv(kHeader + "2015-03-02,1,2,1,0.5,2,5\n"), DataError);
    CHECK_THROWS_AS(parse_ohlcv_csv(kHeader + "2015-03-02,1,2,1,2,2,-5\n"), DataError);
    CHECK_THROWS_AS(parse_ohlcv_csv(kHeader + "2015-03-02,0,0,0,0,0,5\n"), DataError);
}

TEST_CASE("zero volume is legal") {
    CHECK(parse_ohlcv_csv(kHeader + "2015-03-02,1,2,1,2,2,0\n").series.size() == 1);
}

TEST_CASE("chunking") {
    std::vector<int> rows(1040);
    auto w = chunk_into_weeks(std::span<const int>(rows));
    CHECK(w.weeks.size() == 208);
    CHECK(w.dropped_trailing == 0);

    std::vector<int> seven(7);
    std::iota(seven.begin(), seven.end(), 0);
    w = chunk_into_weeks(std::span<const int>(seven));
    REQUIRE(w.weeks.size() == 1);
    CHECK(w.dropped_trailing == 2);
    CHECK(w.weeks[0].rows == std::vector<int>{0, 1, 2, 3, 4});

    w = chunk_into_weeks(std::span<const int>());
    CHECK(w.weeks.empty());
    CHECK(w.dropped_trailing == 0);
}

TEST_CASE("property: chunk counts and order") {
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<int> rows(rng.below(60));
        std::iota(rows.begin(), rows.end(), 0);
        const auto w = chunk_into_weeks(std::span<const int>(rows));
        const std::size_t covered = 5 * w.weeks.size();
        CHECK(covered <= rows.size());
        CHECK(rows.size() - covered < 5);
        CHECK(rows.size() - covered == w.dropped_trailing);
        for (std::size_t i = 0; i < w.weeks.size(); ++i) {
            CHECK(w.weeks[i].index == i);
            REQUIRE(w.weeks[i].rows.size() == 5);
            for (std::size_t d = 0; d < 5; ++d) CHECK(w.weeks[i].rows[d] == static_cast<int>(5 * i + d));
        }
    }
}

TEST_CASE("synthetic series") {
    const auto c = generate_synthetic_series(5, SyntheticPattern::constant, 1);
    REQUIRE(c.size() == 5);
    for (const auto& b : c.bars()) CHECK(b.close == c[0].close);

    for (auto p : {SyntheticPattern::constant, SyntheticPattern::linear, SyntheticPattern::sine,
                   SyntheticPattern::random_walk}) {
        const auto a = generate_synthetic_series(300, p, 42);
        CHECK(a == generate_synthetic_series(300, p, 42));
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK_NOTHROW(validate_bar(a[i]));
            CHECK(a[i].volume > 0);
            CHECK(iso_weekday(a[i].date) <= 5);
            if (i > 0) CHECK(a[i - 1].date < a[i].date);
        }
    }
    CHECK(generate_synthetic_series(0, SyntheticPattern::sine, 7).size() == 0);
    CHECK(generate_synthetic_series(50, SyntheticPattern::random_walk, 1) !=
          generate_synthetic_series(50, SyntheticPattern::random_walk, 2));
    CHECK_THROWS_AS(parse_synthetic_pattern("sawtooth"), std::invalid_argument);
}

TEST_CASE("property: serialize then parse is the identity") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const ValidatedSeries s(testing::random_bars(rng, rng.below(40)));
        const auto back = parse_ohlcv_csv(serialize_ohlcv_csv(s));
        CHECK(back.series == s);
        CHECK(back.skipped_null_rows == 0);
    }
    const auto synth = generate_synthetic_series(200, SyntheticPattern::random_walk, 9);
    CHECK(parse_ohlcv_csv(serialize_ohlcv_csv(synth)).series == synth);
}

TEST_CASE("property: row permutations parse to the same series") {
    Rng rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const ValidatedSeries s(testing::random_bars(rng, 2 + rng.below(30)));
        const std::string text = serialize_ohlcv_csv(s);
        auto lines = split(text, '\n');
        std::vector<std::string_view> body(lines.begin() + 1, lines.end() - 1);
        rng.shuffle(std::span<std::string_view>(body));
        std::string shuffled = kHeader;
        for (auto l : body) shuffled += std::string(l) + "\n";
        CHECK(parse_ohlcv_csv(shuffled).series == s);
    }
}

}
