#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace weekcast {

using Date = std::chrono::year_month_day;

/// Parses a strict ISO `YYYY-MM-DD` date; returns nullopt on any deviation.
std::optional<Date> parse_iso_date(std::string_view text);

std::string format_iso_date(const Date& date);

/// ISO weekday, Monday = 1 ... Sunday = 7.
unsigned iso_weekday(const Date& date);

Date add_days(const Date& date, int days);

} // namespace weekcast
