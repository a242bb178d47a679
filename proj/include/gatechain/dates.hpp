#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace gatechain::dates {

/// "YYYY-MM-DD" with a valid calendar date.
std::optional<std::chrono::sys_days> parse_date(std::string_view text);
/// "YYYY-MM-DD HH:MM".
std::optional<std::chrono::sys_seconds> parse_datetime(std::string_view text);

std::string format_date(std::chrono::sys_days day);

/// Date part of a "YYYY-MM-DD HH:MM" value, or the value itself if it is a date.
std::optional<std::chrono::sys_days> day_of(std::string_view date_or_datetime);

/// Calendar date in UTC for an epoch timestamp in microseconds.
std::chrono::sys_days utc_day(std::int64_t epoch_micros);

}  // namespace gatechain::dates
