#include "gatechain/dates.hpp"

#include <cstdio>

namespace gatechain::dates {
namespace {

bool digits(std::string_view s, std::size_t pos, std::size_t n, int& out) {
  out = 0;
  for (std::size_t i = pos; i < pos + n; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    out = out * 10 + (s[i] - '0');
  }
  return true;
}

}  // namespace

std::optional<std::chrono::sys_days> parse_date(std::string_view text) {
  using namespace std::chrono;
  int y, m, d;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !digits(text, 0, 4, y) ||
      !digits(text, 5, 2, m) || !digits(text, 8, 2, d)) {
    return std::nullopt;
  }
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return sys_days{ymd};
}

std::optional<std::chrono::sys_seconds> parse_datetime(std::string_view text) {
  using namespace std::chrono;
  if (text.size() != 16 || text[10] != ' ' || text[13] != ':') return std::nullopt;
  const auto day = parse_date(text.substr(0, 10));
  int hh, mm;
  if (!day || !digits(text, 11, 2, hh) || !digits(text, 14, 2, mm) || hh > 23 || mm > 59) {
    return std::nullopt;
  }
  return sys_seconds{*day} + hours{hh} + minutes{mm};
}

std::string format_date(std::chrono::sys_days day) {
  using namespace std::chrono;
  const year_month_day ymd{day};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::optional<std::chrono::sys_days> day_of(std::string_view date_or_datetime) {
  if (date_or_datetime.size() == 16) {
    if (!parse_datetime(date_or_datetime)) return std::nullopt;
    return parse_date(date_or_datetime.substr(0, 10));
  }
  return parse_date(date_or_datetime);
}

std::chrono::sys_days utc_day(std::int64_t epoch_micros) {
  using namespace std::chrono;
  return floor<days>(sys_time<microseconds>{microseconds{epoch_micros}});
}

}  // namespace gatechain::dates
