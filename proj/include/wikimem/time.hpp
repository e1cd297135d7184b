#pragma once

#include <chrono>
#include <compare>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wikimem/error.hpp"

namespace wikimem {

using Timestamp = std::chrono::sys_seconds;

namespace detail {

inline std::optional<int> parse_digits(std::string_view s, std::size_t pos, std::size_t count) {
  if (pos + count > s.size()) return std::nullopt;
  int value = 0;
  for (std::size_t i = pos; i < pos + count; ++i) {
    if (s[i] < '0' || s[i] > '9') return std::nullopt;
    value = value * 10 + (s[i] - '0');
  }
  return value;
}

}  // namespace detail

// Calendar month, ordered chronologically.
struct YearMonth {
  int year = 1970;
  int month = 1;  // 1..12

  auto operator<=>(const YearMonth&) const = default;

  YearMonth next() const { return month == 12 ? YearMonth{year + 1, 1} : YearMonth{year, month + 1}; }

  // Months elapsed from *this to other (negative when other is earlier).
  int months_until(const YearMonth& other) const {
    return (other.year - year) * 12 + (other.month - month);
  }

  Timestamp start() const {
    using namespace std::chrono;
    return sys_days{std::chrono::year{year} / std::chrono::month{static_cast<unsigned>(month)} / 1};
  }

  // Month boundary: 23:59:59 UTC on the last calendar day.
  Timestamp end() const { return next().start() - std::chrono::seconds{1}; }

  std::string to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
    return buf;
  }

  static YearMonth of(Timestamp t) {
    using namespace std::chrono;
    const year_month_day ymd{floor<days>(t)};
    return {static_cast<int>(ymd.year()), static_cast<int>(static_cast<unsigned>(ymd.month()))};
  }

  static YearMonth parse(std::string_view s) {
    const auto y = detail::parse_digits(s, 0, 4);
    const auto m = detail::parse_digits(s, 5, 2);
    if (s.size() != 7 || !y || !m || s[4] != '-' || *m < 1 || *m > 12) {
      throw Error(ErrorKind::Config, "expected YYYY-MM, got '" + std::string(s) + "'");
    }
    return {*y, *m};
  }
};

// Inclusive run of months [first, last].
struct MonthSpan {
  YearMonth first;
  YearMonth last;

  bool empty() const { return last < first; }
  bool contains(const YearMonth& m) const { return first <= m && m <= last; }
  std::size_t size() const { return empty() ? 0 : static_cast<std::size_t>(first.months_until(last) + 1); }

  std::vector<YearMonth> months() const {
    std::vector<YearMonth> out;
    for (YearMonth m = first; m <= last; m = m.next()) out.push_back(m);
    return out;
  }
};

inline std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  const hh_mm_ss hms{t - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

// Accepts "YYYY-MM-DDTHH:MM:SSZ" (MediaWiki format), "YYYY-MM-DD" and "YYYY-MM".
// Date-only forms resolve to the start of the day or month.
inline Timestamp parse_timestamp(std::string_view s) {
  using namespace std::chrono;
  const auto bad = [&] { return Error(ErrorKind::Config, "bad timestamp '" + std::string(s) + "'"); };
  const auto y = detail::parse_digits(s, 0, 4);
  const auto mo = detail::parse_digits(s, 5, 2);
  if (!y || !mo || s.size() < 7 || s[4] != '-') throw bad();
  int d = 1, hh = 0, mm = 0, ss = 0;
  if (s.size() >= 10) {
    const auto dd = detail::parse_digits(s, 8, 2);
    if (!dd || s[7] != '-') throw bad();
    d = *dd;
  } else if (s.size() != 7) {
    throw bad();
  }
  if (s.size() > 10) {
    const auto h = detail::parse_digits(s, 11, 2);
    const auto mi = detail::parse_digits(s, 14, 2);
    const auto se = detail::parse_digits(s, 17, 2);
    if (s.size() != 20 || (s[10] != 'T' && s[10] != ' ') || s[13] != ':' || s[16] != ':' || s[19] != 'Z' ||
        !h || !mi || !se) {
      throw bad();
    }
    hh = *h;
    mm = *mi;
    ss = *se;
  }
  const year_month_day ymd{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*mo)},
                           std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || hh > 23 || mm > 59 || ss > 60) throw bad();
  return sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss};
}

}  // namespace wikimem
