// Copyright 2026 The qstab developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include "qstab/error.hpp"

namespace qstab {

// Seconds since the Unix epoch. All calendar math is proleptic Gregorian,
// UTC only; no time zones, no leap seconds.
using UtcSeconds = std::int64_t;

namespace detail {

// Days since 1970-01-01 for a civil date (Hinnant's era algorithm).
inline std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct CivilDate {
  int year;
  unsigned month;
  unsigned day;
};

inline CivilDate civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const int y = static_cast<int>(yoe) + static_cast<int>(era) * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return {y + (m <= 2), m, d};
}

// ISO weekday, Monday = 1 .. Sunday = 7.
inline unsigned iso_weekday_from_days(std::int64_t z) {
  const std::int64_t wd = (z + 3) % 7;  // 1970-01-01 was a Thursday
  return static_cast<unsigned>(wd >= 0 ? wd : wd + 7) + 1;
}

inline bool parse_fixed_uint(std::string_view s, unsigned& out) {
  if (s.empty()) return false;
  unsigned v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
    v = v * 10 + static_cast<unsigned>(c - '0');
  }
  out = v;
  return true;
}

}  // namespace detail

inline UtcSeconds utc_from_civil(int year, unsigned month, unsigned day, unsigned hour = 0,
                                 unsigned minute = 0, unsigned second = 0) {
  return detail::days_from_civil(year, month, day) * 86400 + hour * 3600 + minute * 60 + second;
}

inline unsigned days_in_month(int year, unsigned month) {
  static constexpr unsigned lengths[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month == 2) {
    const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    return leap ? 29 : 28;
  }
  return lengths[month - 1];
}

// Accepts "YYYY-MM-DD" (midnight) or "YYYY-MM-DDTHH:MM:SS" with an optional
// trailing "Z". Anything else is rejected.
inline std::optional<UtcSeconds> parse_utc(std::string_view s) {
  if (!s.empty() && s.back() == 'Z') s.remove_suffix(1);
  if (s.size() != 10 && s.size() != 19) return std::nullopt;
  if (s[4] != '-' || s[7] != '-') return std::nullopt;
  unsigned year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
  if (!detail::parse_fixed_uint(s.substr(0, 4), year) ||
      !detail::parse_fixed_uint(s.substr(5, 2), month) ||
      !detail::parse_fixed_uint(s.substr(8, 2), day)) {
    return std::nullopt;
  }
  if (s.size() == 19) {
    if (s[10] != 'T' || s[13] != ':' || s[16] != ':') return std::nullopt;
    if (!detail::parse_fixed_uint(s.substr(11, 2), hour) ||
        !detail::parse_fixed_uint(s.substr(14, 2), minute) ||
        !detail::parse_fixed_uint(s.substr(17, 2), second)) {
      return std::nullopt;
    }
  }
  if (month < 1 || month > 12 || day < 1 || day > days_in_month(static_cast<int>(year), month) ||
      hour > 23 || minute > 59 || second > 59) {
    return std::nullopt;
  }
  return utc_from_civil(static_cast<int>(year), month, day, hour, minute, second);
}

inline std::string format_utc(UtcSeconds t) {
  std::int64_t days = t / 86400;
  std::int64_t rem = t % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  const auto cd = detail::civil_from_days(days);
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02u:%02u:%02uZ", cd.year, cd.month, cd.day,
                static_cast<unsigned>(rem / 3600), static_cast<unsigned>((rem % 3600) / 60),
                static_cast<unsigned>(rem % 60));
  return buf;
}

inline std::string month_label(UtcSeconds t) {
  std::int64_t days = t / 86400;
  if (t % 86400 < 0) --days;
  const auto cd = detail::civil_from_days(days);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u", cd.year, cd.month);
  return buf;
}

inline std::string day_label(UtcSeconds t) {
  std::int64_t days = t / 86400;
  if (t % 86400 < 0) --days;
  const auto cd = detail::civil_from_days(days);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", cd.year, cd.month, cd.day);
  return buf;
}

// ISO-8601 week label "YYYY-Www"; the year is the ISO week-based year.
inline std::string iso_week_label(UtcSeconds t) {
  std::int64_t days = t / 86400;
  if (t % 86400 < 0) --days;
  // Thursday of the current ISO week decides the week-based year.
  const std::int64_t thursday = days + 4 - static_cast<std::int64_t>(detail::iso_weekday_from_days(days));
  const auto cd = detail::civil_from_days(thursday);
  const std::int64_t jan1 = detail::days_from_civil(cd.year, 1, 1);
  const unsigned week = static_cast<unsigned>((thursday - jan1) / 7) + 1;
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-W%02u", cd.year, week);
  return buf;
}

}  // namespace qstab
