#pragma once

#include <chrono>
#include <cstdio>
#include <string>
#include <string_view>

#include "leadcast/numeric.hpp"

namespace leadcast {

using Date = std::chrono::sys_days;

/// Calendar month counted from 1970-01 (index 0). Index mod 12 is the zero-based month of year.
using MonthIndex = int;

inline Date make_date(int y, unsigned m, unsigned d) {
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok()) throw ValidationError("invalid calendar date " + std::to_string(y) + "-" + std::to_string(m) + "-" + std::to_string(d));
    return Date{ymd};
}

inline MonthIndex month_index(int year, unsigned month) {
    return (year - 1970) * 12 + static_cast<int>(month) - 1;
}

inline MonthIndex month_of(Date d) {
    const std::chrono::year_month_day ymd{d};
    return month_index(static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()));
}

inline int year_of_month(MonthIndex m) {
    return 1970 + (m >= 0 ? m / 12 : -((-m + 11) / 12));
}

inline unsigned month_of_year(MonthIndex m) {
    return static_cast<unsigned>(((m % 12) + 12) % 12) + 1;
}

inline Date first_day(MonthIndex m) {
    return make_date(year_of_month(m), month_of_year(m), 1);
}

inline Date last_day(MonthIndex m) {
    return first_day(m + 1) - std::chrono::days{1};
}

inline int days_in_month(MonthIndex m) {
    return static_cast<int>((first_day(m + 1) - first_day(m)).count());
}

/// Days since 1970-01-01.
inline long day_number(Date d) {
    return static_cast<long>(d.time_since_epoch().count());
}

/// Day of year, zero-based.
inline int day_of_year(Date d) {
    const std::chrono::year_month_day ymd{d};
    const Date jan1{ymd.year() / std::chrono::January / 1};
    return static_cast<int>((d - jan1).count());
}

/// Parses YYYY-MM-DD.
inline Date parse_date(std::string_view s) {
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    char tail = 0;
    const std::string str(s);
    if (str.size() != 10 || std::sscanf(str.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &tail) != 3) {
        throw ValidationError("malformed ISO date '" + str + "'");
    }
    return make_date(y, m, d);
}

/// Parses YYYY-MM.
inline MonthIndex parse_month(std::string_view s) {
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
    int y = 0;
    unsigned m = 0;
    char tail = 0;
    const std::string str(s);
    if (str.size() != 7 || std::sscanf(str.c_str(), "%4d-%2u%c", &y, &m, &tail) != 2 || m < 1 || m > 12) {
        throw ValidationError("malformed month '" + str + "' (expected YYYY-MM)");
    }
    return month_index(y, m);
}

inline std::string format_date(Date d) {
    const std::chrono::year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

inline std::string format_month(MonthIndex m) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u", year_of_month(m), month_of_year(m));
    return buf;
}

}  // namespace leadcast
