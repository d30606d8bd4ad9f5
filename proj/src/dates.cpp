#include "netmom/dates.hpp"

#include <array>
#include <cstdio>

#include "netmom/errors.hpp"

namespace netmom {

namespace {

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
    static constexpr std::array<int, 12> lens = {31, 28, 31, 30, 31, 30,
                                                 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return lens[static_cast<size_t>(m - 1)];
}

}  // namespace

// days_from_civil / civil_from_days (Hinnant's algorithms).
int64_t Date::serial() const {
    int y = year;
    const int m = month;
    const int d = day;
    y -= m <= 2;
    const int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy =
        static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

Date Date::from_serial(int64_t days) {
    days += 719468;
    const int64_t era = (days >= 0 ? days : days - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(days - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int64_t y = static_cast<int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return Date{static_cast<int16_t>(y + (m <= 2)), static_cast<int8_t>(m),
                static_cast<int8_t>(d)};
}

int Date::weekday() const {
    // serial 0 (1970-01-01) was a Thursday.
    int64_t w = (serial() + 3) % 7;
    if (w < 0) w += 7;
    return static_cast<int>(w);
}

Date Date::next_trading_day() const {
    Date d = from_serial(serial() + 1);
    while (!d.is_weekday()) d = from_serial(d.serial() + 1);
    return d;
}

std::string Date::iso() const {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", static_cast<int>(year),
                  static_cast<int>(month), static_cast<int>(day));
    return buf;
}

Date parse_date(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-')
        throw DataError("malformed date '" + s + "' (expected YYYY-MM-DD)");
    for (size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
        if (s[i] < '0' || s[i] > '9')
            throw DataError("malformed date '" + s + "' (expected YYYY-MM-DD)");
    const int y = std::stoi(s.substr(0, 4));
    const int m = std::stoi(s.substr(5, 2));
    const int d = std::stoi(s.substr(8, 2));
    if (m < 1 || m > 12 || d < 1 || d > days_in_month(y, m))
        throw DataError("invalid calendar date '" + s + "'");
    return Date{static_cast<int16_t>(y), static_cast<int8_t>(m),
                static_cast<int8_t>(d)};
}

}  // namespace netmom
