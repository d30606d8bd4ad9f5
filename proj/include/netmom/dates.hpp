#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace netmom {

// Calendar date with civil-day arithmetic. Serial 0 = 1970-01-01.
struct Date {
    int16_t year = 1970;
    int8_t month = 1;
    int8_t day = 1;

    auto operator<=>(const Date&) const = default;

    int64_t serial() const;
    static Date from_serial(int64_t days);

    // 0 = Monday ... 6 = Sunday
    int weekday() const;
    bool is_weekday() const { return weekday() < 5; }

    // Next calendar day that falls Mon-Fri.
    Date next_trading_day() const;

    std::string iso() const;
};

// Strict ISO-8601 (YYYY-MM-DD); throws DataError on malformed input.
Date parse_date(const std::string& s);

}  // namespace netmom
