#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace histmine::detail {

// Days since 1970-01-01 for a proleptic Gregorian civil date.
inline std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);            // [0, 399]
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;  // [0, 365]
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;           // [0, 146096]
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int yr = static_cast<int>(yoe) + static_cast<int>(era) * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y = yr + (m <= 2);
}

inline bool is_leap(int y) {
    return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0);
}

inline unsigned days_in_month(int y, unsigned m) {
    static constexpr unsigned lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return m >= 1 && m <= 12 ? lengths[m - 1] : 0;
}

// Parses an RFC 3339 timestamp ("2010-03-01T00:00:00Z" or with a numeric
// offset) into seconds since the Unix epoch, UTC. Fractional seconds are
// accepted and truncated. Returns nullopt on any malformation.
inline std::optional<std::int64_t> parse_rfc3339(std::string_view text) {
    auto digit = [&](size_t i) -> int {
        if (i >= text.size() || text[i] < '0' || text[i] > '9') return -1;
        return text[i] - '0';
    };
    auto num = [&](size_t pos, size_t n) -> int {
        int v = 0;
        for (size_t i = 0; i < n; ++i) {
            int d = digit(pos + i);
            if (d < 0) return -1;
            v = v * 10 + d;
        }
        return v;
    };
    if (text.size() < 20) return std::nullopt;
    int year = num(0, 4), month = num(5, 2), day = num(8, 2);
    if (year < 0 || month < 0 || day < 0) return std::nullopt;
    if (text[4] != '-' || text[7] != '-') return std::nullopt;
    if (text[10] != 'T' && text[10] != 't' && text[10] != ' ') return std::nullopt;
    int hour = num(11, 2), minute = num(14, 2), second = num(17, 2);
    if (hour < 0 || minute < 0 || second < 0) return std::nullopt;
    if (text[13] != ':' || text[16] != ':') return std::nullopt;
    if (month < 1 || month > 12 || day < 1 ||
        day > static_cast<int>(days_in_month(year, static_cast<unsigned>(month))))
        return std::nullopt;
    if (hour > 23 || minute > 59 || second > 60) return std::nullopt;
    if (second == 60) second = 59;  // fold leap seconds

    size_t i = 19;
    if (i < text.size() && text[i] == '.') {
        ++i;
        if (digit(i) < 0) return std::nullopt;
        while (digit(i) >= 0) ++i;
    }
    if (i >= text.size()) return std::nullopt;
    std::int64_t offset = 0;
    if (text[i] == 'Z' || text[i] == 'z') {
        ++i;
    } else if (text[i] == '+' || text[i] == '-') {
        const bool neg = text[i] == '-';
        int oh = num(i + 1, 2);
        if (oh < 0 || i + 5 >= text.size() || text[i + 3] != ':') return std::nullopt;
        int om = num(i + 4, 2);
        if (om < 0 || oh > 23 || om > 59) return std::nullopt;
        offset = (neg ? -1 : 1) * (oh * 3600 + om * 60);
        i += 6;
    } else {
        return std::nullopt;
    }
    if (i != text.size()) return std::nullopt;

    const std::int64_t days = days_from_civil(year, static_cast<unsigned>(month),
                                              static_cast<unsigned>(day));
    return days * 86400 + hour * 3600 + minute * 60 + second - offset;
}

// Formats epoch seconds as "YYYY-MM-DDThh:mm:ssZ".
inline std::string format_rfc3339(std::int64_t epoch_seconds) {
    std::int64_t days = epoch_seconds / 86400;
    std::int64_t rem = epoch_seconds % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    int y = 0;
    unsigned m = 0, d = 0;
    civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", y, m, d,
                  static_cast<long long>(rem / 3600),
                  static_cast<long long>(rem / 60 % 60),
                  static_cast<long long>(rem % 60));
    return buf;
}

} // namespace histmine::detail
