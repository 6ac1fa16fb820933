#include "ctigap/util/time.hpp"

#include <cctype>

namespace ctigap::util {

namespace {

bool read_digits(std::string_view s, std::size_t& pos, int count, long long& out) {
    long long value = 0;
    for (int i = 0; i < count; ++i) {
        if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos]))) {
            return false;
        }
        value = value * 10 + (s[pos] - '0');
        ++pos;
    }
    out = value;
    return true;
}

bool expect(std::string_view s, std::size_t& pos, char c) {
    if (pos >= s.size() || s[pos] != c) {
        return false;
    }
    ++pos;
    return true;
}

// Howard Hinnant's days-from-civil algorithm.
long long days_from_civil(long long y, int m, int d) {
    y -= m <= 2;
    const long long era = (y >= 0 ? y : y - 399) / 400;
    const int yoe = static_cast<int>(y - era * 400);
    const int doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const int doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + doe - 719468;  // shift day 0 to 1970-01-01
}

}  // namespace

std::optional<std::int64_t> parse_rfc3339(std::string_view s) {
    std::size_t pos = 0;
    long long year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
    if (!read_digits(s, pos, 4, year) || !expect(s, pos, '-') ||
        !read_digits(s, pos, 2, month) || !expect(s, pos, '-') ||
        !read_digits(s, pos, 2, day)) {
        return std::nullopt;
    }
    if (pos >= s.size() || (s[pos] != 'T' && s[pos] != 't' && s[pos] != ' ')) {
        return std::nullopt;
    }
    ++pos;
    if (!read_digits(s, pos, 2, hour) || !expect(s, pos, ':') ||
        !read_digits(s, pos, 2, minute) || !expect(s, pos, ':') ||
        !read_digits(s, pos, 2, second)) {
        return std::nullopt;
    }
    if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 || minute > 59 ||
        second > 60) {
        return std::nullopt;
    }

    long long micros = 0;
    if (pos < s.size() && s[pos] == '.') {
        ++pos;
        long long scale = 100000;
        bool any = false;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
            if (scale > 0) {
                micros += (s[pos] - '0') * scale;
                scale /= 10;
            }
            ++pos;
            any = true;
        }
        if (!any) {
            return std::nullopt;
        }
    }

    long long offset_seconds = 0;
    if (pos >= s.size()) {
        return std::nullopt;
    }
    if (s[pos] == 'Z' || s[pos] == 'z') {
        ++pos;
    } else if (s[pos] == '+' || s[pos] == '-') {
        const int sign = s[pos] == '+' ? 1 : -1;
        ++pos;
        long long oh = 0, om = 0;
        if (!read_digits(s, pos, 2, oh) || !expect(s, pos, ':') || !read_digits(s, pos, 2, om)) {
            return std::nullopt;
        }
        offset_seconds = sign * (oh * 3600 + om * 60);
    } else {
        return std::nullopt;
    }
    if (pos != s.size()) {
        return std::nullopt;
    }

    const long long days = days_from_civil(year, static_cast<int>(month), static_cast<int>(day));
    const long long total_seconds =
        days * 86400 + hour * 3600 + minute * 60 + second - offset_seconds;
    return total_seconds * 1000000 + micros;
}

}  // namespace ctigap::util
