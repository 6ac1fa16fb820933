#include "ctigap/util/format.hpp"

#include <algorithm>
#include <cstdio>

namespace ctigap::util {
namespace {

std::string formatted(const char* spec, double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, value);
    return buf;
}

}  // namespace

std::string with_thousands(std::size_t value) {
    std::string digits = std::to_string(value);
    std::string out;
    out.reserve(digits.size() + digits.size() / 3);
    int run = 0;
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
        if (run == 3) {
            out.push_back(',');
            run = 0;
        }
        out.push_back(*it);
        ++run;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

std::string pct1(double fraction) { return formatted("%.1f%%", fraction * 100.0); }
std::string pct2(double fraction) { return formatted("%.2f%%", fraction * 100.0); }
std::string fixed1(double value) { return formatted("%.1f", value); }
std::string fixed3(double value) { return formatted("%.3f", value); }

}  // namespace ctigap::util
