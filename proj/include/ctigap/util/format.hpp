#pragma once

#include <cstddef>
#include <string>

namespace ctigap::util {

// 24771 -> "24,771"
std::string with_thousands(std::size_t value);

// Fractions rendered as percentages: pct1(0.356) -> "35.6%",
// pct2(0.5844) -> "58.44%". C locale, deterministic.
std::string pct1(double fraction);
std::string pct2(double fraction);

// Fixed-point decimal: fixed1(25.96) -> "26.0", fixed3(0.6431) -> "0.643".
std::string fixed1(double value);
std::string fixed3(double value);

}  // namespace ctigap::util
