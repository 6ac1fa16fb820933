#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace ctigap::util {

// Standalone SHA-1, used only to derive name-based UUIDs. Not a security
// boundary.
std::array<std::uint8_t, 20> sha1(std::string_view data);

std::string sha1_hex(std::string_view data);

}  // namespace ctigap::util
